#!/usr/bin/env python3
"""Generate the bundled water STO-3G FCIDUMP fixtures.

Runs restricted Hartree-Fock in the STO-3G basis with McMurchie-Davidson
integrals, transforms the integrals to the molecular-orbital basis and writes
FCIDUMP files plus scan manifests into src/vqepes/data/h2o_sto3g/.

This script is offline tooling, not part of the installed package; it needs
scipy (Boys function via the incomplete gamma function) in addition to the
package itself. Self-checks run before any file is written:

  * closed-form (ss|ss) and the STO-3G hydrogen atom energy (-0.46658185 Ha),
  * p-type integrals against center-coordinate finite differences of s-type
    integrals (a p primitive is the A_x-derivative of an s primitive / 2a),
  * dissociated H2 full CI against twice the hydrogen atom energy, computed
    through the package's own Jordan-Wigner + exact-diagonalization path.

Usage: python3 tools/make_fixtures.py [--out DIR]
"""

import argparse
import itertools
import math
import sys
import time
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.special import gamma as gamma_function
from scipy.special import gammainc

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from vqepes.chem import FermionicHamiltonian, build_geometry, serialize_fcidump
from vqepes.exact import ground_state
from vqepes.jordan_wigner import jordan_wigner

ANGSTROM_TO_BOHR = 1.8897261246257702

# STO-3G exponents and contraction coefficients (Basis Set Exchange values;
# coefficients refer to normalized primitives).
STO3G = {
    "H": [("s", [3.42525091, 0.62391373, 0.16885540],
           [0.15432897, 0.53532814, 0.44463454])],
    "O": [
        ("s", [130.7093200, 23.8088610, 6.4436083],
         [0.15432897, 0.53532814, 0.44463454]),
        ("s", [5.0331513, 1.1695961, 0.3803890],
         [-0.09996723, 0.39951283, 0.70011547]),
        ("p", [5.0331513, 1.1695961, 0.3803890],
         [0.15591627, 0.60768372, 0.39195739]),
    ],
}
NUCLEAR_CHARGE = {"H": 1.0, "O": 8.0}


def boys(n_max: int, t: float) -> np.ndarray:
    """F_0..F_n_max at argument t."""
    out = np.empty(n_max + 1)
    if t < 1e-13:
        for n in range(n_max + 1):
            out[n] = 1.0 / (2 * n + 1)
        return out
    for n in range(n_max + 1):
        a = n + 0.5
        out[n] = 0.5 * gamma_function(a) * gammainc(a, t) / t**a
    return out


def hermite_e(i: int, j: int, t: int, q_x: float, a: float, b: float) -> float:
    """Hermite expansion coefficient E_t^{ij} for exponents a, b and A-B = q_x."""
    p = a + b
    mu = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return math.exp(-mu * q_x * q_x)
    if j == 0:
        return (
            hermite_e(i - 1, j, t - 1, q_x, a, b) / (2 * p)
            - (mu * q_x / a) * hermite_e(i - 1, j, t, q_x, a, b)
            + (t + 1) * hermite_e(i - 1, j, t + 1, q_x, a, b)
        )
    return (
        hermite_e(i, j - 1, t - 1, q_x, a, b) / (2 * p)
        + (mu * q_x / b) * hermite_e(i, j - 1, t, q_x, a, b)
        + (t + 1) * hermite_e(i, j - 1, t + 1, q_x, a, b)
    )


def primitive_norm(a: float, lmn) -> float:
    L = sum(lmn)
    double_fact = 1.0
    for l in lmn:
        for k in range(2 * l - 1, 0, -2):
            double_fact *= k
    return (2 * a / math.pi) ** 0.75 * (4 * a) ** (L / 2) / math.sqrt(double_fact)


class BasisFunction:
    """One contracted Cartesian Gaussian."""

    def __init__(self, center, lmn, exponents, coefficients):
        self.center = np.asarray(center, dtype=float)
        self.lmn = tuple(lmn)
        self.exponents = np.asarray(exponents, dtype=float)
        coeffs = np.asarray(coefficients, dtype=float) * np.array(
            [primitive_norm(a, lmn) for a in exponents]
        )
        self.coefficients = coeffs

    def normalized(self):
        norm = overlap(self, self)
        scaled = BasisFunction(self.center, self.lmn, self.exponents, np.zeros_like(self.exponents))
        scaled.coefficients = self.coefficients / math.sqrt(norm)
        return scaled


def build_basis(atoms):
    functions = []
    for symbol, center in atoms:
        for kind, exponents, coefficients in STO3G[symbol]:
            if kind == "s":
                functions.append(BasisFunction(center, (0, 0, 0), exponents, coefficients))
            else:
                for lmn in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                    functions.append(BasisFunction(center, lmn, exponents, coefficients))
    return [f.normalized() for f in functions]


# -- one-electron integrals ---------------------------------------------------


def _overlap_1d(i, j, q, a, b, p):
    return hermite_e(i, j, 0, q, a, b) * math.sqrt(math.pi / p)


def overlap(fa: BasisFunction, fb: BasisFunction) -> float:
    ab = fa.center - fb.center
    total = 0.0
    for a, ca in zip(fa.exponents, fa.coefficients):
        for b, cb in zip(fb.exponents, fb.coefficients):
            p = a + b
            value = 1.0
            for d in range(3):
                value *= _overlap_1d(fa.lmn[d], fb.lmn[d], ab[d], a, b, p)
            total += ca * cb * value
    return total


def kinetic(fa: BasisFunction, fb: BasisFunction) -> float:
    ab = fa.center - fb.center
    total = 0.0
    for a, ca in zip(fa.exponents, fa.coefficients):
        for b, cb in zip(fb.exponents, fb.coefficients):
            p = a + b
            s = [_overlap_1d(fa.lmn[d], fb.lmn[d], ab[d], a, b, p) for d in range(3)]
            k = []
            for d in range(3):
                i, j = fa.lmn[d], fb.lmn[d]
                term = b * (2 * j + 1) * s[d] - 2 * b * b * _overlap_1d(i, j + 2, ab[d], a, b, p)
                if j >= 2:
                    term -= 0.5 * j * (j - 1) * _overlap_1d(i, j - 2, ab[d], a, b, p)
                k.append(term)
            total += ca * cb * (k[0] * s[1] * s[2] + s[0] * k[1] * s[2] + s[0] * s[1] * k[2])
    return total


def _hermite_coulomb_table(t_max, u_max, v_max, p, pc, boys_values):
    """R_{tuv} = R^0_{tuv} via downward recursion over the Boys order."""

    @lru_cache(maxsize=None)
    def r(t, u, v, n):
        if t == u == v == 0:
            return (-2.0 * p) ** n * boys_values[n]
        if t > 0:
            value = pc[0] * r(t - 1, u, v, n + 1)
            if t > 1:
                value += (t - 1) * r(t - 2, u, v, n + 1)
            return value
        if u > 0:
            value = pc[1] * r(t, u - 1, v, n + 1)
            if u > 1:
                value += (u - 1) * r(t, u - 2, v, n + 1)
            return value
        value = pc[2] * r(t, u, v - 1, n + 1)
        if v > 1:
            value += (v - 1) * r(t, u, v - 2, n + 1)
        return value

    return {
        (t, u, v): r(t, u, v, 0)
        for t in range(t_max + 1)
        for u in range(u_max + 1)
        for v in range(v_max + 1)
    }


def nuclear_attraction(fa: BasisFunction, fb: BasisFunction, atoms) -> float:
    ab = fa.center - fb.center
    total = 0.0
    for a, ca in zip(fa.exponents, fa.coefficients):
        for b, cb in zip(fb.exponents, fb.coefficients):
            p = a + b
            center_p = (a * fa.center + b * fb.center) / p
            t_max = fa.lmn[0] + fb.lmn[0]
            u_max = fa.lmn[1] + fb.lmn[1]
            v_max = fa.lmn[2] + fb.lmn[2]
            e_coeffs = [
                [hermite_e(fa.lmn[d], fb.lmn[d], t, ab[d], a, b) for t in range(4)]
                for d in range(3)
            ]
            for symbol, center_c in atoms:
                pc = center_p - np.asarray(center_c)
                t_arg = p * float(pc @ pc)
                boys_values = boys(t_max + u_max + v_max, t_arg)
                table = _hermite_coulomb_table(t_max, u_max, v_max, p, pc, boys_values)
                value = 0.0
                for t in range(t_max + 1):
                    for u in range(u_max + 1):
                        for v in range(v_max + 1):
                            value += (
                                e_coeffs[0][t] * e_coeffs[1][u] * e_coeffs[2][v] * table[(t, u, v)]
                            )
                total -= ca * cb * NUCLEAR_CHARGE[symbol] * (2.0 * math.pi / p) * value
    return total


# -- two-electron integrals ---------------------------------------------------


class _PrimitivePair:
    __slots__ = ("p", "center", "weight", "e_coeffs", "t_max")

    def __init__(self, fa, fb, a, ca, b, cb):
        self.p = a + b
        self.center = (a * fa.center + b * fb.center) / self.p
        self.weight = ca * cb
        ab = fa.center - fb.center
        self.t_max = (
            fa.lmn[0] + fb.lmn[0],
            fa.lmn[1] + fb.lmn[1],
            fa.lmn[2] + fb.lmn[2],
        )
        self.e_coeffs = [
            [hermite_e(fa.lmn[d], fb.lmn[d], t, ab[d], a, b) for t in range(self.t_max[d] + 1)]
            for d in range(3)
        ]


def _pair_list(fa, fb):
    return [
        _PrimitivePair(fa, fb, a, ca, b, cb)
        for a, ca in zip(fa.exponents, fa.coefficients)
        for b, cb in zip(fb.exponents, fb.coefficients)
    ]


def electron_repulsion(fa, fb, fc, fd) -> float:
    """(ab|cd) in chemists' notation."""
    total = 0.0
    for bra in _pair_list(fa, fb):
        for ket in _pair_list(fc, fd):
            p, q = bra.p, ket.p
            alpha = p * q / (p + q)
            pq = bra.center - ket.center
            t_arg = alpha * float(pq @ pq)
            n_max = sum(bra.t_max) + sum(ket.t_max)
            boys_values = boys(n_max, t_arg)
            table = _hermite_coulomb_table(
                bra.t_max[0] + ket.t_max[0],
                bra.t_max[1] + ket.t_max[1],
                bra.t_max[2] + ket.t_max[2],
                alpha,
                pq,
                boys_values,
            )
            value = 0.0
            for t in range(bra.t_max[0] + 1):
                for u in range(bra.t_max[1] + 1):
                    for v in range(bra.t_max[2] + 1):
                        e_bra = bra.e_coeffs[0][t] * bra.e_coeffs[1][u] * bra.e_coeffs[2][v]
                        if e_bra == 0.0:
                            continue
                        for tt in range(ket.t_max[0] + 1):
                            for uu in range(ket.t_max[1] + 1):
                                for vv in range(ket.t_max[2] + 1):
                                    e_ket = (
                                        ket.e_coeffs[0][tt]
                                        * ket.e_coeffs[1][uu]
                                        * ket.e_coeffs[2][vv]
                                    )
                                    if e_ket == 0.0:
                                        continue
                                    sign = -1.0 if (tt + uu + vv) % 2 else 1.0
                                    value += e_bra * e_ket * sign * table[(t + tt, u + uu, v + vv)]
            prefactor = 2.0 * math.pi**2.5 / (p * q * math.sqrt(p + q))
            total += bra.weight * ket.weight * prefactor * value
    return total


# -- SCF -----------------------------------------------------------------------


def integral_tensors(atoms):
    basis = build_basis(atoms)
    n = len(basis)
    s = np.empty((n, n))
    t = np.empty((n, n))
    v = np.empty((n, n))
    for i in range(n):
        for j in range(i + 1):
            s[i, j] = s[j, i] = overlap(basis[i], basis[j])
            t[i, j] = t[j, i] = kinetic(basis[i], basis[j])
            v[i, j] = v[j, i] = nuclear_attraction(basis[i], basis[j], atoms)

    eri = np.zeros((n, n, n, n))
    pair_index = lambda a, b: a * (a + 1) // 2 + b
    for i in range(n):
        for j in range(i + 1):
            for k in range(i + 1):
                for l in range(k + 1):
                    if pair_index(i, j) < pair_index(k, l):
                        continue
                    value = electron_repulsion(basis[i], basis[j], basis[k], basis[l])
                    for a, b in ((i, j), (j, i)):
                        for c, d in ((k, l), (l, k)):
                            eri[a, b, c, d] = value
                            eri[c, d, a, b] = value
    return s, t, v, eri


def nuclear_repulsion(atoms):
    energy = 0.0
    for (sym_a, ra), (sym_b, rb) in itertools.combinations(atoms, 2):
        energy += (
            NUCLEAR_CHARGE[sym_a]
            * NUCLEAR_CHARGE[sym_b]
            / float(np.linalg.norm(np.asarray(ra) - np.asarray(rb)))
        )
    return energy


def restricted_hartree_fock(atoms, n_electrons, max_cycles=200):
    """Returns (total energy, MO coefficients, MO energies, integrals)."""
    if n_electrons % 2:
        raise ValueError("closed-shell RHF needs an even electron count")
    n_occ = n_electrons // 2
    s, t, v, eri = integral_tensors(atoms)
    h_core = t + v
    e_nuc = nuclear_repulsion(atoms)

    eigval, eigvec = np.linalg.eigh(s)
    x = eigvec @ np.diag(eigval**-0.5) @ eigvec.T

    def fock(density):
        coulomb = np.einsum("mnls,ls->mn", eri, density)
        exchange = np.einsum("mlsn,ls->mn", eri, density)
        return h_core + coulomb - 0.5 * exchange

    def density_from(f):
        f_ortho = x.T @ f @ x
        mo_e, c_ortho = np.linalg.eigh(f_ortho)
        c = x @ c_ortho
        occ = c[:, :n_occ]
        return 2.0 * occ @ occ.T, c, mo_e

    density, c, mo_e = density_from(h_core)
    energy = 0.0
    error_history, fock_history = [], []
    for cycle in range(max_cycles):
        f = fock(density)
        # DIIS on the orthonormal-basis gradient FDS - SDF
        grad = x.T @ (f @ density @ s - s @ density @ f) @ x
        error_history.append(grad.ravel())
        fock_history.append(f)
        if len(error_history) > 8:
            error_history.pop(0)
            fock_history.pop(0)
        if len(error_history) > 1:
            m = len(error_history)
            b = -np.ones((m + 1, m + 1))
            b[m, m] = 0.0
            for i in range(m):
                for j in range(m):
                    b[i, j] = float(error_history[i] @ error_history[j])
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                weights = np.linalg.solve(b, rhs)[:m]
                f = sum(w * fk for w, fk in zip(weights, fock_history))
            except np.linalg.LinAlgError:
                pass
        new_density, c, mo_e = density_from(f)
        new_energy = 0.5 * np.sum(new_density * (h_core + fock(new_density))) + e_nuc
        delta_e = abs(new_energy - energy)
        delta_d = np.max(np.abs(new_density - density))
        density, energy = new_density, new_energy
        if delta_e < 1e-11 and delta_d < 1e-8 and cycle > 1:
            return energy, c, mo_e, (h_core, eri, e_nuc)
    raise RuntimeError(f"SCF did not converge for atoms {atoms}")


def mo_hamiltonian(c, h_core, eri, e_nuc, n_alpha, n_beta):
    h1 = c.T @ h_core @ c
    tmp = np.einsum("mnls,sd->mnld", eri, c)
    tmp = np.einsum("mnld,lc->mncd", tmp, c)
    tmp = np.einsum("mncd,nb->mbcd", tmp, c)
    h2 = np.einsum("mbcd,ma->abcd", tmp, c)
    return FermionicHamiltonian(n_alpha=n_alpha, n_beta=n_beta, e_core=e_nuc, h1=h1, h2=h2)


def water_hamiltonian(angle_deg, length_angstrom):
    geometry = build_geometry(angle_deg, length_angstrom)
    atoms = [
        ("O", geometry.coordinates[0] * ANGSTROM_TO_BOHR),
        ("H", geometry.coordinates[1] * ANGSTROM_TO_BOHR),
        ("H", geometry.coordinates[2] * ANGSTROM_TO_BOHR),
    ]
    energy, c, mo_e, (h_core, eri, e_nuc) = restricted_hartree_fock(atoms, n_electrons=10)
    if not np.all(np.diff(mo_e) > -1e-12):
        raise RuntimeError("molecular orbitals are not energy ordered")
    return energy, mo_hamiltonian(c, h_core, eri, e_nuc, n_alpha=5, n_beta=5)


# -- self-checks ----------------------------------------------------------------


def closed_form_ssss(a, b, c, d, ra, rb, rc, rd):
    """Textbook (ss|ss) for unnormalized s primitives."""
    ra, rb, rc, rd = map(np.asarray, (ra, rb, rc, rd))
    p, q = a + b, c + d
    rp = (a * ra + b * rb) / p
    rq = (c * rc + d * rd) / q
    t = p * q / (p + q) * float((rp - rq) @ (rp - rq))
    prefactor = (
        2.0
        * math.pi**2.5
        / (p * q * math.sqrt(p + q))
        * math.exp(-a * b / p * float((ra - rb) @ (ra - rb)))
        * math.exp(-c * d / q * float((rc - rd) @ (rc - rd)))
    )
    return prefactor * boys(0, t)[0]


def _bare(center, lmn, exponent):
    f = BasisFunction(center, lmn, [exponent], [1.0])
    f.coefficients = np.array([1.0])  # undo primitive normalization
    return f


def run_self_checks():
    print("self-checks:")

    a, b, c, d = 0.61, 1.7, 0.33, 1.1
    ra, rb = [0.0, 0.1, -0.2], [0.8, -0.3, 0.4]
    rc, rd = [-0.5, 0.6, 0.0], [0.2, 0.2, 1.0]
    got = electron_repulsion(
        _bare(ra, (0, 0, 0), a), _bare(rb, (0, 0, 0), b),
        _bare(rc, (0, 0, 0), c), _bare(rd, (0, 0, 0), d),
    )
    want = closed_form_ssss(a, b, c, d, ra, rb, rc, rd)
    assert abs(got - want) < 1e-12, (got, want)
    print(f"  (ss|ss) closed form           ok  ({got:.12f})")

    # p function = d/dAx of s function / (2a): check S, T, V, ERI with one p index
    step = 1e-5
    exponent = 0.73
    center = np.array([0.3, -0.2, 0.5])
    partner = _bare([-0.4, 0.7, 0.1], (0, 0, 0), 1.21)
    atoms = [("H", np.array([0.9, 0.0, -0.3]))]

    def shifted(dx):
        return _bare(center + np.array([dx, 0.0, 0.0]), (0, 0, 0), exponent)

    p_fn = _bare(center, (1, 0, 0), exponent)
    for name, analytic, s_value in (
        ("overlap", overlap(p_fn, partner),
         (overlap(shifted(step), partner) - overlap(shifted(-step), partner)) / (2 * step)),
        ("kinetic", kinetic(p_fn, partner),
         (kinetic(shifted(step), partner) - kinetic(shifted(-step), partner)) / (2 * step)),
        ("nuclear", nuclear_attraction(p_fn, partner, atoms),
         (nuclear_attraction(shifted(step), partner, atoms)
          - nuclear_attraction(shifted(-step), partner, atoms)) / (2 * step)),
        ("eri", electron_repulsion(p_fn, partner, shifted(0.0), partner),
         (electron_repulsion(shifted(step), partner, shifted(0.0), partner)
          - electron_repulsion(shifted(-step), partner, shifted(0.0), partner)) / (2 * step)),
    ):
        derivative = s_value / (2 * exponent)
        assert abs(analytic - derivative) < 1e-8, (name, analytic, derivative)
        print(f"  p-from-s derivative {name:8s}  ok")

    # STO-3G hydrogen atom: one basis function, E = h11
    atoms = [("H", np.array([0.0, 0.0, 0.0]))]
    s_m, t_m, v_m, _ = integral_tensors(atoms)
    e_h = float((t_m + v_m)[0, 0] / s_m[0, 0])
    assert abs(e_h - (-0.46658185)) < 1e-6, e_h
    print(f"  H atom energy                 ok  ({e_h:.8f} Ha)")

    # dissociated H2 full CI -> two hydrogen atoms, through the package
    # pipeline; FCI is basis-invariant, so Lowdin orbitals avoid the SCF
    # convergence pathology of stretched RHF
    bohr = 20.0 * ANGSTROM_TO_BOHR
    atoms = [("H", np.array([0.0, 0.0, 0.0])), ("H", np.array([0.0, 0.0, bohr]))]
    s_m, t_m, v_m, eri = integral_tensors(atoms)
    eigval, eigvec = np.linalg.eigh(s_m)
    lowdin = eigvec @ np.diag(eigval**-0.5) @ eigvec.T
    h = mo_hamiltonian(lowdin, t_m + v_m, eri, nuclear_repulsion(atoms), n_alpha=1, n_beta=1)
    fci = ground_state(jordan_wigner(h), sector=2).ground_energy
    assert abs(fci - 2 * e_h) < 1e-6, (fci, 2 * e_h)
    print(f"  H2 dissociation FCI           ok  ({fci:.8f} Ha)")


# -- fixture generation ----------------------------------------------------------

REFERENCE = (104.5, 0.945)
SCAN_ANGLES = [85.0 + 2.0 * k for k in range(21)]
SCAN_LENGTH = 0.945
GRID_ANGLES = [90.0 + 5.0 * k for k in range(7)]
GRID_LENGTHS = [0.80 + 0.05 * k for k in range(7)]
ACTIVE_SPACE_DIRECTIVES = "# basis: STO-3G\n# freeze: 0 1 2\n# remove: 6\n"


def write_fcidump(path: Path, angle: float, length: float) -> float:
    energy, h = water_hamiltonian(angle, length)
    path.write_text(serialize_fcidump(h, threshold=1e-16))
    return energy


def main():
    parser = argparse.ArgumentParser(description=__doc__ and "Generate water STO-3G fixtures")
    parser.add_argument(
        "--out",
        default=Path(__file__).resolve().parent.parent / "src" / "vqepes" / "data" / "h2o_sto3g",
        type=Path,
    )
    args = parser.parse_args()

    run_self_checks()

    out = args.out
    (out / "scan").mkdir(parents=True, exist_ok=True)
    (out / "grid").mkdir(parents=True, exist_ok=True)

    start = time.time()
    e_ref = write_fcidump(out / "reference.fcidump", *REFERENCE)
    print(f"reference ({REFERENCE[0]} deg, {REFERENCE[1]} A): E_RHF = {e_ref:.8f} Ha")
    assert -75.2 < e_ref < -74.7, e_ref

    lines = [ACTIVE_SPACE_DIRECTIVES.rstrip()]
    for angle in SCAN_ANGLES:
        name = f"scan/a{angle:05.1f}_r{SCAN_LENGTH:.3f}.fcidump"
        energy = write_fcidump(out / name, angle, SCAN_LENGTH)
        lines.append(f"{angle:.1f} {SCAN_LENGTH:.3f} {name}")
        print(f"  scan {angle:5.1f} deg: E_RHF = {energy:.8f}")
    (out / "angle_scan.manifest").write_text("\n".join(lines) + "\n")

    lines = [ACTIVE_SPACE_DIRECTIVES.rstrip()]
    for angle in GRID_ANGLES:
        for length in GRID_LENGTHS:
            name = f"grid/a{angle:05.1f}_r{length:.3f}.fcidump"
            energy = write_fcidump(out / name, angle, length)
            lines.append(f"{angle:.1f} {length:.2f} {name}")
        print(f"  grid row {angle:5.1f} deg done")
    (out / "grid2d.manifest").write_text("\n".join(lines) + "\n")

    print(f"all fixtures written to {out} in {time.time() - start:.1f} s")


if __name__ == "__main__":
    main()
