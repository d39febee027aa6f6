"""Jordan-Wigner mapping of fermionic Hamiltonians to qubit operators.

Spin orbitals are ordered in blocks: alpha orbitals occupy qubits
0..n_spatial-1 and beta orbitals qubits n_spatial..2*n_spatial-1. Mode m maps
to qubit m with a Z parity string on all lower qubits.
"""

from __future__ import annotations

from .chem import FermionicHamiltonian
from .pauli import PauliOperatorSum, PauliTerm, identity_term

INTEGRAL_THRESHOLD = 1e-12
MAX_SPATIAL_ORBITALS = 16


def raising_operator(n_modes: int, mode: int) -> PauliOperatorSum:
    """Creation operator a_mode^dagger = Z...Z (X - iY)/2 I...I."""
    return _mode_operator(n_modes, mode, dagger=True)


def lowering_operator(n_modes: int, mode: int) -> PauliOperatorSum:
    """Annihilation operator a_mode = Z...Z (X + iY)/2 I...I."""
    return _mode_operator(n_modes, mode, dagger=False)


def _mode_operator(n_modes: int, mode: int, dagger: bool) -> PauliOperatorSum:
    if not 0 <= mode < n_modes:
        raise ValueError(f"mode {mode} outside [0, {n_modes})")
    prefix = "Z" * mode
    suffix = "I" * (n_modes - mode - 1)
    y_sign = -0.5j if dagger else 0.5j
    return PauliOperatorSum(
        n_modes,
        [
            PauliTerm(prefix + "X" + suffix, 0.5),
            PauliTerm(prefix + "Y" + suffix, y_sign),
        ],
    )


def jordan_wigner(h: FermionicHamiltonian) -> PauliOperatorSum:
    """Map a second-quantized Hamiltonian to a sum of Pauli terms.

    Assembles
        H = e_core
          + sum_{pq,s} h_pq a+_{ps} a_{qs}
          + 1/2 sum_{pqrs,st} (pq|rs) a+_{ps} a+_{rt} a_{st} a_{qs}
    over blocked spin orbitals, merges like terms, prunes coefficients below
    1e-12 and verifies the surviving coefficients are real (Hermiticity).
    """
    n = h.n_spatial
    if n > MAX_SPATIAL_ORBITALS:
        raise ValueError(f"{n} spatial orbitals exceed the supported maximum {MAX_SPATIAL_ORBITALS}")
    n_modes = 2 * n

    raise_ = [raising_operator(n_modes, m) for m in range(n_modes)]
    lower = [lowering_operator(n_modes, m) for m in range(n_modes)]

    total = PauliOperatorSum(n_modes)
    if abs(h.e_core) > 0.0:
        total.add(identity_term(n_modes, h.e_core))

    for p in range(n):
        for q in range(n):
            coeff = h.h1[p, q]
            if abs(coeff) < INTEGRAL_THRESHOLD:
                continue
            for spin in (0, 1):
                total.accumulate(raise_[p + spin * n] @ lower[q + spin * n], coeff)

    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    coeff = 0.5 * h.h2[p, q, r, s]
                    if abs(coeff) < INTEGRAL_THRESHOLD:
                        continue
                    for sigma in (0, 1):
                        for tau in (0, 1):
                            op = (
                                raise_[p + sigma * n]
                                @ raise_[r + tau * n]
                                @ lower[s + tau * n]
                                @ lower[q + sigma * n]
                            )
                            total.accumulate(op, coeff)

    return total.realified(tol=1e-10)


def total_number_operator(n_qubits: int) -> PauliOperatorSum:
    """Particle-number operator sum_p (I - Z_p)/2."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    op = PauliOperatorSum(n_qubits)
    op.add(identity_term(n_qubits, 0.5 * n_qubits))
    for q in range(n_qubits):
        axes = "I" * q + "Z" + "I" * (n_qubits - q - 1)
        op.add(PauliTerm(axes, -0.5))
    return op
