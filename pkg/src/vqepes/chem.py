"""Molecular Hamiltonian ingestion: FCIDUMP files, active spaces, geometries.

Energies are in Hartree, lengths in Angstrom, angles in degrees throughout.
Two-electron integrals use chemists' notation (pq|rs); files are 1-based,
everything in memory is 0-based.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable

import numpy as np

SYMMETRY_TOL = 1e-10


class FcidumpError(ValueError):
    """Malformed, inconsistent, or out-of-range FCIDUMP content."""


@dataclass(frozen=True)
class FermionicHamiltonian:
    """Second-quantized electronic Hamiltonian over spatial orbitals.

    h1[p, q] is the one-body integral h_pq, h2[p, q, r, s] the chemists'
    two-body integral (pq|rs); both carry their full permutational symmetry.
    """

    n_alpha: int
    n_beta: int
    e_core: float
    h1: np.ndarray
    h2: np.ndarray

    def __post_init__(self):
        h1 = np.asarray(self.h1, dtype=float)
        h2 = np.asarray(self.h2, dtype=float)
        n = h1.shape[0]
        if h1.shape != (n, n) or h2.shape != (n, n, n, n):
            raise ValueError("h1 must be (n,n) and h2 (n,n,n,n) over the same n")
        if not np.allclose(h1, h1.T, atol=SYMMETRY_TOL, rtol=0.0):
            raise ValueError("h1 is not symmetric within 1e-10")
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if not np.allclose(h2, h2.transpose(perm), atol=SYMMETRY_TOL, rtol=0.0):
                raise ValueError("h2 violates 8-fold permutational symmetry")
        if self.n_alpha < 0 or self.n_beta < 0:
            raise ValueError("electron counts must be non-negative")
        if self.n_alpha + self.n_beta > 2 * n:
            raise ValueError(
                f"{self.n_alpha + self.n_beta} electrons do not fit in {n} spatial orbitals"
            )
        h1.setflags(write=False)
        h2.setflags(write=False)
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "h2", h2)

    @property
    def n_spatial(self) -> int:
        return self.h1.shape[0]

    @property
    def n_electrons(self) -> int:
        return self.n_alpha + self.n_beta

    def occupied_orbitals(self) -> tuple[list[int], list[int]]:
        """Aufbau HF filling: lowest orbitals by index, per spin."""
        return list(range(self.n_alpha)), list(range(self.n_beta))


@dataclass(frozen=True)
class ActiveSpaceSpec:
    """Frozen (doubly occupied) and removed (unoccupied) spatial orbitals."""

    frozen: tuple[int, ...] = ()
    removed: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "frozen", tuple(self.frozen))
        object.__setattr__(self, "removed", tuple(self.removed))
        if len(set(self.frozen)) != len(self.frozen) or len(set(self.removed)) != len(self.removed):
            raise ValueError("frozen/removed lists must not contain duplicates")
        if set(self.frozen) & set(self.removed):
            raise ValueError("an orbital cannot be both frozen and removed")
        if any(i < 0 for i in self.frozen + self.removed):
            raise ValueError("orbital indices must be non-negative")


# Default 6-qubit active space for the bundled water fixtures: freezing the
# three lowest orbitals and dropping the highest leaves 4 electrons in
# 3 spatial orbitals.
DEFAULT_WATER_ACTIVE_SPACE = ActiveSpaceSpec(frozen=(0, 1, 2), removed=(6,))


@dataclass(frozen=True)
class Geometry:
    """Water-like triatomic: central atom at the origin, two equal bonds."""

    bond_angle: float
    bond_length: float
    coordinates: np.ndarray  # rows: O, H1, H2

    def __post_init__(self):
        coords = np.asarray(self.coordinates, dtype=float)
        coords.setflags(write=False)
        object.__setattr__(self, "coordinates", coords)


def build_geometry(bond_angle: float, bond_length: float) -> Geometry:
    """Place O at the origin and the two H atoms symmetrically in the xy plane."""
    if not 0.0 < bond_angle < 180.0:
        raise ValueError(f"bond angle must lie in (0, 180) degrees, got {bond_angle}")
    if bond_length <= 0.0:
        raise ValueError(f"bond length must be positive, got {bond_length}")
    half = math.radians(bond_angle) / 2.0
    x, y = bond_length * math.sin(half), bond_length * math.cos(half)
    coords = np.array([[0.0, 0.0, 0.0], [x, y, 0.0], [-x, y, 0.0]])
    return Geometry(bond_angle=bond_angle, bond_length=bond_length, coordinates=coords)


# --------------------------------------------------------------------------
# FCIDUMP
# --------------------------------------------------------------------------

_HEADER_KEY = re.compile(r"([A-Za-z0-9]+)\s*=\s*([^,=]*)")


def _read_lines(source: str | IO[str]) -> list[str]:
    if isinstance(source, str):
        return source.splitlines()
    return source.read().splitlines()


def parse_fcidump(source: str | IO[str]) -> FermionicHamiltonian:
    """Parse FCIDUMP text into a FermionicHamiltonian.

    The header namelist must provide NORB, NELEC and MS2 and end with `&END`
    or `/`. Integral records are `value i j k l` with 1-based indices; all
    index permutations implied by the 8-fold symmetry are filled in.
    ORBSYM/ISYM entries are accepted and ignored.
    """
    lines = _read_lines(source)

    header_end = None
    header_text: list[str] = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if lineno == 1:
            if not stripped.upper().startswith("&FCI"):
                raise FcidumpError(f"line 1: expected header starting with '&FCI', got {stripped!r}")
            stripped = stripped[4:]
        if "&END" in stripped.upper():
            header_text.append(stripped[: stripped.upper().index("&END")])
            header_end = lineno
            break
        if stripped.endswith("/") or stripped == "/":
            header_text.append(stripped.rstrip("/"))
            header_end = lineno
            break
        header_text.append(stripped)
    if header_end is None:
        raise FcidumpError("header is not terminated by '&END' or '/'")

    keys: dict[str, str] = {}
    for key, value in _HEADER_KEY.findall(" ".join(header_text)):
        keys[key.upper()] = value.strip()

    def header_int(name: str) -> int:
        if name not in keys:
            raise FcidumpError(f"line 1: header is missing {name}")
        try:
            return int(keys[name])
        except ValueError:
            raise FcidumpError(f"line 1: header field {name}={keys[name]!r} is not an integer") from None

    norb = header_int("NORB")
    nelec = header_int("NELEC")
    ms2 = header_int("MS2")
    if norb < 1:
        raise FcidumpError(f"line 1: NORB must be >= 1, got {norb}")
    if (nelec + ms2) % 2 != 0 or nelec < abs(ms2):
        raise FcidumpError(f"line 1: NELEC={nelec}, MS2={ms2} do not define valid spin counts")
    n_alpha = (nelec + ms2) // 2
    n_beta = (nelec - ms2) // 2

    e_core = 0.0
    e_core_set = False
    h1 = np.zeros((norb, norb))
    h1_set = np.zeros((norb, norb), dtype=bool)
    h2 = np.zeros((norb, norb, norb, norb))
    h2_set = np.zeros((norb, norb, norb, norb), dtype=bool)

    def place_h1(i: int, j: int, value: float, lineno: int) -> None:
        for a, b in ((i, j), (j, i)):
            if h1_set[a, b] and abs(h1[a, b] - value) > SYMMETRY_TOL:
                raise FcidumpError(
                    f"line {lineno}: one-body entry ({a + 1},{b + 1}) conflicts with an "
                    f"earlier value ({h1[a, b]!r} vs {value!r})"
                )
            h1[a, b] = value
            h1_set[a, b] = True

    def place_h2(i: int, j: int, k: int, l: int, value: float, lineno: int) -> None:
        images = {
            (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
            (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
        }
        for idx in images:
            if h2_set[idx] and abs(h2[idx] - value) > SYMMETRY_TOL:
                raise FcidumpError(
                    f"line {lineno}: two-body entry {tuple(x + 1 for x in idx)} conflicts "
                    f"with an earlier value ({h2[idx]!r} vs {value!r})"
                )
            h2[idx] = value
            h2_set[idx] = True

    for lineno, line in enumerate(lines[header_end:], start=header_end + 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) != 5:
            raise FcidumpError(f"line {lineno}: expected 'value i j k l', got {stripped!r}")
        try:
            value = float(tokens[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(t) for t in tokens[1:])
        except ValueError:
            raise FcidumpError(f"line {lineno}: cannot parse record {stripped!r}") from None
        for idx in (i, j, k, l):
            if idx < 0 or idx > norb:
                raise FcidumpError(f"line {lineno}: orbital index {idx} outside [1, {norb}]")
        if i == j == k == l == 0:
            if e_core_set and abs(e_core - value) > SYMMETRY_TOL:
                raise FcidumpError(f"line {lineno}: conflicting core energy entries")
            e_core = value
            e_core_set = True
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise FcidumpError(f"line {lineno}: malformed one-body record {stripped!r}")
            place_h1(i - 1, j - 1, value, lineno)
        else:
            if 0 in (i, j, k, l):
                raise FcidumpError(f"line {lineno}: malformed two-body record {stripped!r}")
            place_h2(i - 1, j - 1, k - 1, l - 1, value, lineno)

    try:
        return FermionicHamiltonian(n_alpha=n_alpha, n_beta=n_beta, e_core=e_core, h1=h1, h2=h2)
    except ValueError as exc:
        raise FcidumpError(str(exc)) from None


def serialize_fcidump(h: FermionicHamiltonian, threshold: float = 0.0) -> str:
    """Render a Hamiltonian back to FCIDUMP text (canonical unique entries only)."""
    n = h.n_spatial
    out = [f" &FCI NORB={n},NELEC={h.n_electrons},MS2={h.n_alpha - h.n_beta},", " &END"]

    def rec(value: float, i: int, j: int, k: int, l: int) -> str:
        return f" {value:.16E} {i:3d} {j:3d} {k:3d} {l:3d}"

    pair = lambda a, b: a * (a + 1) // 2 + b  # a >= b
    for i in range(n):
        for j in range(i + 1):
            for k in range(i + 1):
                for l in range(k + 1):
                    if pair(i, j) < pair(k, l):
                        continue
                    v = h.h2[i, j, k, l]
                    if abs(v) > threshold:
                        out.append(rec(v, i + 1, j + 1, k + 1, l + 1))
    for i in range(n):
        for j in range(i + 1):
            v = h.h1[i, j]
            if abs(v) > threshold:
                out.append(rec(v, i + 1, j + 1, 0, 0))
    out.append(rec(h.e_core, 0, 0, 0, 0))
    return "\n".join(out) + "\n"


def reduce_active_space(h: FermionicHamiltonian, spec: ActiveSpaceSpec) -> FermionicHamiltonian:
    """Fold frozen orbitals into the core and drop removed virtuals.

    The frozen-core shift is
        e_core' = e_core + sum_i 2 h_ii + sum_ij (2 (ii|jj) - (ij|ji))
    and the active one-body integrals pick up the mean field of the frozen
    shell, h'_pq = h_pq + sum_i (2 (pq|ii) - (pi|iq)), with i, j running over
    frozen orbitals.
    """
    n = h.n_spatial
    frozen = sorted(spec.frozen)
    removed = sorted(spec.removed)
    if any(i >= n for i in frozen + removed):
        raise ValueError(f"active-space indices must be < {n}")

    occ_alpha, occ_beta = h.occupied_orbitals()
    doubly = set(occ_alpha) & set(occ_beta)
    occupied = set(occ_alpha) | set(occ_beta)
    for i in frozen:
        if i not in doubly:
            raise ValueError(f"frozen orbital {i} is not doubly occupied in the HF filling")
    for i in removed:
        if i in occupied:
            raise ValueError(f"removed orbital {i} is occupied in the HF filling")

    active = [p for p in range(n) if p not in frozen and p not in removed]
    n_alpha = h.n_alpha - len(frozen)
    n_beta = h.n_beta - len(frozen)
    if n_alpha + n_beta > 2 * len(active):
        raise ValueError(
            f"{n_alpha + n_beta} active electrons exceed capacity of {len(active)} orbitals"
        )
    if not active:
        raise ValueError("active space is empty")

    e_core = h.e_core
    for i in frozen:
        e_core += 2.0 * h.h1[i, i]
        for j in frozen:
            e_core += 2.0 * h.h2[i, i, j, j] - h.h2[i, j, j, i]

    idx = np.asarray(active)
    h1 = h.h1[np.ix_(idx, idx)].copy()
    for a, p in enumerate(active):
        for b, q in enumerate(active):
            for i in frozen:
                h1[a, b] += 2.0 * h.h2[p, q, i, i] - h.h2[p, i, i, q]
    h2 = h.h2[np.ix_(idx, idx, idx, idx)].copy()

    return FermionicHamiltonian(n_alpha=n_alpha, n_beta=n_beta, e_core=e_core, h1=h1, h2=h2)


# --------------------------------------------------------------------------
# Scan manifests
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ManifestEntry:
    geometry: Geometry
    path: Path


@dataclass(frozen=True)
class ManifestMetadata:
    basis: str | None = None
    frozen: tuple[int, ...] | None = None
    removed: tuple[int, ...] | None = None

    def active_space(self) -> ActiveSpaceSpec | None:
        if self.frozen is None and self.removed is None:
            return None
        return ActiveSpaceSpec(frozen=self.frozen or (), removed=self.removed or ())


@dataclass(frozen=True)
class ScanManifest:
    entries: tuple[ManifestEntry, ...]
    metadata: ManifestMetadata = field(default_factory=ManifestMetadata)


def _parse_directive(comment: str, meta: dict) -> None:
    body = comment.lstrip("#").strip()
    if ":" not in body:
        return
    key, _, value = body.partition(":")
    key = key.strip().lower()
    value = value.strip()
    if key == "basis":
        meta["basis"] = value
    elif key in ("freeze", "frozen"):
        meta["frozen"] = tuple(int(t) for t in value.split()) if value else ()
    elif key in ("remove", "removed"):
        meta["removed"] = tuple(int(t) for t in value.split()) if value else ()


def load_manifest(source: str | IO[str], base_dir: str | Path = ".") -> ScanManifest:
    """Parse a scan manifest: one `<angle_deg> <length_angstrom> <path>` per line.

    `#` starts a comment; comments of the form `# basis: ...`, `# freeze: ...`
    and `# remove: ...` populate the manifest metadata. Relative paths are
    resolved against base_dir. Every referenced FCIDUMP must exist and parse.
    """
    base = Path(base_dir)
    meta: dict = {}
    entries: list[ManifestEntry] = []
    seen_geoms: set[tuple[float, float]] = set()
    seen_paths: set[Path] = set()

    for lineno, line in enumerate(_read_lines(source), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            _parse_directive(stripped, meta)
            continue
        parts = stripped.split(maxsplit=2)
        if len(parts) != 3:
            raise ValueError(f"manifest line {lineno}: expected '<angle> <length> <path>'")
        try:
            angle, length = float(parts[0]), float(parts[1])
        except ValueError:
            raise ValueError(f"manifest line {lineno}: cannot parse geometry numbers") from None
        geometry = build_geometry(angle, length)
        raw = Path(parts[2])
        path = raw if raw.is_absolute() else base / raw
        if (angle, length) in seen_geoms:
            raise ValueError(f"manifest line {lineno}: duplicate geometry ({angle}, {length})")
        if path in seen_paths:
            raise ValueError(f"manifest line {lineno}: duplicate path {path}")
        if not path.is_file():
            raise FileNotFoundError(f"manifest line {lineno}: no such FCIDUMP file: {path}")
        with open(path) as fh:
            try:
                parse_fcidump(fh)
            except FcidumpError as exc:
                raise FcidumpError(f"{path}: {exc}") from None
        seen_geoms.add((angle, length))
        seen_paths.add(path)
        entries.append(ManifestEntry(geometry=geometry, path=path))

    if not entries:
        raise ValueError("manifest contains no scan entries")
    return ScanManifest(entries=tuple(entries), metadata=ManifestMetadata(**meta))


def load_manifest_file(path: str | Path) -> ScanManifest:
    path = Path(path)
    with open(path) as fh:
        return load_manifest(fh, base_dir=path.parent)
