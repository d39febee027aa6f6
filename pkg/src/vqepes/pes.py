"""Potential-energy-surface scans, inverse-power surface fits, and their minima.

The surface model is linear in the basis {1} U {x^-p} U {y^-p} for
p in {2, 3, 4, 4.5}, with x the bond angle in degrees and y the bond length
in Angstrom. Being additive in x and y, it is minimized axis by axis.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .ansatz import DEFAULT_LAYERS, HFReference, build_ansatz
from .chem import ActiveSpaceSpec, Geometry, ManifestEntry, ScanManifest, parse_fcidump, reduce_active_space
from .exact import ground_state
from .jordan_wigner import jordan_wigner
from .spsa import SPSAConfig
from .vqe import ProbabilityDiagnostics, vqe_energy

INVERSE_POWERS = (2.0, 3.0, 4.0, 4.5)
GRID_POINTS = 1000
GOLDEN_TOL = 1e-6
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class PESRecord:
    geometry: Geometry
    vqe_energy: float
    exact_energy: float
    diagnostics: ProbabilityDiagnostics

    @property
    def delta(self) -> float:
        return abs(self.vqe_energy - self.exact_energy)


@dataclass(frozen=True)
class ScanFailure:
    geometry: Geometry
    path: Path
    message: str


@dataclass(frozen=True)
class ScanResult:
    records: tuple[PESRecord, ...]
    failures: tuple[ScanFailure, ...] = ()


class ScanError(RuntimeError):
    """A scan entry failed; the message names the offending geometry."""


@dataclass(frozen=True)
class SurfaceFit:
    intercept: float
    angle_coefficients: np.ndarray  # weights of angle^-p, p in INVERSE_POWERS
    length_coefficients: np.ndarray
    residual_rms: float
    angle_span: tuple[float, float]
    length_span: tuple[float, float]

    def predict(self, angle, length):
        value = self.intercept
        for p, a, b in zip(INVERSE_POWERS, self.angle_coefficients, self.length_coefficients):
            value = value + a * np.asarray(angle, dtype=float) ** -p
            value = value + b * np.asarray(length, dtype=float) ** -p
        return value

    def angle_section(self, angle):
        value = 0.0
        for p, a in zip(INVERSE_POWERS, self.angle_coefficients):
            value = value + a * np.asarray(angle, dtype=float) ** -p
        return value

    def length_section(self, length):
        value = 0.0
        for p, b in zip(INVERSE_POWERS, self.length_coefficients):
            value = value + b * np.asarray(length, dtype=float) ** -p
        return value


@dataclass(frozen=True)
class SurfaceMinimum:
    angle_star: float
    length_star: float
    energy_star: float
    angle_on_boundary: bool
    length_on_boundary: bool


# --------------------------------------------------------------------------
# Scanning
# --------------------------------------------------------------------------


def scan_entry(
    entry: ManifestEntry,
    spec: ActiveSpaceSpec,
    warm_params: np.ndarray,
    config: SPSAConfig,
    layers: int = DEFAULT_LAYERS,
    sector: int | None = None,
    shots: int | None = None,
) -> PESRecord:
    """Full pipeline for one geometry: parse, reduce, map, diagonalize, VQE."""
    with open(entry.path) as fh:
        hamiltonian = parse_fcidump(fh)
    active = reduce_active_space(hamiltonian, spec)
    qubit_h = jordan_wigner(active)
    exact = ground_state(qubit_h, sector=sector)

    hf = HFReference.from_counts(active.n_spatial, active.n_alpha, active.n_beta)
    circuit = build_ansatz(qubit_h.n_qubits, layers, hf)
    warm_params = np.asarray(warm_params, dtype=float)
    if warm_params.shape != (circuit.n_params,):
        raise ValueError(
            f"warm-start parameters have length {warm_params.size}, ansatz needs {circuit.n_params}"
        )
    run = vqe_energy(qubit_h, circuit, warm_params, config, shots=shots)
    return PESRecord(
        geometry=entry.geometry,
        vqe_energy=run.energy,
        exact_energy=exact.ground_energy,
        diagnostics=run.diagnostics,
    )


def _scan_one(args) -> PESRecord:
    return scan_entry(*args)


def scan(
    manifest: ScanManifest,
    spec: ActiveSpaceSpec,
    warm_params: np.ndarray,
    config: SPSAConfig,
    layers: int = DEFAULT_LAYERS,
    sector: int | None = None,
    shots: int | None = None,
    keep_going: bool = False,
    jobs: int = 1,
) -> ScanResult:
    """Run the pipeline over every manifest entry, in manifest order.

    Entry i uses SPSA seed config.seed + i. By default the first failure
    aborts with the geometry named; with keep_going failures are collected
    and the remaining entries still run. jobs > 1 distributes entries over
    processes; output order never depends on scheduling.
    """
    tasks = [
        (entry, spec, warm_params, replace(config, seed=config.seed + i), layers, sector, shots)
        for i, entry in enumerate(manifest.entries)
    ]
    records: list[PESRecord | None] = [None] * len(tasks)
    failures: list[ScanFailure] = []

    def handle(i: int, outcome, error: Exception | None):
        entry = manifest.entries[i]
        if error is None:
            records[i] = outcome
            return
        message = (
            f"scan entry {i} at angle={entry.geometry.bond_angle} deg, "
            f"length={entry.geometry.bond_length} A ({entry.path}): {error}"
        )
        if not keep_going:
            raise ScanError(message) from error
        failures.append(ScanFailure(entry.geometry, entry.path, str(error)))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_scan_one, task) for task in tasks]
            for i, future in enumerate(futures):
                try:
                    handle(i, future.result(), None)
                except ScanError:
                    raise
                except Exception as exc:  # noqa: BLE001 - worker errors become failures
                    handle(i, None, exc)
    else:
        for i, task in enumerate(tasks):
            try:
                handle(i, _scan_one(task), None)
            except ScanError:
                raise
            except Exception as exc:  # noqa: BLE001
                handle(i, None, exc)

    return ScanResult(
        records=tuple(r for r in records if r is not None),
        failures=tuple(failures),
    )


# --------------------------------------------------------------------------
# Surface fitting
# --------------------------------------------------------------------------


def fit_surface(points: Sequence[tuple[float, float, float]]) -> SurfaceFit:
    """Ordinary least squares of energies onto the inverse-power basis.

    Requires at least 10 points with at least 3 distinct angles and lengths.
    Columns are normalized before solving (the basis spans nine orders of
    magnitude on chemistry-scale inputs) and the solution is obtained from
    an SVD-based least-squares factorization.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError("points must be (angle, length, energy) triples")
    if pts.shape[0] < 10:
        raise ValueError(f"need at least 10 points to fit, got {pts.shape[0]}")
    x, y, energy = pts[:, 0], pts[:, 1], pts[:, 2]
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise ValueError("angles and lengths must be positive")
    if np.unique(x).size < 3 or np.unique(y).size < 3:
        raise ValueError("need at least 3 distinct angles and 3 distinct lengths")

    columns = [np.ones_like(x)]
    names = ["1"]
    for p in INVERSE_POWERS:
        columns.append(x**-p)
        names.append(f"angle^-{p:g}")
    for p in INVERSE_POWERS:
        columns.append(y**-p)
        names.append(f"length^-{p:g}")
    design = np.column_stack(columns)

    scale = np.linalg.norm(design, axis=0)
    scaled = design / scale
    singular = np.linalg.svd(scaled, compute_uv=False)
    if singular[-1] < 1e-10 * singular[0]:
        _, _, vt = np.linalg.svd(scaled)
        worst = np.argsort(-np.abs(vt[-1]))[:3]
        deficient = ", ".join(names[i] for i in worst)
        raise ValueError(f"design matrix is rank deficient; near-dependent directions: {deficient}")

    solution, _, _, _ = np.linalg.lstsq(scaled, energy, rcond=None)
    coeffs = solution / scale
    residuals = energy - design @ coeffs
    return SurfaceFit(
        intercept=float(coeffs[0]),
        angle_coefficients=coeffs[1:5].copy(),
        length_coefficients=coeffs[5:9].copy(),
        residual_rms=float(np.sqrt(np.mean(residuals**2))),
        angle_span=(float(x.min()), float(x.max())),
        length_span=(float(y.min()), float(y.max())),
    )


def _golden_section(f, lo: float, hi: float, tol: float = GOLDEN_TOL) -> float:
    """Golden-section refinement of a bracketed minimum."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _minimize_section(f, lo: float, hi: float) -> tuple[float, bool]:
    """Dense grid bracketing followed by golden-section refinement."""
    if not 0.0 < lo < hi:
        raise ValueError(f"range [{lo}, {hi}] must be positive and increasing")
    grid = np.linspace(lo, hi, GRID_POINTS)
    values = f(grid)
    i = int(np.argmin(values))
    left = grid[max(i - 1, 0)]
    right = grid[min(i + 1, GRID_POINTS - 1)]
    best = _golden_section(f, left, right)
    on_boundary = best - lo < GOLDEN_TOL or hi - best < GOLDEN_TOL
    return best, on_boundary


def minimize_surface(
    fit: SurfaceFit,
    angle_range: tuple[float, float] | None = None,
    length_range: tuple[float, float] | None = None,
) -> SurfaceMinimum:
    """Locate the model minimum; the model is additive, so each axis is 1D.

    Ranges default to the fitted data's span and must stay inside it. A
    minimum landing on a range edge is flagged, not an error.
    """
    hull_eps = 1e-9
    if angle_range is None:
        angle_range = fit.angle_span
    if length_range is None:
        length_range = fit.length_span
    if angle_range[0] < fit.angle_span[0] - hull_eps or angle_range[1] > fit.angle_span[1] + hull_eps:
        raise ValueError(f"angle range {angle_range} outside fitted span {fit.angle_span}")
    if length_range[0] < fit.length_span[0] - hull_eps or length_range[1] > fit.length_span[1] + hull_eps:
        raise ValueError(f"length range {length_range} outside fitted span {fit.length_span}")

    angle_star, angle_edge = _minimize_section(fit.angle_section, *angle_range)
    length_star, length_edge = _minimize_section(fit.length_section, *length_range)
    return SurfaceMinimum(
        angle_star=angle_star,
        length_star=length_star,
        energy_star=float(fit.predict(angle_star, length_star)),
        angle_on_boundary=angle_edge,
        length_on_boundary=length_edge,
    )


# --------------------------------------------------------------------------
# Output files
# --------------------------------------------------------------------------

CSV_HEADER = "angle_deg,length_angstrom,vqe_energy,exact_energy,delta,top_prob,gap"


def _g12(value: float) -> float:
    """Round through 12 significant digits for byte-stable emitted floats."""
    return float(f"{value:.12g}")


def records_to_csv(records: Sequence[PESRecord]) -> str:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            f"{r.geometry.bond_angle:.12g},{r.geometry.bond_length:.12g},"
            f"{r.vqe_energy:.12g},{r.exact_energy:.12g},{r.delta:.12g},"
            f"{r.diagnostics.top_probability:.12g},{r.diagnostics.gap:.12g}"
        )
    return "\n".join(lines) + "\n"


def fit_to_dict(fit: SurfaceFit) -> dict:
    return {
        "intercept": _g12(fit.intercept),
        "angle_coefficients": {
            f"{p:g}": _g12(c) for p, c in zip(INVERSE_POWERS, fit.angle_coefficients)
        },
        "length_coefficients": {
            f"{p:g}": _g12(c) for p, c in zip(INVERSE_POWERS, fit.length_coefficients)
        },
        "residual_rms": _g12(fit.residual_rms),
        "angle_span": [_g12(v) for v in fit.angle_span],
        "length_span": [_g12(v) for v in fit.length_span],
    }


def minimum_to_dict(minimum: SurfaceMinimum) -> dict:
    return {
        "angle_star": _g12(minimum.angle_star),
        "length_star": _g12(minimum.length_star),
        "energy_star": _g12(minimum.energy_star),
        "angle_on_boundary": minimum.angle_on_boundary,
        "length_on_boundary": minimum.length_on_boundary,
    }


def emit_pes(
    records: Sequence[PESRecord],
    fit: SurfaceFit | None,
    prefix: str | Path,
    minimum: SurfaceMinimum | None = None,
) -> tuple[Path, Path]:
    """Write <prefix>.csv and <prefix>.json; byte-stable for equal inputs."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    csv_path = prefix.with_suffix(".csv")
    json_path = prefix.with_suffix(".json")
    csv_path.write_text(records_to_csv(records))
    payload = {
        "n_records": len(records),
        "records": [
            {
                "angle_deg": _g12(r.geometry.bond_angle),
                "length_angstrom": _g12(r.geometry.bond_length),
                "vqe_energy": _g12(r.vqe_energy),
                "exact_energy": _g12(r.exact_energy),
                "delta": _g12(r.delta),
            }
            for r in records
        ],
        "fit": fit_to_dict(fit) if fit is not None else None,
        "minimum": minimum_to_dict(minimum) if minimum is not None else None,
    }
    json_path.write_text(json.dumps(payload, indent=2) + "\n")
    return csv_path, json_path
