"""Command-line interface: ed, vqe, warmstart, scan, and fit subcommands.

Every numerical output is reproducible from the inputs and the seed alone;
the default seed is the documented constant DEFAULT_SEED. A config file
(`key = value` per line, keys matching the long flag names) supplies
defaults; explicit flags win over the file, the file wins over built-ins.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .ansatz import DEFAULT_LAYERS, HFReference, build_ansatz
from .chem import ActiveSpaceSpec, load_manifest_file, parse_fcidump, reduce_active_space
from .exact import ground_state
from .jordan_wigner import jordan_wigner
from .pes import emit_pes, fit_surface, fit_to_dict, minimize_surface, minimum_to_dict, scan
from .rng import SplitMix64
from .spsa import SPSAConfig, trace_summary, trace_to_csv
from .vqe import run_record, vqe_energy, warm_start_csv, warm_start_json, warm_start_search

DEFAULT_SEED = 20210914  # fixed so repeated runs are byte-identical by default

# SPSA gains used for the bundled water pipeline; chosen empirically, echoed
# in every output file. a=None means first-step calibration.
WATER_SPSA = {"a": None, "c": 0.1, "A": None, "alpha": 0.602, "gamma": 0.101}


def _spsa_config(args) -> SPSAConfig:
    return SPSAConfig(
        max_iter=args.maxiter,
        a=args.spsa_a,
        c=args.spsa_c,
        A=args.spsa_big_a,
        alpha=args.spsa_alpha,
        gamma=args.spsa_gamma,
        seed=args.seed,
    )


def _active_space(args, manifest=None) -> ActiveSpaceSpec:
    if args.freeze is not None or args.remove is not None:
        return ActiveSpaceSpec(frozen=tuple(args.freeze or ()), removed=tuple(args.remove or ()))
    if manifest is not None:
        from_manifest = manifest.metadata.active_space()
        if from_manifest is not None:
            return from_manifest
    return ActiveSpaceSpec()


def _qubit_hamiltonian(path: str, spec: ActiveSpaceSpec):
    with open(path) as fh:
        hamiltonian = parse_fcidump(fh)
    active = reduce_active_space(hamiltonian, spec)
    return active, jordan_wigner(active)


def _circuit_for(active, layers: int):
    hf = HFReference.from_counts(active.n_spatial, active.n_alpha, active.n_beta)
    return build_ansatz(2 * active.n_spatial, layers, hf)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    print(f"wrote {path}")


def cmd_ed(args) -> int:
    spec = _active_space(args)
    _, qubit_h = _qubit_hamiltonian(args.fcidump, spec)
    result = ground_state(qubit_h, sector=args.sector)
    print(f"{result.ground_energy:.12g}")
    return 0


def cmd_vqe(args) -> int:
    spec = _active_space(args)
    active, qubit_h = _qubit_hamiltonian(args.fcidump, spec)
    circuit = _circuit_for(active, args.layers)
    config = _spsa_config(args)
    if args.x0 == "zero":
        x0 = np.zeros(circuit.n_params)
    else:
        x0 = SplitMix64(config.seed).uniforms(circuit.n_params, -math.pi, math.pi)
    run = vqe_energy(qubit_h, circuit, x0, config, shots=args.shots)
    print(f"{run.energy:.12g}")
    if args.out:
        prefix = Path(args.out)
        _write(prefix.with_suffix(".trace.csv"), trace_to_csv(run.trace))
        payload = {"run": run_record(run), "spsa": trace_summary(run.trace, config)["config"]}
        _write(prefix.with_suffix(".json"), json.dumps(payload, indent=2) + "\n")
    return 0


def cmd_warmstart(args) -> int:
    spec = _active_space(args)
    active, qubit_h = _qubit_hamiltonian(args.fcidump, spec)
    circuit = _circuit_for(active, args.layers)
    config = _spsa_config(args)
    reference = ground_state(qubit_h, sector=args.sector).ground_energy
    result = warm_start_search(qubit_h, circuit, args.restarts, config, reference,
                               shots=args.shots)
    print(
        f"best run {result.best_run_index}: E = {result.runs[result.best_run_index].energy:.12g}, "
        f"|E - E_ed| = {result.best_delta:.12g}"
    )
    prefix = Path(args.out)
    best = {
        "layers": args.layers,
        "n_params": circuit.n_params,
        "params": [float(v) for v in result.best_params],
        "energy": result.runs[result.best_run_index].energy,
        "reference_energy": result.reference_energy,
        "delta": result.best_delta,
        "seed": args.seed,
        "frozen": list(spec.frozen),
        "removed": list(spec.removed),
    }
    _write(prefix.with_suffix(".params.json"), json.dumps(best, indent=2) + "\n")
    _write(prefix.with_suffix(".runs.csv"), warm_start_csv(result))
    _write(prefix.with_suffix(".runs.json"), warm_start_json(result, config))
    return 0


def cmd_scan(args) -> int:
    manifest = load_manifest_file(args.manifest)
    spec = _active_space(args, manifest)
    params_payload = json.loads(Path(args.params).read_text())
    warm_params = np.asarray(params_payload["params"], dtype=float)
    layers = args.layers if args.layers is not None else int(params_payload.get("layers", DEFAULT_LAYERS))
    config = _spsa_config(args)
    result = scan(
        manifest,
        spec,
        warm_params,
        config,
        layers=layers,
        sector=args.sector,
        shots=args.shots,
        keep_going=args.keep_going,
        jobs=args.jobs,
    )
    emit_pes(result.records, None, Path(args.out))
    print(f"scanned {len(result.records)} geometries")
    for failure in result.failures:
        print(
            f"error: scan failed at angle={failure.geometry.bond_angle} "
            f"length={failure.geometry.bond_length}: {failure.message}",
            file=sys.stderr,
        )
    return 1 if result.failures else 0


def cmd_fit(args) -> int:
    rows = Path(args.pes).read_text().splitlines()
    header = rows[0].split(",")
    column = {"exact": "exact_energy", "vqe": "vqe_energy"}[args.column]
    angle_i, length_i = header.index("angle_deg"), header.index("length_angstrom")
    energy_i = header.index(column)
    points = []
    for row in rows[1:]:
        if not row.strip():
            continue
        cells = row.split(",")
        points.append((float(cells[angle_i]), float(cells[length_i]), float(cells[energy_i])))
    fit = fit_surface(points)
    angle_range = tuple(args.angle_range) if args.angle_range else None
    length_range = tuple(args.length_range) if args.length_range else None
    minimum = minimize_surface(fit, angle_range, length_range)
    payload = {"column": column, "fit": fit_to_dict(fit), "minimum": minimum_to_dict(minimum)}
    _write(Path(args.out).with_suffix(".fit.json"), json.dumps(payload, indent=2) + "\n")
    print(
        f"minimum at angle = {minimum.angle_star:.12g} deg, "
        f"length = {minimum.length_star:.12g} A, E = {minimum.energy_star:.12g}"
    )
    return 0


def _add_spsa_flags(parser):
    parser.add_argument("--maxiter", type=int, default=300, help="SPSA iteration count")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="master seed")
    parser.add_argument("--spsa-a", type=float, default=WATER_SPSA["a"],
                        help="learning-rate scale (default: calibrated)")
    parser.add_argument("--spsa-c", type=float, default=WATER_SPSA["c"],
                        help="perturbation scale")
    parser.add_argument("--spsa-big-a", type=float, default=WATER_SPSA["A"],
                        help="stability constant (default: 0.1*maxiter)")
    parser.add_argument("--spsa-alpha", type=float, default=WATER_SPSA["alpha"],
                        help="learning-rate decay exponent")
    parser.add_argument("--spsa-gamma", type=float, default=WATER_SPSA["gamma"],
                        help="perturbation decay exponent")
    parser.add_argument("--shots", type=int, default=None,
                        help="sampled-expectation mode with this many shots per term")


def _add_active_space_flags(parser):
    parser.add_argument("--freeze", type=int, nargs="*", default=None,
                        help="spatial orbitals folded into the core")
    parser.add_argument("--remove", type=int, nargs="*", default=None,
                        help="spatial orbitals dropped as unoccupied")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vqepes",
        description="VQE ground states and potential energy surfaces from FCIDUMP inputs",
    )
    parser.add_argument("--version", action="version", version=f"vqepes {__version__}")
    parser.add_argument("--config", default=None, help="key = value defaults file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ed", help="exact ground-state energy of the qubit Hamiltonian")
    p.add_argument("--fcidump", required=True)
    _add_active_space_flags(p)
    p.add_argument("--sector", type=int, default=None, help="restrict to a particle number")
    p.set_defaults(func=cmd_ed)

    p = sub.add_parser("vqe", help="single VQE minimization")
    p.add_argument("--fcidump", required=True)
    _add_active_space_flags(p)
    p.add_argument("--layers", type=int, default=DEFAULT_LAYERS)
    p.add_argument("--x0", choices=["random", "zero"], default="random",
                   help="initial angles: seeded-random or all-zero (Hartree-Fock)")
    p.add_argument("--out", default=None, help="output path prefix")
    _add_spsa_flags(p)
    p.set_defaults(func=cmd_vqe)

    p = sub.add_parser("warmstart", help="random-restart search for optimal initial angles")
    p.add_argument("--fcidump", required=True)
    _add_active_space_flags(p)
    p.add_argument("--layers", type=int, default=DEFAULT_LAYERS)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--sector", type=int, default=None)
    p.add_argument("--out", required=True, help="output path prefix")
    _add_spsa_flags(p)
    p.set_defaults(func=cmd_warmstart)

    p = sub.add_parser("scan", help="PES scan over a manifest, warm-started")
    p.add_argument("--manifest", required=True)
    p.add_argument("--params", required=True, help="warm-start params JSON from `warmstart`")
    _add_active_space_flags(p)
    p.add_argument("--layers", type=int, default=None, help="default: from the params file")
    p.add_argument("--sector", type=int, default=None)
    p.add_argument("--keep-going", action="store_true", help="collect failures instead of aborting")
    p.add_argument("--jobs", type=int, default=1, help="parallel scan workers")
    p.add_argument("--out", required=True, help="output path prefix")
    _add_spsa_flags(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("fit", help="inverse-power surface fit of a PES CSV")
    p.add_argument("--pes", required=True, help="CSV produced by `scan`")
    p.add_argument("--column", choices=["exact", "vqe"], default="exact")
    p.add_argument("--angle-range", type=float, nargs=2, default=None)
    p.add_argument("--length-range", type=float, nargs=2, default=None)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=cmd_fit)

    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Turn `key = value` lines into leading flags so explicit flags override."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    path = Path(argv[idx + 1])
    injected: list[str] = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        flag = "--" + key.strip().replace("_", "-")
        injected.append(flag)
        injected.extend(value.split())
    # insert after the subcommand so argparse attributes them to it
    for i, token in enumerate(argv):
        if token in ("ed", "vqe", "warmstart", "scan", "fit"):
            return argv[: i + 1] + injected + argv[i + 1 :]
    return argv + injected


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit:
        raise
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
