"""VQE objective, the random-restart warm-start protocol, and state diagnostics."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .ansatz import AnsatzCircuit, prepare_state
from .pauli import PauliOperatorSum, PauliTerm
from .rng import SplitMix64
from .simulator import PauliExpectation, Statevector, probabilities
from .spsa import OptimizationTrace, SPSAConfig, spsa_minimize


@dataclass(frozen=True)
class ProbabilityDiagnostics:
    """Gap between the two most probable measurement outcomes of a state."""

    top_index: int
    top_probability: float
    second_probability: float

    @property
    def gap(self) -> float:
        return self.top_probability - self.second_probability


@dataclass(frozen=True)
class VQERun:
    energy: float
    params: np.ndarray
    trace: OptimizationTrace
    seed: int
    diagnostics: ProbabilityDiagnostics


@dataclass(frozen=True)
class WarmStartResult:
    runs: tuple[VQERun, ...]
    best_run_index: int
    best_params: np.ndarray
    reference_energy: float
    deltas: np.ndarray

    @property
    def best_delta(self) -> float:
        return float(self.deltas[self.best_run_index])


def diagnostics_from_state(state: Statevector) -> ProbabilityDiagnostics:
    """Top and second-highest basis probabilities; ties break to lower index."""
    probs = probabilities(state)
    top = int(np.argmax(probs))
    rest = np.delete(probs, top)
    return ProbabilityDiagnostics(
        top_index=top,
        top_probability=float(probs[top]),
        second_probability=float(rest.max()) if rest.size else 0.0,
    )


def make_objective(h: PauliOperatorSum, circuit: AnsatzCircuit, shots: int | None = None,
                   shot_seed: int = 0):
    """Energy objective theta -> <psi(theta)|H|psi(theta)>.

    With shots set, every Pauli expectation is replaced by the mean of that
    many +/-1 measurement outcomes drawn from a SplitMix64 stream, modelling
    per-term sampling noise; the stream advances across calls, so the
    objective is stochastic but the whole sequence is reproducible.
    """
    evaluator = PauliExpectation(h)
    if shots is None:
        def objective(params: np.ndarray) -> float:
            return evaluator.value(prepare_state(circuit, params))
        return objective

    if shots < 1:
        raise ValueError("shots must be >= 1")
    terms = list(h)
    singles = [
        PauliExpectation(PauliOperatorSum(h.n_qubits, [PauliTerm(t.axes, 1.0)])) for t in terms
    ]
    weights = [t.coefficient.real for t in terms]
    rng = SplitMix64(shot_seed)

    def sampled(params: np.ndarray) -> float:
        state = prepare_state(circuit, params)
        total = 0.0
        for weight, single, term in zip(weights, singles, terms):
            if term.axes.count("I") == len(term.axes):
                total += weight  # identity needs no measurement
                continue
            p = single.value(state)  # exact <P> in [-1, 1]
            prob_plus = min(max(0.5 * (1.0 + p), 0.0), 1.0)
            hits = int(np.count_nonzero(rng.uniforms(shots) < prob_plus))
            total += weight * (2.0 * hits / shots - 1.0)
        return total

    return sampled


def vqe_energy(
    h: PauliOperatorSum,
    circuit: AnsatzCircuit,
    x0: np.ndarray,
    config: SPSAConfig,
    shots: int | None = None,
) -> VQERun:
    """Minimize the energy with SPSA and re-evaluate it at the returned point.

    The stored energy is always the exact statevector expectation at the
    final parameters, also when the optimization itself ran in shot mode.
    """
    objective = make_objective(h, circuit, shots=shots, shot_seed=config.seed)
    trace = spsa_minimize(objective, x0, config)
    exact_objective = make_objective(h, circuit)
    energy = exact_objective(trace.final_params)
    state = prepare_state(circuit, trace.final_params)
    return VQERun(
        energy=energy,
        params=trace.final_params,
        trace=trace,
        seed=config.seed,
        diagnostics=diagnostics_from_state(state),
    )


def warm_start_search(
    h: PauliOperatorSum,
    circuit: AnsatzCircuit,
    n_restarts: int,
    config: SPSAConfig,
    reference: float,
    shots: int | None = None,
) -> WarmStartResult:
    """Run VQE from n_restarts random starting angles and keep the best run.

    Run r draws its initial angles uniformly from [-pi, pi) per parameter
    from a stream seeded with config.seed + r, then runs SPSA with a seed
    drawn from the same stream. The best run minimizes |E - reference|,
    where the reference is the exact-diagonalization energy of h.
    """
    if n_restarts < 1:
        raise ValueError("n_restarts must be >= 1")
    runs = []
    for r in range(n_restarts):
        stream = SplitMix64(config.seed + r)
        x0 = stream.uniforms(circuit.n_params, -math.pi, math.pi)
        run_config = replace(config, seed=stream.next_uint64())
        runs.append(vqe_energy(h, circuit, x0, run_config, shots=shots))

    deltas = np.array([abs(run.energy - reference) for run in runs])
    best = int(np.argmin(deltas))
    return WarmStartResult(
        runs=tuple(runs),
        best_run_index=best,
        best_params=runs[best].params,
        reference_energy=reference,
        deltas=deltas,
    )


# -- result export ---------------------------------------------------------


def run_record(run: VQERun, reference: float | None = None) -> dict:
    record = {
        "energy": run.energy,
        "seed": run.seed,
        "params": [float(v) for v in run.params],
        "diagnostics": {
            "top_index": run.diagnostics.top_index,
            "top_probability": run.diagnostics.top_probability,
            "second_probability": run.diagnostics.second_probability,
            "gap": run.diagnostics.gap,
        },
        "n_evaluations": run.trace.n_evaluations,
    }
    if reference is not None:
        record["delta"] = abs(run.energy - reference)
    return record


def warm_start_csv(result: WarmStartResult) -> str:
    lines = ["run,energy,delta,top_prob,gap"]
    for i, run in enumerate(result.runs):
        lines.append(
            f"{i},{run.energy:.12g},{result.deltas[i]:.12g},"
            f"{run.diagnostics.top_probability:.12g},{run.diagnostics.gap:.12g}"
        )
    return "\n".join(lines) + "\n"


def warm_start_json(result: WarmStartResult, config: SPSAConfig) -> str:
    payload = {
        "reference_energy": result.reference_energy,
        "best_run_index": result.best_run_index,
        "best_delta": result.best_delta,
        "runs": [run_record(r, result.reference_energy) for r in result.runs],
        "config": {
            "max_iter": config.max_iter,
            "a": config.a,
            "c": config.c,
            "A": config.A,
            "alpha": config.alpha,
            "gamma": config.gamma,
            "seed": config.seed,
        },
    }
    return json.dumps(payload, indent=2) + "\n"
