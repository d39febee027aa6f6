"""Simultaneous Perturbation Stochastic Approximation minimizer.

Implements the standard first-order SPSA recurrence (Spall, IEEE TAC 1992)
with gain sequences a_k = a/(k+1+A)^alpha and c_k = c/(k+1)^gamma and
Rademacher perturbation directions from a SplitMix64 stream, so runs are
bit-reproducible from the seed alone.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .rng import SplitMix64

Objective = Callable[[np.ndarray], float]

DEFAULT_MAX_ITER = 300
DEFAULT_ALPHA = 0.602
DEFAULT_GAMMA = 0.101
DEFAULT_C = 0.1
FIRST_STEP_TARGET = 0.1  # target magnitude (radians) of the first update
CALIBRATION_PAIRS = 12  # two evaluations per pair, ~25 total
_CALIBRATION_SALT = 0x5DEECE66D


@dataclass(frozen=True)
class SPSAConfig:
    """Gain and iteration settings. a=None and A=None are resolved by calibrate()."""

    max_iter: int = DEFAULT_MAX_ITER
    a: float | None = None
    c: float = DEFAULT_C
    A: float | None = None
    alpha: float = DEFAULT_ALPHA
    gamma: float = DEFAULT_GAMMA
    seed: int = 0

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.a is not None and self.a <= 0:
            raise ValueError("a must be positive")
        if self.c <= 0:
            raise ValueError("c must be positive")
        if not 0.0 < self.gamma < self.alpha <= 1.0:
            raise ValueError("exponents must satisfy 0 < gamma < alpha <= 1")


@dataclass(frozen=True)
class OptimizationTrace:
    objective_history: np.ndarray  # one value per iteration: mean of the +/- pair
    final_params: np.ndarray  # iterate with the lowest objective_history entry
    final_value: float
    n_evaluations: int
    iterates: np.ndarray | None = None


def _resolved_A(config: SPSAConfig) -> float:
    return config.A if config.A is not None else 0.1 * config.max_iter


def calibrate(objective: Objective, x0: Sequence[float], config: SPSAConfig) -> SPSAConfig:
    """Fill in the learning-rate scale `a` (and default A) when unset.

    The gradient magnitude is probed with CALIBRATION_PAIRS two-sided
    evaluations around x0 (perturbation scale c) on a salted stream, and `a`
    is chosen so the first update has magnitude FIRST_STEP_TARGET per
    component. Returns the config unchanged when `a` is already set.
    """
    A = _resolved_A(config)
    if config.a is not None:
        return config if config.A is not None else replace(config, A=A)

    x0 = np.asarray(x0, dtype=float)
    rng = SplitMix64(config.seed ^ _CALIBRATION_SALT)
    magnitudes = []
    for _ in range(CALIBRATION_PAIRS):
        delta = rng.rademacher(x0.size)
        diff = objective(x0 + config.c * delta) - objective(x0 - config.c * delta)
        if math.isfinite(diff):
            magnitudes.append(abs(diff) / (2.0 * config.c))
    if not magnitudes:
        raise RuntimeError("calibration failed: every probe evaluation was non-finite")
    mean_grad = float(np.mean(magnitudes))
    if mean_grad == 0.0:
        a = FIRST_STEP_TARGET  # flat objective: any positive scale works
    else:
        a = FIRST_STEP_TARGET * (A + 1.0) ** config.alpha / mean_grad
    return replace(config, a=a, A=A)


def gradient_estimate(
    objective: Objective, x: np.ndarray, c: float, delta: np.ndarray
) -> tuple[np.ndarray, float, float]:
    """Simultaneous-perturbation gradient estimate along one direction.

    Returns (estimate, f_plus, f_minus) with
    estimate_i = [f(x + c*delta) - f(x - c*delta)] / (2 c delta_i).
    The estimator is unbiased: its average over all 2^d sign vectors equals
    the exact gradient for linear objectives.
    """
    f_plus = objective(x + c * delta)
    f_minus = objective(x - c * delta)
    return (f_plus - f_minus) / (2.0 * c) * delta, f_plus, f_minus  # delta_i = +/-1


def spsa_minimize(
    objective: Objective,
    x0: Sequence[float],
    config: SPSAConfig,
    record_iterates: bool = False,
) -> OptimizationTrace:
    """Minimize the objective; returns the best-seen iterate, not the last.

    Each iteration draws one Rademacher direction, evaluates the objective at
    x +/- c_k * delta, forms the simultaneous-perturbation gradient estimate
    and descends. The value logged for iteration k is the mean of its two
    evaluations; final_params is the iterate whose logged value is smallest.
    """
    x = np.array(x0, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("x0 must be finite")

    cfg = calibrate(objective, x, config)
    calib_evals = 2 * CALIBRATION_PAIRS if config.a is None else 0

    rng = SplitMix64(cfg.seed)
    history = np.empty(cfg.max_iter)
    iterates = np.empty((cfg.max_iter, x.size)) if record_iterates else None
    best_value = math.inf
    best_x = x.copy()

    for k in range(cfg.max_iter):
        a_k = cfg.a / (k + 1.0 + cfg.A) ** cfg.alpha
        c_k = cfg.c / (k + 1.0) ** cfg.gamma
        delta = rng.rademacher(x.size)
        gradient, f_plus, f_minus = gradient_estimate(objective, x, c_k, delta)
        if not (math.isfinite(f_plus) and math.isfinite(f_minus)):
            raise RuntimeError(f"objective returned a non-finite value at iteration {k}")
        estimate = 0.5 * (f_plus + f_minus)
        history[k] = estimate
        if iterates is not None:
            iterates[k] = x
        if estimate < best_value:
            best_value = estimate
            best_x = x.copy()
        x = x - a_k * gradient

    return OptimizationTrace(
        objective_history=history,
        final_params=best_x,
        final_value=best_value,
        n_evaluations=2 * cfg.max_iter + calib_evals,
        iterates=iterates,
    )


def trace_to_csv(trace: OptimizationTrace) -> str:
    lines = ["iter,value"]
    lines += [f"{k},{v:.12g}" for k, v in enumerate(trace.objective_history)]
    return "\n".join(lines) + "\n"


def trace_summary(trace: OptimizationTrace, config: SPSAConfig) -> dict:
    return {
        "final_value": trace.final_value,
        "final_params": [float(v) for v in trace.final_params],
        "n_evaluations": trace.n_evaluations,
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


def trace_summary_json(trace: OptimizationTrace, config: SPSAConfig) -> str:
    return json.dumps(trace_summary(trace, config), indent=2) + "\n"
