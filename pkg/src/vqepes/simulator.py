"""Dense statevector simulation and exact Pauli expectation values.

Basis index bit k is the occupation of qubit k, with qubit 0 the least
significant bit. The gate set is X, Ry, Rz and CNOT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli import PauliOperatorSum
from .rng import SplitMix64

MAX_QUBITS = 24

_GATE_KINDS = ("x", "ry", "rz", "cnot")
_PARAMETERIZED = ("ry", "rz")


@dataclass(frozen=True)
class Gate:
    """One circuit operation; Ry/Rz angles come from a parameter vector slot."""

    kind: str
    target: int
    control: int | None = None
    parameter_slot: int | None = None

    def __post_init__(self):
        if self.kind not in _GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == "cnot":
            if self.control is None:
                raise ValueError("cnot requires a control qubit")
            if self.control == self.target:
                raise ValueError("cnot control and target must differ")
        elif self.control is not None:
            raise ValueError(f"{self.kind} takes no control qubit")
        if self.kind in _PARAMETERIZED:
            if self.parameter_slot is None:
                raise ValueError(f"{self.kind} requires a parameter slot")
        elif self.parameter_slot is not None:
            raise ValueError(f"{self.kind} takes no parameter")

    @staticmethod
    def x(target: int) -> "Gate":
        return Gate("x", target)

    @staticmethod
    def ry(target: int, slot: int) -> "Gate":
        return Gate("ry", target, parameter_slot=slot)

    @staticmethod
    def rz(target: int, slot: int) -> "Gate":
        return Gate("rz", target, parameter_slot=slot)

    @staticmethod
    def cnot(control: int, target: int) -> "Gate":
        return Gate("cnot", target, control=control)


class Statevector:
    """2^n complex amplitudes with unit norm."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes: np.ndarray):
        if not 1 <= n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}]")
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != (1 << n_qubits,):
            raise ValueError(f"expected {1 << n_qubits} amplitudes, got {amplitudes.shape}")
        self.n_qubits = n_qubits
        self.amplitudes = amplitudes

    @classmethod
    def zero(cls, n_qubits: int) -> "Statevector":
        return cls.basis(n_qubits, 0)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "Statevector":
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _slices(n: int, assignments: dict[int, int]) -> tuple:
    # reshape([2]*n) puts qubit q on axis n-1-q
    idx: list = [slice(None)] * n
    for qubit, bit in assignments.items():
        idx[n - 1 - qubit] = bit
    return tuple(idx)


def apply_gate(state: Statevector, gate: Gate, params=()) -> Statevector:
    """Apply one gate in place and return the state."""
    n = state.n_qubits
    if not 0 <= gate.target < n:
        raise ValueError(f"target qubit {gate.target} outside [0, {n})")
    if gate.control is not None and not 0 <= gate.control < n:
        raise ValueError(f"control qubit {gate.control} outside [0, {n})")

    view = state.amplitudes.reshape([2] * n)
    t = gate.target
    if gate.kind == "x":
        lo, hi = _slices(n, {t: 0}), _slices(n, {t: 1})
        tmp = view[lo].copy()
        view[lo] = view[hi]
        view[hi] = tmp
    elif gate.kind == "ry":
        theta = float(params[gate.parameter_slot])
        c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
        lo, hi = _slices(n, {t: 0}), _slices(n, {t: 1})
        v0, v1 = view[lo].copy(), view[hi].copy()
        view[lo] = c * v0 - s * v1
        view[hi] = s * v0 + c * v1
    elif gate.kind == "rz":
        theta = float(params[gate.parameter_slot])
        phase = np.exp(0.5j * theta)
        view[_slices(n, {t: 0})] *= np.conj(phase)
        view[_slices(n, {t: 1})] *= phase
    else:  # cnot
        c = gate.control
        lo = _slices(n, {c: 1, t: 0})
        hi = _slices(n, {c: 1, t: 1})
        tmp = view[lo].copy()
        view[lo] = view[hi]
        view[hi] = tmp
    return state


def apply_circuit(state: Statevector, gates, params=()) -> Statevector:
    for gate in gates:
        apply_gate(state, gate, params)
    return state


def probabilities(state: Statevector) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


_INDEX_CACHE: dict[int, np.ndarray] = {}


def _indices(n: int) -> np.ndarray:
    arr = _INDEX_CACHE.get(n)
    if arr is None:
        arr = np.arange(1 << n, dtype=np.uint64)
        _INDEX_CACHE[n] = arr
    return arr


def _term_masks(axes: str) -> tuple[int, int, int]:
    """(flip mask, phase mask, number of Y) for one axes string."""
    flip = phase = n_y = 0
    for qubit, ch in enumerate(axes):
        bit = 1 << qubit
        if ch == "X":
            flip |= bit
        elif ch == "Y":
            flip |= bit
            phase |= bit
            n_y += 1
        elif ch == "Z":
            phase |= bit
    return flip, phase, n_y


def expectation(state: Statevector, op: PauliOperatorSum) -> float:
    """Exact <psi|op|psi>, term by term via bit-flip/phase maps.

    Raises if the imaginary residual exceeds 1e-10 (non-Hermitian operator).
    """
    if op.n_qubits != state.n_qubits:
        raise ValueError(f"operator on {op.n_qubits} qubits, state on {state.n_qubits}")
    idx = _indices(state.n_qubits)
    psi = state.amplitudes
    total = 0.0 + 0.0j
    for term in op:
        flip, phase_mask, n_y = _term_masks(term.axes)
        signs = 1.0 - 2.0 * (np.bitwise_count(idx & np.uint64(phase_mask)) & 1).astype(float)
        bra = np.conj(psi[idx ^ np.uint64(flip)])
        total += term.coefficient * (1j**n_y) * np.sum(bra * signs * psi)
    if abs(total.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary residual {total.imag:.3e}")
    return float(total.real)


class PauliExpectation:
    """Precompiled evaluator for repeated expectation values of one operator.

    Agrees with expectation() to machine precision; used in optimization
    loops where the operator is fixed and the state changes.
    """

    def __init__(self, op: PauliOperatorSum):
        self.n_qubits = op.n_qubits
        idx = _indices(op.n_qubits)
        gathers = []
        phases = []
        weights = []
        for term in op:
            flip, phase_mask, n_y = _term_masks(term.axes)
            signs = 1.0 - 2.0 * (np.bitwise_count(idx & np.uint64(phase_mask)) & 1).astype(float)
            gathers.append(idx ^ np.uint64(flip))
            phases.append(signs)
            weights.append(term.coefficient * (1j**n_y))
        self._gather = np.array(gathers)
        self._phase = np.array(phases)
        self._weights = np.array(weights)

    def value(self, state: Statevector) -> float:
        if state.n_qubits != self.n_qubits:
            raise ValueError("qubit count mismatch")
        psi = state.amplitudes
        per_term = (np.conj(psi)[self._gather] * self._phase) @ psi
        total = self._weights @ per_term
        if abs(total.imag) > 1e-10:
            raise ValueError(f"expectation has imaginary residual {total.imag:.3e}")
        return float(total.real)


def sample_counts(state: Statevector, shots: int, seed: int) -> dict[int, int]:
    """Multinomial sample of basis indices; deterministic for a given seed."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = probabilities(state)
    cumulative = np.cumsum(probs)
    cumulative[-1] = 1.0
    draws = SplitMix64(seed).uniforms(shots)
    outcomes = np.searchsorted(cumulative, draws, side="right")
    counts = np.bincount(outcomes, minlength=probs.size)
    return {int(i): int(c) for i, c in enumerate(counts) if c > 0}


def dump_statevector(state: Statevector, threshold: float = 1e-14) -> str:
    """Text form: one `<index> <re> <im>` line per amplitude above threshold."""
    lines = []
    for i, amp in enumerate(state.amplitudes):
        if abs(amp) > threshold:
            lines.append(f"{i} {amp.real:.17g} {amp.imag:.17g}")
    return "\n".join(lines) + "\n"
