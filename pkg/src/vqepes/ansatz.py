"""Hardware-efficient variational circuit with a Hartree-Fock anchor.

Each layer applies Ry then Rz rotations on every qubit followed by a linear
CNOT ladder (control i, target i+1); a final rotation layer closes the stack,
giving 2*n*(layers+1) parameters. The X gates that set the Hartree-Fock
occupation are applied after the parameterized stack: the all-zeros state is
a fixed point of the CNOT ladder, so the zero-parameter circuit prepares the
Hartree-Fock determinant exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .simulator import Gate, Statevector, apply_circuit

DEFAULT_LAYERS = 2


@dataclass(frozen=True)
class HFReference:
    """Occupied qubits of the Hartree-Fock determinant."""

    n_qubits: int
    occupied: tuple[int, ...]

    def __post_init__(self):
        occ = tuple(sorted(set(self.occupied)))
        if occ and (occ[0] < 0 or occ[-1] >= self.n_qubits):
            raise ValueError(f"occupied index outside [0, {self.n_qubits})")
        object.__setattr__(self, "occupied", occ)

    @classmethod
    def from_counts(cls, n_spatial: int, n_alpha: int, n_beta: int) -> "HFReference":
        """Lowest alpha-block and beta-block qubits under blocked ordering."""
        if n_alpha > n_spatial or n_beta > n_spatial:
            raise ValueError("electron count exceeds orbital count")
        occupied = tuple(range(n_alpha)) + tuple(n_spatial + i for i in range(n_beta))
        return cls(n_qubits=2 * n_spatial, occupied=occupied)

    @property
    def basis_index(self) -> int:
        return sum(1 << q for q in self.occupied)


@dataclass(frozen=True)
class AnsatzCircuit:
    n_qubits: int
    layers: int
    gates: tuple[Gate, ...]  # parameterized stack, applied first
    prep_gates: tuple[Gate, ...]  # HF X gates, applied last
    n_params: int


def build_ansatz(n_qubits: int, layers: int, hf: HFReference) -> AnsatzCircuit:
    """Assemble the layered Ry/Rz + CNOT-ladder circuit for one HF reference."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    if layers < 0:
        raise ValueError("layers must be >= 0")
    if hf.n_qubits != n_qubits:
        raise ValueError(f"HF reference is on {hf.n_qubits} qubits, circuit on {n_qubits}")

    gates: list[Gate] = []
    slot = 0

    def rotation_layer():
        nonlocal slot
        for q in range(n_qubits):
            gates.append(Gate.ry(q, slot))
            slot += 1
        for q in range(n_qubits):
            gates.append(Gate.rz(q, slot))
            slot += 1

    for _ in range(layers):
        rotation_layer()
        for q in range(n_qubits - 1):
            gates.append(Gate.cnot(q, q + 1))
    rotation_layer()

    prep = tuple(Gate.x(q) for q in hf.occupied)
    return AnsatzCircuit(
        n_qubits=n_qubits,
        layers=layers,
        gates=tuple(gates),
        prep_gates=prep,
        n_params=slot,
    )


def prepare_state(circuit: AnsatzCircuit, params: np.ndarray) -> Statevector:
    """Run the circuit on |0...0> and return a fresh statevector."""
    params = np.asarray(params, dtype=float)
    if params.shape != (circuit.n_params,):
        raise ValueError(f"expected {circuit.n_params} parameters, got {params.shape}")
    state = Statevector.zero(circuit.n_qubits)
    apply_circuit(state, circuit.gates, params)
    apply_circuit(state, circuit.prep_gates)
    return state


def format_circuit(circuit: AnsatzCircuit) -> str:
    """One gate per line in application order, for golden-file comparisons."""
    lines = []
    for gate in circuit.gates + circuit.prep_gates:
        if gate.kind == "cnot":
            lines.append(f"cnot {gate.control} {gate.target}")
        elif gate.parameter_slot is not None:
            lines.append(f"{gate.kind} {gate.target} [slot {gate.parameter_slot}]")
        else:
            lines.append(f"{gate.kind} {gate.target}")
    return "\n".join(lines) + "\n"
