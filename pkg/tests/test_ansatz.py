"""Circuit construction, HF anchoring, and parameter-shift consistency."""

import math

import numpy as np
import pytest

from vqepes.ansatz import AnsatzCircuit, HFReference, build_ansatz, format_circuit, prepare_state
from vqepes.chem import FermionicHamiltonian
from vqepes.jordan_wigner import jordan_wigner
from vqepes.simulator import expectation

from oracles import hf_energy, random_fermionic_hamiltonian


def test_structure_two_qubits_one_layer():
    circuit = build_ansatz(2, 1, HFReference(2, (0,)))
    assert circuit.n_params == 8
    kinds = [g.kind for g in circuit.gates]
    assert kinds == ["ry", "ry", "rz", "rz", "cnot", "ry", "ry", "rz", "rz"]
    slots = [g.parameter_slot for g in circuit.gates if g.parameter_slot is not None]
    assert slots == list(range(8))
    assert [g.kind for g in circuit.prep_gates] == ["x"]
    cnot = circuit.gates[4]
    assert (cnot.control, cnot.target) == (0, 1)


def test_structure_zero_layers():
    circuit = build_ansatz(3, 0, HFReference(3, ()))
    assert circuit.n_params == 6
    assert all(g.kind != "cnot" for g in circuit.gates)


def test_param_count_formula():
    for n, layers in [(2, 0), (4, 1), (6, 2), (6, 3)]:
        circuit = build_ansatz(n, layers, HFReference(n, ()))
        assert circuit.n_params == 2 * n * (layers + 1)
        ladder = [g for g in circuit.gates if g.kind == "cnot"]
        assert len(ladder) == layers * (n - 1)


def test_zero_parameters_prepare_hf_basis_state():
    hf = HFReference(6, (0, 1, 3, 4))
    circuit = build_ansatz(6, 2, hf)
    state = prepare_state(circuit, np.zeros(circuit.n_params))
    probs = np.abs(state.amplitudes) ** 2
    want = np.zeros(64)
    want[hf.basis_index] = 1.0
    assert np.allclose(probs, want, atol=1e-15)


def test_zero_parameters_reproduce_hf_energy():
    rng = np.random.default_rng(23)
    h = random_fermionic_hamiltonian(3, 2, 1, rng)
    qubit_h = jordan_wigner(h)
    hf = HFReference.from_counts(3, h.n_alpha, h.n_beta)
    circuit = build_ansatz(6, 2, hf)
    state = prepare_state(circuit, np.zeros(circuit.n_params))
    assert expectation(state, qubit_h) == pytest.approx(hf_energy(h), abs=1e-9)


def test_prepare_state_deterministic_and_normalized():
    circuit = build_ansatz(6, 2, HFReference(6, (0, 1, 3, 4)))
    rng = np.random.default_rng(1)
    params = rng.uniform(-math.pi, math.pi, circuit.n_params)
    a = prepare_state(circuit, params)
    b = prepare_state(circuit, params)
    assert np.array_equal(a.amplitudes, b.amplitudes)
    assert a.norm() == pytest.approx(1.0, abs=1e-12)


def test_prepare_state_rejects_wrong_length():
    circuit = build_ansatz(2, 1, HFReference(2, (0,)))
    with pytest.raises(ValueError):
        prepare_state(circuit, np.zeros(7))


def test_parameter_shift_matches_finite_differences():
    rng = np.random.default_rng(4)
    h = random_fermionic_hamiltonian(2, 1, 1, rng)
    qubit_h = jordan_wigner(h)
    circuit = build_ansatz(4, 1, HFReference.from_counts(2, 1, 1))

    def energy(params):
        return expectation(prepare_state(circuit, params), qubit_h)

    theta = rng.uniform(-math.pi, math.pi, circuit.n_params)
    for slot in [0, 3, circuit.n_params - 1]:
        shift = np.zeros_like(theta)
        shift[slot] = math.pi / 2
        parameter_shift = 0.5 * (energy(theta + shift) - energy(theta - shift))
        eps = 1e-5
        shift[slot] = eps
        central = (energy(theta + shift) - energy(theta - shift)) / (2 * eps)
        assert parameter_shift == pytest.approx(central, abs=1e-8)


def test_energy_landscape_continuity():
    rng = np.random.default_rng(9)
    h = random_fermionic_hamiltonian(2, 1, 1, rng)
    qubit_h = jordan_wigner(h)
    circuit = build_ansatz(4, 1, HFReference.from_counts(2, 1, 1))
    scale = max(abs(t.coefficient) for t in qubit_h) * len(qubit_h)

    def energy(params):
        return expectation(prepare_state(circuit, params), qubit_h)

    theta = rng.uniform(-math.pi, math.pi, circuit.n_params)
    base = energy(theta)
    for delta in (1e-3, 1e-4):
        bump = np.zeros_like(theta)
        bump[2] = delta
        assert abs(energy(theta + bump) - base) <= scale * delta


def test_structure_independent_of_parameters():
    circuit = build_ansatz(3, 2, HFReference(3, (0,)))
    assert isinstance(circuit, AnsatzCircuit)
    before = circuit.gates
    prepare_state(circuit, np.full(circuit.n_params, 0.3))
    assert circuit.gates is before


def test_format_circuit_golden():
    circuit = build_ansatz(2, 1, HFReference(2, (0,)))
    assert format_circuit(circuit) == (
        "ry 0 [slot 0]\n"
        "ry 1 [slot 1]\n"
        "rz 0 [slot 2]\n"
        "rz 1 [slot 3]\n"
        "cnot 0 1\n"
        "ry 0 [slot 4]\n"
        "ry 1 [slot 5]\n"
        "rz 0 [slot 6]\n"
        "rz 1 [slot 7]\n"
        "x 0\n"
    )


def test_hf_reference_validation():
    with pytest.raises(ValueError):
        HFReference(2, (2,))
    with pytest.raises(ValueError):
        build_ansatz(2, 1, HFReference(3, (0,)))
    hf = HFReference.from_counts(3, 2, 2)
    assert hf.occupied == (0, 1, 3, 4)
    assert hf.basis_index == 0b011011
