"""Exact-diagonalization reference energies for qubit Hamiltonians."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jordan_wigner import total_number_operator
from .pauli import PauliOperatorSum

MAX_DENSE_QUBITS = 12

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


@dataclass(frozen=True)
class ExactResult:
    ground_energy: float
    ground_vector: np.ndarray | None
    sector_filtered: bool
    n_particles_expected: int | None


def to_dense(op: PauliOperatorSum) -> np.ndarray:
    """Dense 2^n x 2^n matrix of the operator, qubit 0 least significant."""
    n = op.n_qubits
    if n > MAX_DENSE_QUBITS:
        raise ValueError(f"dense matrix guard: {n} qubits exceed the maximum {MAX_DENSE_QUBITS}")
    dim = 1 << n
    matrix = np.zeros((dim, dim), dtype=complex)
    for term in op:
        factor = np.array([[1.0]], dtype=complex)
        for qubit in reversed(range(n)):  # most significant qubit first in kron
            factor = np.kron(factor, _PAULI_MATRICES[term.axes[qubit]])
        matrix += term.coefficient * factor
    return matrix


def ground_state(op: PauliOperatorSum, sector: int | None = None) -> ExactResult:
    """Minimum eigenvalue of the operator, optionally within a particle sector.

    With sector=None the global minimum is returned. Otherwise the lowest
    eigenvalue whose eigenvector has <N> equal to the requested particle
    count (within 1e-6) is returned; degenerate eigenvalue clusters are
    rotated into number-operator eigenstates first so the filter is well
    defined for number-conserving Hamiltonians.
    """
    matrix = to_dense(op)
    deviation = np.max(np.abs(matrix - matrix.conj().T))
    if deviation > 1e-10:
        raise ValueError(f"operator is not Hermitian (max deviation {deviation:.3e})")
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)

    if sector is None:
        return ExactResult(
            ground_energy=float(eigenvalues[0]),
            ground_vector=eigenvectors[:, 0].copy(),
            sector_filtered=False,
            n_particles_expected=None,
        )

    number_diag = np.real(np.diag(to_dense(total_number_operator(op.n_qubits))))
    scale = max(np.max(np.abs(eigenvalues)), 1.0)
    i = 0
    while i < eigenvalues.size:
        j = i + 1
        while j < eigenvalues.size and eigenvalues[j] - eigenvalues[i] < 1e-10 * scale:
            j += 1
        block = eigenvectors[:, i:j]
        n_block = block.conj().T @ (number_diag[:, None] * block)
        occ, rot = np.linalg.eigh(n_block)
        vectors = block @ rot
        for k in range(j - i):
            if abs(occ[k] - sector) < 1e-6:
                return ExactResult(
                    ground_energy=float(eigenvalues[i]),
                    ground_vector=vectors[:, k].copy(),
                    sector_filtered=True,
                    n_particles_expected=sector,
                )
        i = j
    raise ValueError(f"no eigenvector with particle number {sector}")
