"""Exact algebra on tensor products of Pauli operators.

A term is a string over {I, X, Y, Z} with position k naming the operator on
qubit k, together with a complex coefficient. Sums keep one entry per axes
pattern and drop coefficients below a prune threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

PRUNE_THRESHOLD = 1e-12

_AXES = "IXYZ"

# Single-qubit products: (left, right) -> (result, phase).
_PRODUCT: dict[tuple[str, str], tuple[str, complex]] = {}
for _p in _AXES:
    _PRODUCT[("I", _p)] = (_p, 1.0 + 0.0j)
    _PRODUCT[(_p, "I")] = (_p, 1.0 + 0.0j)
    _PRODUCT[(_p, _p)] = ("I", 1.0 + 0.0j)
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _PRODUCT[(_a, _b)] = (_c, 1.0j)
    _PRODUCT[(_b, _a)] = (_c, -1.0j)


@dataclass(frozen=True)
class PauliTerm:
    """A coefficient times a tensor product of single-qubit Paulis."""

    axes: str
    coefficient: complex

    def __post_init__(self):
        if any(ch not in _AXES for ch in self.axes):
            raise ValueError(f"invalid Pauli axes string {self.axes!r}")
        c = complex(self.coefficient)
        if not (abs(c.real) < float("inf") and abs(c.imag) < float("inf")):
            raise ValueError("coefficient must be finite")
        object.__setattr__(self, "coefficient", c)

    @property
    def n_qubits(self) -> int:
        return len(self.axes)


def identity_term(n_qubits: int, coefficient: complex = 1.0) -> PauliTerm:
    return PauliTerm("I" * n_qubits, coefficient)


def pauli_multiply(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Product of two terms with exact phase tracking."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")
    axes, phase = _string_product(a.axes, b.axes)
    return PauliTerm(axes, a.coefficient * b.coefficient * phase)


def _string_product(a: str, b: str) -> tuple[str, complex]:
    out = []
    phase = 1.0 + 0.0j
    for pa, pb in zip(a, b):
        res, ph = _PRODUCT[(pa, pb)]
        out.append(res)
        phase *= ph
    return "".join(out), phase


class PauliOperatorSum:
    """A coefficient-weighted sum of Pauli terms on a fixed qubit count.

    Like terms are merged on insertion; entries with |coefficient| below
    PRUNE_THRESHOLD are dropped.
    """

    __slots__ = ("n_qubits", "_terms")

    def __init__(self, n_qubits: int, terms: Iterable[PauliTerm] | None = None):
        if n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        self.n_qubits = n_qubits
        self._terms: dict[str, complex] = {}
        for term in terms or ():
            self.add(term)

    def add(self, term: PauliTerm) -> None:
        if term.n_qubits != self.n_qubits:
            raise ValueError(f"term acts on {term.n_qubits} qubits, sum on {self.n_qubits}")
        self._add_raw(term.axes, term.coefficient)

    def _add_raw(self, axes: str, coefficient: complex) -> None:
        c = self._terms.get(axes, 0.0) + coefficient
        if abs(c) < PRUNE_THRESHOLD:
            self._terms.pop(axes, None)
        else:
            self._terms[axes] = c

    def coefficient(self, axes: str) -> complex:
        return self._terms.get(axes, 0.0 + 0.0j)

    def terms(self) -> Iterator[PauliTerm]:
        for axes in sorted(self._terms):
            yield PauliTerm(axes, self._terms[axes])

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[PauliTerm]:
        return self.terms()

    def __add__(self, other: "PauliOperatorSum") -> "PauliOperatorSum":
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit counts differ")
        out = PauliOperatorSum(self.n_qubits)
        out._terms = dict(self._terms)
        for axes, c in other._terms.items():
            out._add_raw(axes, c)
        return out

    def scaled(self, factor: complex) -> "PauliOperatorSum":
        out = PauliOperatorSum(self.n_qubits)
        for axes, c in self._terms.items():
            out._add_raw(axes, c * factor)
        return out

    def accumulate(self, other: "PauliOperatorSum", factor: complex = 1.0) -> None:
        """In-place `self += factor * other`."""
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit counts differ")
        for axes, c in other._terms.items():
            self._add_raw(axes, c * factor)

    def __matmul__(self, other: "PauliOperatorSum") -> "PauliOperatorSum":
        """Operator product, distributing over all term pairs."""
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit counts differ")
        out = PauliOperatorSum(self.n_qubits)
        for axes_a, ca in self._terms.items():
            for axes_b, cb in other._terms.items():
                axes, phase = _string_product(axes_a, axes_b)
                out._add_raw(axes, ca * cb * phase)
        return out

    def realified(self, tol: float = 1e-10) -> "PauliOperatorSum":
        """Drop imaginary parts, failing if any exceeds tol (Hermiticity check)."""
        out = PauliOperatorSum(self.n_qubits)
        for axes, c in self._terms.items():
            if abs(c.imag) > tol:
                raise RuntimeError(
                    f"non-Hermitian coefficient {c!r} on term {axes} exceeds tolerance {tol}"
                )
            out._add_raw(axes, complex(c.real, 0.0))
        return out

    def max_abs_coefficient(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    # -- text form: one `<coeff> <axes>` per line, for goldens and debugging --

    def to_lines(self) -> str:
        lines = []
        for term in self.terms():
            c = term.coefficient
            coeff = f"{c.real:.17g}" if c.imag == 0.0 else f"{c.real:.17g}{c.imag:+.17g}j"
            lines.append(f"{coeff} {term.axes}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_lines(cls, text: str) -> "PauliOperatorSum":
        terms = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            coeff, axes = line.split()
            terms.append(PauliTerm(axes, complex(coeff)))
        if not terms:
            raise ValueError("no terms in text")
        return cls(terms[0].n_qubits, terms)

    def __repr__(self) -> str:
        return f"PauliOperatorSum(n_qubits={self.n_qubits}, n_terms={len(self)})"
