"""Vectors of the Fock space and the linear operators acting on them.

Operators are kept extensionally: a :class:`LinearOp` is a kernel mapping a
basis diagram to a vector, memoised per diagram.  Diagonal operators also keep
their eigenvalue function, which is what makes them invertible.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Sequence

from fockspace.coeffring import ONE, ZERO, RingElem, TPolynomial
from fockspace.diagram import Diagram
from fockspace.errors import ChargeMismatchError, ConfigurationError

logger = logging.getLogger(__name__)


class FockVector:
    """Finite linear combination of diagrams of a single charge."""

    __slots__ = ("_terms", "_charge")

    def __init__(self, terms: Mapping[Diagram, RingElem] | None = None, charge: int | None = None) -> None:
        clean = {diagram: coeff for diagram, coeff in (terms or {}).items() if coeff}
        charges = {diagram.charge for diagram in clean}
        if charge is not None:
            charges.add(charge)
        if len(charges) > 1:
            raise ChargeMismatchError(f"vector mixes charges {sorted(charges)}")
        self._terms = clean
        self._charge = charges.pop() if charges else None

    @classmethod
    def _raw(cls, terms: dict[Diagram, RingElem], charge: int | None) -> "FockVector":
        obj = object.__new__(cls)
        obj._terms = terms
        obj._charge = charge
        return obj

    @classmethod
    def basis(cls, diagram: Diagram, coeff: RingElem = ONE) -> "FockVector":
        return cls._raw({diagram: coeff} if coeff else {}, diagram.charge)

    @classmethod
    def zero(cls, charge: int | None = None) -> "FockVector":
        return cls._raw({}, charge)

    @property
    def charge(self) -> int | None:
        return self._charge

    @property
    def terms(self) -> Mapping[Diagram, RingElem]:
        return MappingProxyType(self._terms)

    def sorted_terms(self) -> list[tuple[Diagram, RingElem]]:
        return sorted(self._terms.items(), key=lambda item: item[0].sort_key)

    def coefficient(self, diagram: Diagram) -> RingElem:
        return self._terms.get(diagram, ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def _merged_charge(self, other: "FockVector") -> int | None:
        if self._charge is None:
            return other._charge
        if other._charge is not None and other._charge != self._charge:
            raise ChargeMismatchError(
                f"cannot combine vectors of charge {self._charge} and {other._charge}"
            )
        return self._charge

    def __add__(self, other: "FockVector") -> "FockVector":
        if not isinstance(other, FockVector):
            return NotImplemented
        charge = self._merged_charge(other)
        out = dict(self._terms)
        for diagram, coeff in other._terms.items():
            total = out.get(diagram, ZERO) + coeff
            if total:
                out[diagram] = total
            else:
                out.pop(diagram, None)
        return FockVector._raw(out, charge)

    def __neg__(self) -> "FockVector":
        return FockVector._raw({d: -c for d, c in self._terms.items()}, self._charge)

    def __sub__(self, other: "FockVector") -> "FockVector":
        if not isinstance(other, FockVector):
            return NotImplemented
        return self + (-other)

    def scale(self, coeff: RingElem) -> "FockVector":
        if not coeff:
            return FockVector._raw({}, self._charge)
        out = {}
        for diagram, value in self._terms.items():
            product = value * coeff
            if product:
                out[diagram] = product
        return FockVector._raw(out, self._charge)

    def __rmul__(self, coeff: object) -> "FockVector":
        if isinstance(coeff, RingElem):
            return self.scale(coeff)
        if isinstance(coeff, int):
            return self.scale(RingElem.constant(coeff))
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FockVector):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def specialize(self) -> dict[Diagram, TPolynomial]:
        """Coefficients at ``r = t^2, s = t^-2``; zero coefficients dropped."""
        out = {}
        for diagram, coeff in self._terms.items():
            value = coeff.specialize()
            if not value.is_zero():
                out[diagram] = value
        return out

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for diagram, coeff in self.sorted_terms():
            text = str(coeff)
            if len(coeff) > 1:
                text = f"({text})"
            parts.append(f"{text} * ({diagram})")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"FockVector('{self}')"

    def to_dict(self) -> dict[str, str]:
        return {str(diagram): str(coeff) for diagram, coeff in self.sorted_terms()}


def vec_combine(scalars: Sequence[RingElem], vectors: Sequence[FockVector]) -> FockVector:
    """Return ``sum(c_i * v_i)``; all vectors must share one charge."""
    if len(scalars) != len(vectors):
        raise ValueError("scalars and vectors differ in length")
    total = FockVector.zero()
    for coeff, vector in zip(scalars, vectors):
        total = total + vector.scale(coeff)
    return total


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------


Kernel = Callable[[Diagram], FockVector]
Eigenvalue = Callable[[Diagram], RingElem]


@dataclass(eq=False)
class LinearOp:
    kernel: Kernel
    name: str
    eigenvalue: Eigenvalue | None = None
    _memo: dict = field(default_factory=dict, repr=False)

    @property
    def is_diagonal(self) -> bool:
        return self.eigenvalue is not None

    def on(self, diagram: Diagram) -> FockVector:
        try:
            return self._memo[diagram]
        except KeyError:
            image = self.kernel(diagram)
            self._memo[diagram] = image
            return image

    def __call__(self, vector: FockVector) -> FockVector:
        return op_apply(self, vector)

    def __str__(self) -> str:
        return self.name


def op_apply(op: LinearOp, vector: FockVector) -> FockVector:
    out: dict[Diagram, RingElem] = {}
    for diagram, coeff in vector.terms.items():
        for image, value in op.on(diagram).terms.items():
            total = out.get(image, ZERO) + coeff * value
            if total:
                out[image] = total
            else:
                out.pop(image, None)
    return FockVector._raw(out, vector.charge)


def diagonal_op(eigenvalue: Eigenvalue, name: str) -> LinearOp:
    def kernel(diagram: Diagram) -> FockVector:
        return FockVector.basis(diagram, eigenvalue(diagram))

    return LinearOp(kernel, name, eigenvalue)


def identity_op() -> LinearOp:
    return diagonal_op(lambda diagram: ONE, "1")


def zero_op() -> LinearOp:
    return diagonal_op(lambda diagram: ZERO, "0")


def op_inverse(op: LinearOp) -> LinearOp:
    if op.eigenvalue is None:
        raise ConfigurationError(f"{op.name} is not a diagonal operator and cannot be inverted")
    eigenvalue = op.eigenvalue
    return diagonal_op(lambda diagram: eigenvalue(diagram).inverse(), f"inv({op.name})")


def op_compose(*ops: LinearOp) -> LinearOp:
    """Composition ``ops[0] o ops[1] o ...``; the last operator acts first."""
    if not ops:
        return identity_op()
    if len(ops) == 1:
        return ops[0]
    name = "*".join(op.name for op in ops)
    if all(op.eigenvalue is not None for op in ops):
        eigenvalues = [op.eigenvalue for op in ops]

        def product(diagram: Diagram) -> RingElem:
            value = ONE
            for fn in eigenvalues:
                value = value * fn(diagram)
            return value

        return diagonal_op(product, name)

    def kernel(diagram: Diagram) -> FockVector:
        vector = FockVector.basis(diagram)
        for op in reversed(ops):
            vector = op_apply(op, vector)
            if not vector:
                return FockVector.zero(diagram.charge)
        return vector

    return LinearOp(kernel, name)


def op_sum(scalars: Sequence[RingElem], ops: Sequence[LinearOp]) -> LinearOp:
    pairs = list(zip(scalars, ops))
    name = " + ".join(f"({c})*{op.name}" for c, op in pairs) or "0"

    def kernel(diagram: Diagram) -> FockVector:
        total = FockVector.zero(diagram.charge)
        for coeff, op in pairs:
            total = total + op.on(diagram).scale(coeff)
        return total

    return LinearOp(kernel, name)


def op_power(op: LinearOp, exponent: int) -> LinearOp:
    if exponent < 0:
        return op_power(op_inverse(op), -exponent)
    return op_compose(*([op] * exponent))


@dataclass(frozen=True)
class Counterexample:
    diagram: Diagram
    residual: FockVector

    def to_dict(self) -> dict[str, str]:
        return {"diagram": str(self.diagram), "residual": str(self.residual)}


def op_equal_on(p: LinearOp, q: LinearOp, basis: Iterable[Diagram]) -> Counterexample | None:
    """First diagram (in basis order) where ``p`` and ``q`` differ; ``None`` when they agree."""
    for diagram in basis:
        residual = p.on(diagram) - q.on(diagram)
        if residual:
            return Counterexample(diagram, residual)
    return None
