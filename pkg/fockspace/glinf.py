"""gl(infinity) generators on the Fock space and their defining relations.

``e[i]`` removes the box at an i-diagonal convex corner and ``f[i]`` adds one
at a concave corner, both with coefficient 1.  The Cartan part uses the
occupation numbers: ``a[i]`` acts by ``r^{m_i}`` and ``b[i]`` by ``s^{m_i}``,
and the pair ``(a[i], b[i])`` plays the role of ``(w_i, w'_i)`` in the
relations below.  Corner-status operators ``K[i;T]`` evaluate an arbitrary
:class:`ConventionTable`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

from fockspace.coeffring import ONE, R, RS, S, RingElem, ring_parse
from fockspace.diagram import CornerKind, Diagram, Direction
from fockspace.errors import ConfigurationError
from fockspace.fock import FockVector, LinearOp, diagonal_op
from fockspace.words import Relation, Symbol, inv, make_relation, sym

logger = logging.getLogger(__name__)


class EpsKind(str, Enum):
    A = "a"
    B = "b"


@dataclass(frozen=True)
class ConventionTable:
    """Eigenvalues on concave (``cc``) and convex (``cv``) corners; 1 elsewhere."""

    cc: RingElem
    cv: RingElem

    def __post_init__(self) -> None:
        for slot in ("cc", "cv"):
            value = getattr(self, slot)
            if not value.is_monomial():
                raise ConfigurationError(f"table entry {slot}={value} is not an invertible monomial")

    @classmethod
    def parse(cls, text: str) -> "ConventionTable":
        """``"cc, cv"`` in ring syntax, e.g. ``"s^(-1), r^(-1)"``."""
        parts = text.split(",")
        if len(parts) != 2:
            raise ConfigurationError(f"a convention table needs two entries, got {text!r}")
        return cls(ring_parse(parts[0]), ring_parse(parts[1]))

    def value(self, kind: CornerKind | None) -> RingElem:
        if kind is CornerKind.CONCAVE:
            return self.cc
        if kind is CornerKind.CONVEX:
            return self.cv
        return ONE

    def __str__(self) -> str:
        return f"{self.cc}, {self.cv}"

    def to_dict(self) -> dict[str, str]:
        return {"cc": str(self.cc), "cv": str(self.cv)}


T_STD = ConventionTable(R, S)
T_STD_DUAL = ConventionTable(S, R)
T_PAPER_W = ConventionTable(S.inverse(), R.inverse())
T_PAPER_WP = ConventionTable(R, S)

TABLES: dict[str, ConventionTable] = {
    "std": T_STD,
    "std_dual": T_STD_DUAL,
    "paper_w": T_PAPER_W,
    "paper_wp": T_PAPER_WP,
}


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def _mutation_op(i: int, direction: Direction, name: str) -> LinearOp:
    def kernel(diagram: Diagram) -> FockVector:
        image = diagram.mutate(i, direction)
        if image is None:
            return FockVector.zero(diagram.charge)
        return FockVector.basis(image)

    return LinearOp(kernel, name)


def e_inf(i: int) -> LinearOp:
    return _mutation_op(i, Direction.REMOVE, f"e[{i}]")


def f_inf(i: int) -> LinearOp:
    return _mutation_op(i, Direction.ADD, f"f[{i}]")


def eps_diag(i: int, kind: EpsKind) -> LinearOp:
    base = R if kind is EpsKind.A else S

    def eigenvalue(diagram: Diagram) -> RingElem:
        return base if diagram.occupation(i) else ONE

    return diagonal_op(eigenvalue, f"{kind.value}[{i}]")


def corner_diag(i: int, table: ConventionTable, name: str | None = None) -> LinearOp:
    def eigenvalue(diagram: Diagram) -> RingElem:
        return table.value(diagram.status(i))

    return diagonal_op(eigenvalue, name or f"K[{i};{table}]")


def bracket_inf(i: int, j: int) -> RingElem:
    if i == j:
        return R * S.inverse()
    if i == j - 1:
        return R.inverse()
    if i == j + 1:
        return S
    return ONE


def pairing_eps_alpha(i: int, j: int) -> int:
    return int(i == j) - int(i == j + 1)


# ---------------------------------------------------------------------------
# Relations
# ---------------------------------------------------------------------------


def _commutator(name: str, indices, x: Symbol, y: Symbol) -> Relation:
    return make_relation(name, indices, (1, [x, y]), (-1, [y, x]))


def cleared_r4(i: int, j: int, tables: tuple[str, str] | None = None) -> Relation:
    """``(w_i w'_{i+1} - w_{i+1} w'_i) - (r - s)(e_i f_i - f_i e_i)``; the bare commutator when ``i != j``.

    ``w``/``w'`` are ``a``/``b`` unless ``tables`` names two corner tables.
    """
    e, f = sym("e", i), sym("f", j)
    if i != j:
        return _commutator("R4", (i, j), e, f)

    def w(index: int) -> Symbol:
        return sym("a", index) if tables is None else sym("K", index, tables[0])

    def wp(index: int) -> Symbol:
        return sym("b", index) if tables is None else sym("K", index, tables[1])

    r_minus_s = R - S
    return make_relation(
        "R4",
        (i, j),
        (1, [w(i), wp(i + 1)]),
        (-1, [w(i + 1), wp(i)]),
        (-r_minus_s, [e, f]),
        (r_minus_s, [f, e]),
    )


def literal_r4_relation(i: int = 0) -> Relation:
    """Cleared (R4) at ``i = j`` with the corner tables ``paper_w`` / ``paper_wp``."""
    return cleared_r4(i, i, tables=("paper_w", "paper_wp"))


def suite_glinf(window: tuple[int, int]) -> list[Relation]:
    """(R1)-(R7) with the occupation Cartan pair, plus the nilpotency identities."""
    lo, hi = window
    if lo > hi:
        raise ConfigurationError(f"empty index window [{lo}, {hi}]")
    indices = range(lo, hi + 1)
    rels: list[Relation] = []

    for i in indices:
        for kind in ("a", "b"):
            rels.append(make_relation(f"R1inv_{kind}", (i,), (1, [sym(kind, i), inv(sym(kind, i))]), (-1, [])))
    for i in indices:
        for j in indices:
            if i < j:
                rels.append(_commutator("R1aa", (i, j), sym("a", i), sym("a", j)))
                rels.append(_commutator("R1bb", (i, j), sym("b", i), sym("b", j)))
            rels.append(_commutator("R1ab", (i, j), sym("a", i), sym("b", j)))

    for name, kind, base in (("R2", "a", R), ("R3", "b", S)):
        for i in indices:
            for j in indices:
                p = pairing_eps_alpha(i, j)
                w, e, f = sym(kind, i), sym("e", j), sym("f", j)
                rels.append(make_relation(f"{name}e", (i, j), (1, [w, e]), (-(base ** p), [e, w])))
                rels.append(make_relation(f"{name}f", (i, j), (1, [w, f]), (-(base ** -p), [f, w])))

    for i in indices:
        for j in indices:
            rels.append(cleared_r4(i, j))

    for i in indices:
        for j in indices:
            if j - i > 1:
                rels.append(_commutator("R5e", (i, j), sym("e", i), sym("e", j)))
                rels.append(_commutator("R5f", (i, j), sym("f", i), sym("f", j)))

    serre = (
        ("R6", "e", R + S, RS),
        ("R7", "f", R.inverse() + S.inverse(), RS.inverse()),
    )
    for i in indices:
        if i + 1 > hi:
            continue
        for name, kind, plus, prod in serre:
            x, y = sym(kind, i), sym(kind, i + 1)
            rels.append(make_relation(f"{name}a", (i,), (1, [x, x, y]), (-plus, [x, y, x]), (prod, [y, x, x])))
            rels.append(make_relation(f"{name}b", (i,), (1, [x, y, y]), (-plus, [y, x, y]), (prod, [y, y, x])))

    for kind in ("e", "f"):
        for k in indices:
            x = sym(kind, k)
            rels.append(make_relation(f"nil_{kind}_sq", (k,), (1, [x, x])))
            for j in indices:
                rels.append(make_relation(f"nil_{kind}_kjk", (k, j, k), (1, [x, sym(kind, j), x])))

    logger.debug("glinf suite over window [%d, %d]: %d relations", lo, hi, len(rels))
    return rels


def suite_brackets(window: tuple[int, int]) -> list[Relation]:
    """Commutation scalars of raising/lowering operators past inverse Cartan elements.

    Each identity is instantiated under two readings of ``w_m, w'_m``: the
    occupation products ``a[m] b[m+1]`` / ``a[m+1] b[m]`` (``root``) and the
    corner tables ``paper_w`` / ``paper_wp`` (``table``).
    """
    lo, hi = window
    indices = range(lo, hi + 1)

    def w_inv(reading: str, m: int) -> list[Symbol]:
        if reading == "root":
            return [inv(sym("b", m + 1)), inv(sym("a", m))]
        return [inv(sym("K", m, "paper_w"))]

    def wp_inv(reading: str, m: int) -> list[Symbol]:
        if reading == "root":
            return [inv(sym("b", m)), inv(sym("a", m + 1))]
        return [inv(sym("K", m, "paper_wp"))]

    steps = (
        ("step_e_wp_same", 0, R.inverse() * S),
        ("step_e_wp_next", 1, S.inverse()),
        ("step_e_wp_prev", -1, R),
    )
    rels: list[Relation] = []
    for reading in ("root", "table"):
        for m in indices:
            e, f = sym("e", m), sym("f", m)
            for mp in indices:
                rels.append(make_relation(
                    f"bracket_f_w[{reading}]", (m, mp),
                    (1, [f, *w_inv(reading, mp)]),
                    (-bracket_inf(m, mp).inverse(), [*w_inv(reading, mp), f]),
                ))
                rels.append(make_relation(
                    f"bracket_e_w[{reading}]", (m, mp),
                    (1, [e, *w_inv(reading, mp)]),
                    (-bracket_inf(m, mp), [*w_inv(reading, mp), e]),
                ))
                rels.append(make_relation(
                    f"bracket_f_wp[{reading}]", (m, mp),
                    (1, [f, *wp_inv(reading, mp)]),
                    (-bracket_inf(m, mp), [*wp_inv(reading, mp), f]),
                ))
            for name, shift, scalar in steps:
                rels.append(make_relation(
                    f"{name}[{reading}]", (m, m + shift),
                    (1, [e, *wp_inv(reading, m + shift)]),
                    (-scalar, [*wp_inv(reading, m + shift), e]),
                ))
    logger.debug("bracket suite over window [%d, %d]: %d relations", lo, hi, len(rels))
    return rels
