"""Folded type C_l^(1) operators on the Fock space.

Node ``i`` of the affine diagram collects the gl(infinity) generators on the
fiber ``{j : pi(j) = i}`` of the folding map.  Raising and lowering operators
are dressed by fiber products of corner-status operators and every fiber
product is raised to ``nu_i`` (1 at the end nodes, 1/2 in the middle).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from fockspace.coeffring import ONE, R, RS, S, RingElem, TPolynomial
from fockspace.diagram import CornerKind, Diagram, Direction, color_counts, fold_pi
from fockspace.errors import CoefficientError, ConfigurationError
from fockspace.fock import FockVector, LinearOp, diagonal_op
from fockspace.glinf import T_PAPER_W, T_PAPER_WP, T_STD, T_STD_DUAL, ConventionTable
from fockspace.words import Relation, Symbol, inv, make_relation, sym

logger = logging.getLogger(__name__)


class GenKind(str, Enum):
    E = "E"
    F = "F"


class RiMode(str, Enum):
    FULL = "full"
    HALF = "half"


@dataclass(frozen=True)
class DressingChoice:
    name: str
    e_table: ConventionTable
    f_table: ConventionTable

    def to_dict(self) -> dict:
        return {"name": self.name, "e": self.e_table.to_dict(), "f": self.f_table.to_dict()}


DRESSINGS: dict[str, DressingChoice] = {
    "paper": DressingChoice("paper", T_PAPER_W, T_PAPER_WP),
    "dual": DressingChoice("dual", T_PAPER_WP, T_PAPER_W),
    "std": DressingChoice("std", T_STD, T_STD_DUAL),
}


@dataclass(frozen=True)
class FoldedAlgebra:
    l: int
    dressing: DressingChoice = DRESSINGS["paper"]
    ri_mode: RiMode = RiMode.FULL

    def __post_init__(self) -> None:
        if self.l < 2:
            raise ConfigurationError(f"rank l must be at least 2, got {self.l}")

    @classmethod
    def from_preset(cls, l: int, preset: str = "paper", ri_mode: str | RiMode = RiMode.FULL) -> "FoldedAlgebra":
        try:
            dressing = DRESSINGS[preset]
        except KeyError:
            raise ConfigurationError(
                f"unknown preset {preset!r}; choose from {', '.join(DRESSINGS)}"
            ) from None
        return cls(l, dressing, RiMode(ri_mode))

    @property
    def nodes(self) -> range:
        return range(self.l + 1)

    def check_node(self, i: int) -> None:
        if not 0 <= i <= self.l:
            raise ConfigurationError(f"node {i} is outside 0..{self.l}")

    def nu(self, i: int) -> Fraction:
        """``(alpha_i, alpha_i)`` under the normalization (1, 1/2, ..., 1/2, 1)."""
        self.check_node(i)
        return Fraction(1) if i in (0, self.l) else Fraction(1, 2)

    def marks(self) -> tuple[int, ...]:
        return (1,) + (2,) * (self.l - 1) + (1,)

    def r_i(self, i: int) -> RingElem:
        return self._scaled(R, "r", i)

    def s_i(self, i: int) -> RingElem:
        return self._scaled(S, "s", i)

    def _scaled(self, base: RingElem, letter: str, i: int) -> RingElem:
        exponent = self.nu(i) if self.ri_mode is RiMode.FULL else self.nu(i) / 2
        try:
            return base.power(exponent)
        except CoefficientError as exc:
            raise CoefficientError(
                f"{letter}_{i} = {letter}^({exponent}) needs a power finer than 1/2"
            ) from exc

    def to_dict(self) -> dict:
        return {"l": self.l, "preset": self.dressing.name, "ri_mode": self.ri_mode.value}


# ---------------------------------------------------------------------------
# Fiber products
# ---------------------------------------------------------------------------


def _fiber_product(
    diagram: Diagram,
    table: ConventionTable,
    node: int,
    l: int,
    keep: Callable[[int], bool] = lambda d: True,
) -> RingElem:
    value = ONE
    for corner in diagram.corners:
        if fold_pi(corner.diagonal, l) == node and keep(corner.diagonal):
            value = value * table.value(corner.kind)
    return value


def folded_gen(kind: GenKind, i: int, alg: FoldedAlgebra) -> LinearOp:
    nu = alg.nu(i)
    l = alg.l

    if kind is GenKind.E:
        table = alg.dressing.e_table

        def kernel(diagram: Diagram) -> FockVector:
            total: dict[Diagram, RingElem] = {}
            for corner in diagram.corners:
                j = corner.diagonal
                if corner.kind is not CornerKind.CONVEX or fold_pi(j, l) != i:
                    continue
                image = diagram.mutate(j, Direction.REMOVE)
                weight = _fiber_product(image, table, i, l, lambda k: k > j).power(nu)
                total[image] = weight
            return FockVector(total, diagram.charge)

        return LinearOp(kernel, f"Efold[{i}]")

    table = alg.dressing.f_table

    def kernel(diagram: Diagram) -> FockVector:
        total: dict[Diagram, RingElem] = {}
        for corner in diagram.corners:
            j = corner.diagonal
            if corner.kind is not CornerKind.CONCAVE or fold_pi(j, l) != i:
                continue
            image = diagram.mutate(j, Direction.ADD)
            total[image] = _fiber_product(diagram, table, i, l, lambda k: k < j).power(nu)
        return FockVector(total, diagram.charge)

    return LinearOp(kernel, f"Ffold[{i}]")


def folded_cartan(i: int, primed: bool, alg: FoldedAlgebra) -> LinearOp:
    nu = alg.nu(i)
    table = alg.dressing.f_table if primed else alg.dressing.e_table

    def eigenvalue(diagram: Diagram) -> RingElem:
        return _fiber_product(diagram, table, i, alg.l).power(nu)

    return diagonal_op(eigenvalue, f"Omp[{i}]" if primed else f"Om[{i}]")


def fiber_tail(k: int, table: ConventionTable, l: int, name: str | None = None) -> LinearOp:
    """Product of corner operators over ``k' > k`` with ``pi(k') = pi(k)`` (no ``nu`` power)."""
    node = fold_pi(k, l)

    def eigenvalue(diagram: Diagram) -> RingElem:
        return _fiber_product(diagram, table, node, l, lambda d: d > k)

    return diagonal_op(eigenvalue, name or f"P[{k};{table}]")


def color_zero_count(diagram: Diagram, l: int) -> int:
    """Boxes ``(k, p)`` with ``p + k`` divisible by ``2l``, counted column by column."""
    period = 2 * l
    return sum(
        (diagram.charge + k) // period - (depth + k) // period
        for k, depth in enumerate(diagram.cols)
    )


def d_ops(alg: FoldedAlgebra, primed: bool) -> LinearOp:
    base = S if primed else R

    def eigenvalue(diagram: Diagram) -> RingElem:
        return base ** color_zero_count(diagram, alg.l)

    return diagonal_op(eigenvalue, "Dp" if primed else "D")


def cartan_bracket(i: int, j: int, l: int) -> RingElem:
    """Entry ``<i, j>`` of the two-parameter quantum Cartan matrix of type C_l^(1)."""
    if l < 2:
        raise ConfigurationError(f"rank l must be at least 2, got {l}")
    if not (0 <= i <= l and 0 <= j <= l):
        raise ConfigurationError(f"Cartan indices ({i}, {j}) outside 0..{l}")
    half_r, half_s = R.power(Fraction(1, 2)), S.power(Fraction(1, 2))
    if i == j:
        return R * S.inverse() if i in (0, l) else half_r * half_s.inverse()
    if (i, j) == (0, l):
        return RS
    if (i, j) == (l, 0):
        return RS.inverse()
    if (i, j) in ((0, 1), (l - 1, l)):
        return R.inverse()
    if (i, j) in ((1, 0), (l, l - 1)):
        return S
    if j == i + 1:
        return half_r.inverse()
    if i == j + 1:
        return half_s
    return ONE


def gamma_ops(alg: FoldedAlgebra) -> tuple[LinearOp, LinearOp]:
    """``gamma = prod Om_i^{mark_i}`` and ``gamma'`` likewise, with marks (1, 2, ..., 2, 1)."""
    marks = alg.marks()
    omegas = [folded_cartan(i, False, alg).eigenvalue for i in alg.nodes]
    omegas_p = [folded_cartan(i, True, alg).eigenvalue for i in alg.nodes]

    def product(factors):
        def eigenvalue(diagram: Diagram) -> RingElem:
            value = ONE
            for mark, fn in zip(marks, factors):
                value = value * fn(diagram) ** mark
            return value

        return eigenvalue

    return diagonal_op(product(omegas), "gamma"), diagonal_op(product(omegas_p), "gammap")


# ---------------------------------------------------------------------------
# Central and vacuum data
# ---------------------------------------------------------------------------


def _rs_exponent(value: RingElem) -> Fraction | None:
    """``c`` when ``value == (rs)^c`` exactly, else ``None``."""
    if not value.is_unit_monomial():
        return None
    (a, b), _ = value.leading()
    if a != b:
        return None
    return Fraction(a, 2)


def _constant_on(op: LinearOp, basis: Sequence[Diagram]) -> RingElem | None:
    values = {op.eigenvalue(diagram) for diagram in basis}
    return values.pop() if len(values) == 1 else None


def central_report(alg: FoldedAlgebra, basis: Sequence[Diagram]) -> dict:
    """Whether gamma, gamma' and gamma*gamma' act by scalars on ``basis``."""
    gamma, gamma_p = gamma_ops(alg)
    both = diagonal_op(lambda d: gamma.eigenvalue(d) * gamma_p.eigenvalue(d), "gamma*gammap")
    out: dict = {}
    for label, op in (("gamma", gamma), ("gammap", gamma_p), ("gamma_gammap", both)):
        scalar = _constant_on(op, basis)
        entry: dict = {"constant": scalar is not None}
        if scalar is not None:
            entry["scalar"] = str(scalar)
        out[label] = entry
    scalar = _constant_on(both, basis)
    exponent = _rs_exponent(scalar) if scalar is not None else None
    out["gamma_gammap"]["rs_exponent"] = None if exponent is None else str(exponent)
    return out


def vacuum_report(alg: FoldedAlgebra, charge: int) -> dict:
    vacuum = Diagram.vacuum(charge)
    return {
        "diagram": str(vacuum),
        "Om": [str(folded_cartan(i, False, alg).eigenvalue(vacuum)) for i in alg.nodes],
        "Omp": [str(folded_cartan(i, True, alg).eigenvalue(vacuum)) for i in alg.nodes],
        "weight": list(color_counts(vacuum, alg.l)),
    }


# ---------------------------------------------------------------------------
# Relations
# ---------------------------------------------------------------------------


def _unrepresentable(name: str, indices, exc: CoefficientError) -> Relation:
    return Relation(name, (), tuple(indices), reason=exc.message)


def _comm(name: str, indices, x: Symbol, y: Symbol) -> Relation:
    return make_relation(name, indices, (1, [x, y]), (-1, [y, x]))


def _conj(name: str, indices, x: Symbol, g: Symbol, scalar: RingElem) -> Relation:
    """``x g x^-1 = scalar g`` cleared to ``x g - scalar g x``."""
    return make_relation(name, indices, (1, [x, g]), (-scalar, [g, x]))


def _diagonal_block(alg: FoldedAlgebra) -> list[Relation]:
    nodes = alg.nodes
    om = [sym("Om", i) for i in nodes]
    omp = [sym("Omp", i) for i in nodes]
    d, dp = sym("D"), sym("Dp")
    rels: list[Relation] = []
    for x in [*om, *omp, d, dp]:
        indices = () if x.index is None else (x.index,)
        rels.append(make_relation(f"C1inv_{x.kind}", indices, (1, [x, inv(x)]), (-1, [])))
    for i in nodes:
        for j in nodes:
            if i < j:
                rels.append(_comm("C1_Om_Om", (i, j), om[i], om[j]))
                rels.append(_comm("C1_Omp_Omp", (i, j), omp[i], omp[j]))
            rels.append(_comm("C1_Om_Omp", (i, j), om[i], omp[j]))
        rels.append(_comm("C1_Om_D", (i,), om[i], d))
        rels.append(_comm("C1_Omp_D", (i,), omp[i], d))
        rels.append(_comm("C1_Om_Dp", (i,), om[i], dp))
        rels.append(_comm("C1_Omp_Dp", (i,), omp[i], dp))
    rels.append(_comm("C1_D_Dp", (), d, dp))
    for central in (sym("gamma"), sym("gammap")):
        for i in nodes:
            rels.append(_comm(f"C1_{central.kind}_E", (i,), central, sym("Efold", i)))
            rels.append(_comm(f"C1_{central.kind}_F", (i,), central, sym("Ffold", i)))
    return rels


def _conjugation_block(alg: FoldedAlgebra) -> list[Relation]:
    l = alg.l
    rels: list[Relation] = []
    for i in alg.nodes:
        e, f = sym("Efold", i), sym("Ffold", i)
        r0, s0 = (alg.r_i(0), alg.s_i(0)) if i == 0 else (ONE, ONE)
        rels.append(_conj("C2_D_E", (i,), sym("D"), e, r0))
        rels.append(_conj("C2_D_F", (i,), sym("D"), f, r0.inverse()))
        rels.append(_conj("C3_Dp_E", (i,), sym("Dp"), e, s0))
        rels.append(_conj("C3_Dp_F", (i,), sym("Dp"), f, s0.inverse()))
        for j in alg.nodes:
            om, omp = sym("Om", j), sym("Omp", j)
            rels.append(_conj("C2_Om_E", (i, j), om, e, cartan_bracket(i, j, l)))
            rels.append(_conj("C2_Om_F", (i, j), om, f, cartan_bracket(j, i, l).inverse()))
            rels.append(_conj("C3_Omp_E", (i, j), omp, e, cartan_bracket(i, j, l).inverse()))
            rels.append(_conj("C3_Omp_F", (i, j), omp, f, cartan_bracket(j, i, l)))
    return rels


def _c4_block(alg: FoldedAlgebra) -> list[Relation]:
    """``(r_i - s_i)[E_i, F_i] - (Om_i - Omp_i)``; the bare commutator off the diagonal."""
    rels: list[Relation] = []
    for i in alg.nodes:
        e = sym("Efold", i)
        for j in alg.nodes:
            f = sym("Ffold", j)
            if i != j:
                rels.append(_comm("C4", (i, j), e, f))
                continue
            try:
                scale = alg.r_i(i) - alg.s_i(i)
            except CoefficientError as exc:
                rels.append(_unrepresentable("C4", (i, j), exc))
                continue
            rels.append(make_relation(
                "C4", (i, j),
                (scale, [e, f]), (-scale, [f, e]), (-1, [sym("Om", i)]), (1, [sym("Omp", i)]),
            ))
    return rels


def _c5_block(alg: FoldedAlgebra) -> list[Relation]:
    l = alg.l
    rels: list[Relation] = []
    for i in alg.nodes:
        for j in alg.nodes:
            if j - i > 1 and (i, j) != (0, l):
                rels.append(_comm("C5_E", (i, j), sym("Efold", i), sym("Efold", j)))
                rels.append(_comm("C5_F", (i, j), sym("Ffold", i), sym("Ffold", j)))
    e0, el = sym("Efold", 0), sym("Efold", l)
    f0, fl = sym("Ffold", 0), sym("Ffold", l)
    rels.append(make_relation("C5_E_l0", (l, 0), (1, [el, e0]), (-RS, [e0, el])))
    rels.append(make_relation("C5_F_0l", (0, l), (1, [f0, fl]), (-RS, [fl, f0])))
    return rels


def _quadratic_serre(name, indices, x, y, plus: RingElem, prod: RingElem) -> Relation:
    """``x^2 y - plus x y x + prod y x^2``."""
    return make_relation(name, indices, (1, [x, x, y]), (-plus, [x, y, x]), (prod, [y, x, x]))


def _cubic_serre(name, indices, x, y, h: RingElem, plus: RingElem) -> Relation:
    """``x^3 y - plus x^2 y x + h plus x y x^2 - h^3 y x^3``."""
    return make_relation(
        name,
        indices,
        (1, [x, x, x, y]),
        (-plus, [x, x, y, x]),
        (h * plus, [x, y, x, x]),
        (-(h ** 3), [y, x, x, x]),
    )


def _serre_block(alg: FoldedAlgebra, kind: str) -> list[Relation]:
    """Serre relations for ``Efold`` (C6) or ``Ffold`` (C7, r and s inverted)."""
    l = alg.l
    family = "C6" if kind == "Efold" else "C7"
    flip = (lambda x: x) if kind == "Efold" else (lambda x: x.invert_parameters())
    g = [sym(kind, i) for i in alg.nodes]
    h = R.power(Fraction(1, 2)) * S.power(Fraction(1, 2))
    rels: list[Relation] = []

    rels.append(_quadratic_serre(f"{family}a", (0, 1), g[0], g[1], flip(R + S), flip(RS)))
    rels.append(_quadratic_serre(f"{family}a_plus", (0, 1), g[0], g[1], flip(-(R + S)), flip(RS)))
    for i in range(1, l - 1):
        try:
            ri, si = alg.r_i(i), alg.s_i(i)
            rels.append(_quadratic_serre(f"{family}b", (i, i + 1), g[i], g[i + 1], flip(ri + si), flip(ri * si)))
        except CoefficientError as exc:
            rels.append(_unrepresentable(f"{family}b", (i, i + 1), exc))
        try:
            ri, si = alg.r_i(i + 1).inverse(), alg.s_i(i + 1).inverse()
            rels.append(_quadratic_serre(f"{family}c", (i + 1, i), g[i + 1], g[i], flip(ri + si), flip(ri * si)))
        except CoefficientError as exc:
            rels.append(_unrepresentable(f"{family}c", (i + 1, i), exc))
    rinv, sinv = R.inverse(), S.inverse()
    rels.append(_quadratic_serre(f"{family}d", (l, l - 1), g[l], g[l - 1], flip(rinv + sinv), flip(rinv * sinv)))
    rels.append(_cubic_serre(f"{family}e", (l - 1, l), g[l - 1], g[l], flip(h), flip(R + h + S)))
    hinv = h.inverse()
    rels.append(_cubic_serre(f"{family}f", (1, 0), g[1], g[0], flip(hinv), flip(rinv + hinv + sinv)))
    return rels


# Expected scalar c in ``e[j] P[k] = c P[k] e[j]`` by fiber colors (pi(j), pi(k)) and
# position of j relative to k; "far" means j - k > 2.
TAIL_SCALARS: dict[tuple[int, int, bool], dict[str, RingElem]] = {
    (0, 0, False): {"le": ONE, "gt": R.inverse() * S},
    (0, 0, True): {"le": ONE, "gt": R * S.inverse()},
    (0, 1, False): {"le": ONE, "next": R, "far": R ** 2},
    (0, 1, True): {"le": ONE, "next": S, "far": S ** 2},
    (1, 0, False): {"le": ONE, "next": ONE, "far": S.inverse()},
    (1, 0, True): {"le": ONE, "next": ONE, "far": R.inverse()},
    (1, 1, False): {"le": ONE, "gt": R.inverse() * S},
    (1, 1, True): {"le": ONE, "gt": R * S.inverse()},
}


def _tail_case(j: int, k: int, cases: dict[str, RingElem]) -> str | None:
    if j <= k:
        return "le"
    if "gt" in cases:
        return "gt"
    if j == k + 1:
        return "next"
    if j - k > 2:
        return "far"
    return None


def _tail_block(alg: FoldedAlgebra, window: tuple[int, int]) -> list[Relation]:
    lo, hi = window
    rels: list[Relation] = []
    for (cj, ck, primed), cases in TAIL_SCALARS.items():
        tag = "f" if primed else "e"
        name = f"tail_{cj}{ck}{'p' if primed else ''}"
        for j in range(lo, hi + 1):
            if fold_pi(j, alg.l) != cj:
                continue
            for k in range(lo, hi + 1):
                if fold_pi(k, alg.l) != ck:
                    continue
                case = _tail_case(j, k, cases)
                if case is None:
                    continue
                e, p = sym("e", j), sym("P", k, tag)
                rels.append(make_relation(name, (j, k), (1, [e, p]), (-cases[case], [p, e])))
    return rels


def suite_affine(alg: FoldedAlgebra, window: tuple[int, int] | None = None) -> list[Relation]:
    """Cleared (C1)-(C7) over folded generators plus the fiber-tail commutation identities.

    ``window`` bounds the unfolded indices used by the tail identities.
    """
    rels: list[Relation] = []
    rels += _diagonal_block(alg)
    rels += _conjugation_block(alg)
    rels += _c4_block(alg)
    rels += _c5_block(alg)
    rels += _serre_block(alg, "Efold")
    rels += _serre_block(alg, "Ffold")
    if window is not None:
        rels += _tail_block(alg, window)
    logger.debug("affine suite for %s: %d relations", alg.to_dict(), len(rels))
    return rels


# ---------------------------------------------------------------------------
# One-parameter oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KmmTables:
    """Integer ``t``-exponents of the corner tables at ``r = t^2, s = t^-2``."""

    e_cc: int
    e_cv: int
    f_cc: int
    f_cv: int


KMM_TABLES: dict[str, KmmTables] = {
    "std": KmmTables(2, -2, -2, 2),
    "paper": KmmTables(2, -2, 2, -2),
    "dual": KmmTables(2, -2, 2, -2),
}


def _one_parameter_image(kind: GenKind, i: int, diagram: Diagram, l: int, tables: KmmTables) -> dict[Diagram, TPolynomial]:
    period = 2 * l
    doubled_nu = 2 if i in (0, l) else 1
    n = diagram.charge
    lo = (diagram.cols[0] if diagram.cols else n) - 1
    hi = len(diagram.cols) + n + 1

    def in_fiber(d: int, j: int) -> bool:
        return (d - j) % period == 0 or (d + j) % period == 0

    def statuses(source: Diagram, j: int, above: bool) -> tuple[int, int]:
        concave = convex = 0
        for d in range(lo - 1, hi + 2):
            if d == j or (d > j) != above or not in_fiber(d, j):
                continue
            pair = (source.occupation(d), source.occupation(d + 1))
            if pair == (1, 0):
                concave += 1
            elif pair == (0, 1):
                convex += 1
        return concave, convex

    out: dict[Diagram, TPolynomial] = {}
    for j in range(lo, hi + 1):
        if not in_fiber(j, i):
            continue
        pair = (diagram.occupation(j), diagram.occupation(j + 1))
        if kind is GenKind.E and pair == (0, 1):
            image = diagram.mutate(j, Direction.REMOVE)
            concave, convex = statuses(image, j, above=True)
            doubled = doubled_nu * (tables.e_cc * concave + tables.e_cv * convex)
        elif kind is GenKind.F and pair == (1, 0):
            image = diagram.mutate(j, Direction.ADD)
            concave, convex = statuses(diagram, j, above=False)
            doubled = doubled_nu * (tables.f_cc * concave + tables.f_cv * convex)
        else:
            continue
        if doubled % 2:
            raise CoefficientError(f"one-parameter dressing exponent {doubled}/2 is not integral")
        out[image] = TPolynomial.monomial(doubled // 2)
    return out


@dataclass
class KmmReport:
    checked: int
    mismatch: dict | None = None

    @property
    def equal(self) -> bool:
        return self.mismatch is None

    def to_dict(self) -> dict:
        return {"equal": self.equal, "checked": self.checked, "mismatch": self.mismatch}


def kmm_compare(alg: FoldedAlgebra, basis: Iterable[Diagram], tables: KmmTables | None = None) -> KmmReport:
    """Compare specialized folded operators against the status-count implementation."""
    if tables is None:
        try:
            tables = KMM_TABLES[alg.dressing.name]
        except KeyError:
            raise ConfigurationError(f"no one-parameter tables for preset {alg.dressing.name!r}") from None
    ops = {(kind, i): folded_gen(kind, i, alg) for kind in GenKind for i in alg.nodes}
    checked = 0
    for diagram in basis:
        for (kind, i), op in ops.items():
            two_param = op.on(diagram).specialize()
            one_param = _one_parameter_image(kind, i, diagram, alg.l, tables)
            checked += 1
            if two_param != one_param:
                return KmmReport(checked, {
                    "generator": f"{kind.value}fold[{i}]",
                    "diagram": str(diagram),
                    "two_parameter": {str(d): str(c) for d, c in sorted(two_param.items(), key=lambda x: x[0].sort_key)},
                    "one_parameter": {str(d): str(c) for d, c in sorted(one_param.items(), key=lambda x: x[0].sort_key)},
                })
    logger.debug("one-parameter comparison agreed on %d evaluations", checked)
    return KmmReport(checked)
