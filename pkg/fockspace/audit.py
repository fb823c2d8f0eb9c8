"""Exhaustive relation audits on truncated bases, and convention calibration.

A relation holds when every term, evaluated as an operator word on each basis
diagram, sums to the zero vector.  With one worker a suite is checked relation
by relation in-process.  With more, the basis is cut into one contiguous block
per worker and every (relation, block) pair becomes a pool task.  Results come
back in submission order and each relation keeps the counterexample from its
earliest failing block, so a report never depends on the worker count.
"""

from __future__ import annotations

import json
import logging
import sys
import time
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from multiprocessing import get_context
from typing import Iterable, Mapping, Sequence

from fockspace import __version__
from fockspace.affinec import (
    FoldedAlgebra,
    GenKind,
    central_report,
    d_ops,
    fiber_tail,
    folded_cartan,
    folded_gen,
    gamma_ops,
    vacuum_report,
)
from fockspace.coeffring import R, S, RingElem
from fockspace.config import DEFAULT_BUDGET, AuditConfig
from fockspace.diagram import Diagram, enumerate_diagrams
from fockspace.errors import BudgetExceededError, ConfigurationError, SelfCheckError
from fockspace.fock import Counterexample, FockVector, LinearOp, op_apply, op_inverse
from fockspace.glinf import TABLES, ConventionTable, EpsKind, corner_diag, e_inf, eps_diag, f_inf
from fockspace.words import Relation, Symbol, Term, Word, make_relation, sym

logger = logging.getLogger(__name__)

PLACEHOLDER_PREFIX = "$"
DEFAULT_SLOTS = ("$0", "$1")


class Status(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNREPRESENTABLE = "unrepresentable"


# ---------------------------------------------------------------------------
# Symbol resolution
# ---------------------------------------------------------------------------


class OperatorResolver:
    """Turns generator symbols into operators, caching one operator per symbol.

    Table tags resolve against the named tables (``std``, ``std_dual``,
    ``paper_w``, ``paper_wp``), the algebra's dressing tables (``e``, ``f``)
    and any extra tables passed in, which is how calibration placeholders
    ``$0``, ``$1`` are bound.
    """

    def __init__(
        self,
        algebra: FoldedAlgebra | None = None,
        tables: Mapping[str, ConventionTable] | None = None,
    ) -> None:
        self.algebra = algebra
        self._tables: dict[str, ConventionTable] = dict(TABLES)
        if algebra is not None:
            self._tables["e"] = algebra.dressing.e_table
            self._tables["f"] = algebra.dressing.f_table
        self._tables.update(tables or {})
        self._cache: dict[Symbol, LinearOp] = {}
        self._bound: dict[Symbol, LinearOp] = {}
        self._gamma: tuple[LinearOp, LinearOp] | None = None

    @classmethod
    def for_config(cls, cfg: AuditConfig) -> "OperatorResolver":
        return cls(cfg.algebra())

    def bind(self, tables: Mapping[str, ConventionTable]) -> None:
        """(Re)assign placeholder tables; operators built from them are dropped."""
        self._tables.update(tables)
        self._bound.clear()

    def table(self, tag: str) -> ConventionTable:
        try:
            return self._tables[tag]
        except KeyError:
            raise ConfigurationError(f"unknown table tag {tag!r}") from None

    def resolve(self, symbol: Symbol) -> LinearOp:
        placeholder = symbol.table is not None and symbol.table.startswith(PLACEHOLDER_PREFIX)
        cache = self._bound if placeholder else self._cache
        try:
            return cache[symbol]
        except KeyError:
            pass
        if symbol.inverse:
            op = op_inverse(self.resolve(symbol.inverted()))
        else:
            op = self._build(symbol)
        cache[symbol] = op
        return op

    def _require_algebra(self, symbol: Symbol) -> FoldedAlgebra:
        if self.algebra is None:
            raise ConfigurationError(f"{symbol} needs a folded algebra; pass --l")
        return self.algebra

    def _build(self, symbol: Symbol) -> LinearOp:
        kind, i = symbol.kind, symbol.index
        if kind == "e":
            return e_inf(i)
        if kind == "f":
            return f_inf(i)
        if kind in ("a", "b"):
            return eps_diag(i, EpsKind(kind))
        if kind == "K":
            return corner_diag(i, self.table(symbol.table), name=str(symbol))

        alg = self._require_algebra(symbol)
        if kind == "Efold":
            return folded_gen(GenKind.E, i, alg)
        if kind == "Ffold":
            return folded_gen(GenKind.F, i, alg)
        if kind in ("Om", "Omp"):
            alg.check_node(i)
            return folded_cartan(i, kind == "Omp", alg)
        if kind in ("D", "Dp"):
            return d_ops(alg, kind == "Dp")
        if kind in ("gamma", "gammap"):
            if self._gamma is None:
                self._gamma = gamma_ops(alg)
            return self._gamma[kind == "gammap"]
        if kind == "P":
            return fiber_tail(i, self.table(symbol.table), alg.l, name=str(symbol))
        raise ConfigurationError(f"cannot resolve generator {symbol}")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def evaluate_word(word: Word, diagram: Diagram, resolver: OperatorResolver) -> FockVector:
    """Apply ``word`` to ``[diagram]``, rightmost symbol first."""
    vector = FockVector.basis(diagram)
    for symbol in reversed(word):
        vector = op_apply(resolver.resolve(symbol), vector)
        if not vector:
            break
    return vector


def _evaluate_terms(terms: Iterable[Term], diagram: Diagram, resolver: OperatorResolver) -> FockVector:
    total = FockVector.zero(diagram.charge)
    for coeff, word in terms:
        total = total + evaluate_word(word, diagram, resolver).scale(coeff)
    return total


def evaluate_relation(rel: Relation, diagram: Diagram, resolver: OperatorResolver) -> FockVector:
    return _evaluate_terms(rel.terms, diagram, resolver)


@dataclass
class RelationResult:
    relation: str
    indices: tuple[int, ...]
    status: Status
    counterexample: Counterexample | None = None
    reason: str | None = None

    def to_dict(self) -> dict:
        out: dict = {"relation": self.relation, "indices": list(self.indices), "status": self.status.value}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample.to_dict()
        if self.reason is not None:
            out["reason"] = self.reason
        return out


def _first_counterexample(
    rel: Relation, resolver: OperatorResolver, diagrams: Iterable[Diagram]
) -> Counterexample | None:
    for symbol in rel.symbols():
        resolver.resolve(symbol)
    for diagram in diagrams:
        residual = evaluate_relation(rel, diagram, resolver)
        if residual:
            logger.debug("%s fails on %s", rel.label, diagram)
            return Counterexample(diagram, residual)
    return None


def _result(rel: Relation, counterexample: Counterexample | None) -> RelationResult:
    if not rel.representable:
        return RelationResult(rel.name, rel.indices, Status.UNREPRESENTABLE, reason=rel.reason)
    if counterexample is not None:
        return RelationResult(rel.name, rel.indices, Status.FAILS, counterexample)
    return RelationResult(rel.name, rel.indices, Status.HOLDS)


def _check(rel: Relation, resolver: OperatorResolver, basis: Sequence[Diagram]) -> RelationResult:
    if not rel.representable:
        return _result(rel, None)
    return _result(rel, _first_counterexample(rel, resolver, basis))


def check_relation(
    rel: Relation,
    cfg: AuditConfig,
    resolver: OperatorResolver | None = None,
) -> RelationResult:
    """Evaluate ``rel`` on every basis diagram; the first nonzero residual is the counterexample."""
    return _check(rel, resolver or OperatorResolver.for_config(cfg), cfg.basis())


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


@dataclass
class AuditReport:
    suite: str
    config: dict
    results: list[RelationResult] = field(default_factory=list)
    central: dict | None = None
    vacuum: dict | None = None
    seconds: float = 0.0
    version: str = __version__

    def failures(self) -> list[RelationResult]:
        return [result for result in self.results if result.status is Status.FAILS]

    def counts(self) -> dict[str, int]:
        out = {status.value: 0 for status in Status}
        for result in self.results:
            out[result.status.value] += 1
        return out

    @property
    def exit_code(self) -> int:
        return 1 if self.failures() else 0

    def to_dict(self, include_meta: bool = True) -> dict:
        out: dict = {
            "suite": self.suite,
            "config": self.config,
            "results": [result.to_dict() for result in self.results],
        }
        if self.central is not None:
            out["central"] = self.central
        if self.vacuum is not None:
            out["vacuum"] = self.vacuum
        if include_meta:
            out["meta"] = {"version": self.version, "seconds": round(self.seconds, 3)}
        return out

    def to_json(self, include_meta: bool = True) -> str:
        return json.dumps(self.to_dict(include_meta), indent=2) + "\n"


_WORKER: dict = {}


def _init_worker(cfg: AuditConfig, suite: Sequence[Relation]) -> None:
    _WORKER["resolver"] = OperatorResolver.for_config(cfg)
    _WORKER["basis"] = cfg.basis()
    _WORKER["suite"] = suite


def _check_in_worker(task: tuple[int, int, int]) -> tuple[int, Counterexample | None]:
    index, lo, hi = task
    rel = _WORKER["suite"][index]
    return index, _first_counterexample(rel, _WORKER["resolver"], _WORKER["basis"][lo:hi])


def basis_blocks(size: int, workers: int) -> list[tuple[int, int]]:
    """Split ``range(size)`` into at most ``workers`` contiguous ``(lo, hi)`` slices."""
    step = max(1, -(-size // workers))
    return [(lo, min(lo + step, size)) for lo in range(0, size, step)]


def _check_all(suite: Sequence[Relation], cfg: AuditConfig) -> list[RelationResult]:
    basis = cfg.basis()
    if cfg.workers == 1:
        resolver = OperatorResolver.for_config(cfg)
        return [_check(rel, resolver, basis) for rel in suite]

    blocks = basis_blocks(len(basis), cfg.workers)
    tasks = [(index, lo, hi) for index, rel in enumerate(suite) if rel.representable for lo, hi in blocks]
    found: dict[int, Counterexample] = {}
    if tasks:
        ctx = get_context("fork") if sys.platform == "darwin" else get_context()
        chunksize = max(1, len(tasks) // (cfg.workers * 8))
        logger.debug(
            "checking %d relations as %d (relation, block) tasks on %d workers (chunksize %d)",
            len(suite), len(tasks), cfg.workers, chunksize,
        )
        with ctx.Pool(processes=cfg.workers, initializer=_init_worker, initargs=(cfg, list(suite))) as pool:
            # tasks of one relation arrive in block order, so the first hit is the earliest diagram
            for index, counterexample in pool.imap(_check_in_worker, tasks, chunksize=chunksize):
                if counterexample is not None and index not in found:
                    found[index] = counterexample
    return [_result(rel, found.get(index)) for index, rel in enumerate(suite)]


def self_check(suite: Sequence[Relation], results: Sequence[RelationResult], cfg: AuditConfig) -> None:
    """Replay every counterexample in-process; a residual that does not reproduce is fatal."""
    resolver = OperatorResolver.for_config(cfg)
    for rel, result in zip(suite, results):
        if result.counterexample is None:
            continue
        replay = evaluate_relation(rel, result.counterexample.diagram, resolver)
        if not replay:
            raise SelfCheckError(
                f"{rel.label}: counterexample {result.counterexample.diagram} replays to zero"
            )
        if replay != result.counterexample.residual:
            raise SelfCheckError(f"{rel.label}: replayed residual differs from the reported one")


def run_suite(
    suite: Sequence[Relation],
    cfg: AuditConfig,
    name: str = "custom",
    with_central: bool = False,
) -> AuditReport:
    """Check every relation in ``suite`` and collect a report.

    ``with_central`` adds the per-charge central-element and vacuum blocks
    (requires ``cfg.l``).
    """
    start = time.perf_counter()
    logger.info("auditing %d relations (suite %s)", len(suite), name)
    results = _check_all(suite, cfg)
    self_check(suite, results, cfg)

    report = AuditReport(name, cfg.echo(), results)
    alg = cfg.algebra()
    if with_central:
        if alg is None:
            raise ConfigurationError("central and vacuum blocks need a folded algebra")
        report.central = {
            str(charge): central_report(alg, enumerate_diagrams(charge, cfg.max_boxes))
            for charge in cfg.charges
        }
        report.vacuum = {str(charge): vacuum_report(alg, charge) for charge in cfg.charges}

    report.seconds = time.perf_counter() - start
    counts = report.counts()
    logger.info(
        "suite %s: %d hold, %d fail, %d unrepresentable in %.2fs",
        name, counts["holds"], counts["fails"], counts["unrepresentable"], report.seconds,
    )
    return report


# ---------------------------------------------------------------------------
# Calibration
# ---------------------------------------------------------------------------


def root_commutator_templates(window: tuple[int, int]) -> list[Relation]:
    """``(r - s)(e_i f_i - f_i e_i) - (K[i;$0] - K[i;$1])`` for ``i`` in the window."""
    lo, hi = window
    scale = R - S
    return [
        make_relation(
            "calib_root",
            (i,),
            (scale, [sym("e", i), sym("f", i)]),
            (-scale, [sym("f", i), sym("e", i)]),
            (-1, [sym("K", i, "$0")]),
            (1, [sym("K", i, "$1")]),
        )
        for i in range(lo, hi + 1)
    ]


TEMPLATES = {"root-commutator": root_commutator_templates}


def grid_tables(grid: Sequence) -> list[ConventionTable]:
    """Every table whose two entries are monomials ``r^a s^b`` with ``a, b`` from ``grid``."""
    monomials = [RingElem.monomial(a, b) for a in grid for b in grid]
    return [ConventionTable(cc, cv) for cc in monomials for cv in monomials]


def _placeholders(templates: Iterable[Relation]) -> list[str]:
    found = {
        symbol.table
        for rel in templates
        for symbol in rel.symbols()
        if symbol.table and symbol.table.startswith(PLACEHOLDER_PREFIX)
    }
    return sorted(found)


@dataclass
class _Sample:
    diagram: Diagram
    fixed: FockVector
    variable: tuple[Term, ...]


def _build_samples(templates: Sequence[Relation], basis: Sequence[Diagram], resolver: OperatorResolver) -> list[_Sample]:
    samples = []
    for rel in templates:
        if not rel.representable:
            raise ConfigurationError(f"calibration template {rel.label} is not representable")
        fixed_terms, variable = [], []
        for term in rel.terms:
            bound = any(s.table and s.table.startswith(PLACEHOLDER_PREFIX) for s in term[1])
            (variable if bound else fixed_terms).append(term)
        for diagram in basis:
            samples.append(_Sample(diagram, _evaluate_terms(fixed_terms, diagram, resolver), tuple(variable)))
    return samples


def calibrate(
    templates: Sequence[Relation],
    grid: Sequence,
    cfg: AuditConfig,
    budget: int = DEFAULT_BUDGET,
    slots: Sequence[str] | None = None,
) -> list[dict[str, ConventionTable]]:
    """Every assignment of grid tables to the placeholder slots under which all templates hold.

    Slots default to the placeholders the templates mention (``$0``, ``$1``
    when they mention none).  Survivors come back in grid order.
    """
    slots = list(slots or _placeholders(templates) or DEFAULT_SLOTS)
    tables = grid_tables(grid)
    count = len(tables) ** len(slots)
    if count > budget:
        raise BudgetExceededError(
            f"calibration would try {count} candidates, over the budget of {budget}", count=count
        )
    logger.info("calibrating %d slot(s) over %d candidates", len(slots), count)

    start = time.perf_counter()
    resolver = OperatorResolver.for_config(cfg)
    samples = _build_samples(templates, cfg.basis(), resolver)
    survivors: list[dict[str, ConventionTable]] = []
    for choice in product(tables, repeat=len(slots)):
        assignment = dict(zip(slots, choice))
        resolver.bind(assignment)
        for position, sample in enumerate(samples):
            total = sample.fixed
            for coeff, word in sample.variable:
                total = total + evaluate_word(word, sample.diagram, resolver).scale(coeff)
            if total:
                # most candidates die on the same sample, so try it first next time
                samples.insert(0, samples.pop(position))
                break
        else:
            survivors.append(assignment)
    logger.info(
        "calibration kept %d of %d candidates in %.2fs",
        len(survivors), count, time.perf_counter() - start,
    )
    return survivors
