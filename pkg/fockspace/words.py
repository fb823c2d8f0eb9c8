"""Generator symbols, words, relations and the relation text grammar.

A word is a tuple of symbols read as a composition: ``(e[1], f[0])`` means
``e[1] o f[0]``, so ``f[0]`` acts first.  A relation is a formal sum of
``(coefficient, word)`` terms whose operator value should vanish.

Relation text::

    relation := [+|-] term ((+|-) term)*
    term     := factor (* factor)*
    factor   := ring-factor | symbol [^ INT]
    symbol   := NAME [ '[' INT [';' TAG] ']' ] | inv( symbol )

Ring factors follow :class:`fockspace.coeffring.RingParser`, so
``(r+s)*e[0]*e[1]*e[0]`` and ``r^(-1/2)*Efold[1]`` are both terms.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

from fockspace.coeffring import ONE, RingElem, RingParser
from fockspace.errors import ConfigurationError, ParseError

logger = logging.getLogger(__name__)

GLINF_KINDS = frozenset({"e", "f", "a", "b", "K"})
FOLDED_KINDS = frozenset({"Efold", "Ffold", "Om", "Omp", "D", "Dp", "gamma", "gammap", "P"})
DIAGONAL_KINDS = frozenset({"a", "b", "K", "Om", "Omp", "D", "Dp", "gamma", "gammap", "P"})
INDEXLESS_KINDS = frozenset({"D", "Dp", "gamma", "gammap"})
TABLED_KINDS = frozenset({"K", "P"})


@dataclass(frozen=True)
class Symbol:
    kind: str
    index: int | None = None
    table: str | None = None
    inverse: bool = False

    def __post_init__(self) -> None:
        if self.kind not in GLINF_KINDS | FOLDED_KINDS:
            raise ConfigurationError(f"unknown generator {self.kind!r}")
        if self.kind in INDEXLESS_KINDS:
            if self.index is not None:
                raise ConfigurationError(f"{self.kind} takes no index")
        elif self.index is None:
            raise ConfigurationError(f"{self.kind} needs an index")
        if (self.table is None) == (self.kind in TABLED_KINDS):
            if self.table is None:
                raise ConfigurationError(f"{self.kind} needs a table tag, e.g. {self.kind}[0;std]")
            raise ConfigurationError(f"{self.kind} takes no table tag")
        if self.inverse and self.kind not in DIAGONAL_KINDS:
            raise ConfigurationError(f"{self.kind} is not diagonal and cannot be inverted")

    @property
    def is_diagonal(self) -> bool:
        return self.kind in DIAGONAL_KINDS

    def inverted(self) -> "Symbol":
        return replace(self, inverse=not self.inverse)

    def __str__(self) -> str:
        if self.index is None:
            text = self.kind
        elif self.table is None:
            text = f"{self.kind}[{self.index}]"
        else:
            text = f"{self.kind}[{self.index};{self.table}]"
        return f"inv({text})" if self.inverse else text


Word = tuple[Symbol, ...]
Term = tuple[RingElem, Word]


def sym(kind: str, index: int | None = None, table: str | None = None) -> Symbol:
    return Symbol(kind, index, table)


def inv(symbol: Symbol) -> Symbol:
    return symbol.inverted()


def word_text(word: Word) -> str:
    return "*".join(str(symbol) for symbol in word) if word else "1"


@dataclass(frozen=True)
class Relation:
    """Named, denominator-free relation; ``reason`` marks one the ring cannot express."""

    name: str
    terms: tuple[Term, ...] = ()
    indices: tuple[int, ...] = ()
    reason: str | None = None

    @property
    def label(self) -> str:
        if not self.indices:
            return self.name
        return f"{self.name}({','.join(str(i) for i in self.indices)})"

    @property
    def representable(self) -> bool:
        return self.reason is None

    def symbols(self) -> set[Symbol]:
        return {symbol for _, word in self.terms for symbol in word}

    def substitute(self, mapping: dict[str, str]) -> "Relation":
        """Replace table tags (calibration placeholders) throughout."""
        terms = tuple(
            (coeff, tuple(replace(s, table=mapping.get(s.table, s.table)) if s.table else s for s in word))
            for coeff, word in self.terms
        )
        return replace(self, terms=terms)

    def __str__(self) -> str:
        return relation_text(self)


def relation_text(relation: Relation) -> str:
    parts: list[str] = []
    for coeff, word in relation.terms:
        if not coeff:
            continue
        negative = len(coeff) == 1 and coeff.leading()[1] < 0
        shown = -coeff if negative else coeff
        text = str(shown) if len(shown) == 1 else f"({shown})"
        body = f"{text} * {word_text(word)}" if word else text
        if not parts:
            parts.append(f"-{body}" if negative else body)
        else:
            parts.append(f" - {body}" if negative else f" + {body}")
    return "".join(parts) or "0"


def make_relation(name: str, indices, *terms: tuple[object, list | tuple]) -> Relation:
    """Build a relation from ``(coeff, symbols)`` pairs; ``coeff`` may be an int."""
    built = tuple(
        (coeff if isinstance(coeff, RingElem) else RingElem.constant(coeff), tuple(word))
        for coeff, word in terms
    )
    return Relation(name, built, tuple(indices))


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class RelationParser(RingParser):
    """Parses relation text into ``(coefficient, word)`` terms."""

    def read_name(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        if start == self.pos:
            raise self.error("expected a generator name")
        return self.text[start:self.pos]

    def read_tag(self) -> str:
        self.skip_ws()
        if self.accept("$"):
            return "$" + str(self.read_int())
        return self.read_name()

    def starts_symbol(self) -> bool:
        ch = self.peek()
        if not (ch.isalpha() or ch == "_"):
            return False
        return not (ch in ("r", "s") and not self._word_continues(self.pos + 1))

    def parse_symbol(self) -> Symbol:
        self.skip_ws()
        start = self.pos
        name = self.read_name()
        if name == "inv":
            self.expect("(")
            inner = self.parse_symbol()
            self.expect(")")
            try:
                return inner.inverted()
            except ConfigurationError as exc:
                raise ParseError(exc.message, position=self.offset + start) from exc
        index = table = None
        if self.accept("["):
            sign = -1 if self.accept("-") else 1
            index = sign * self.read_int()
            if self.accept(";"):
                table = self.read_tag()
            self.expect("]")
        try:
            return Symbol(name, index, table)
        except ConfigurationError as exc:
            raise ParseError(exc.message, position=self.offset + start) from exc

    def parse_monomial(self) -> Term:
        coeff = ONE
        word: list[Symbol] = []
        while True:
            if self.starts_symbol():
                symbol = self.parse_symbol()
                repeat = 1
                if self.accept("^"):
                    repeat = self.read_int()
                word.extend([symbol] * repeat)
            else:
                coeff = coeff * self.parse_factor()
            if not self.accept("*"):
                return coeff, tuple(word)

    def parse_terms(self) -> tuple[Term, ...]:
        terms: list[Term] = []
        negate = self.accept("-")
        if not negate:
            self.accept("+")
        while True:
            coeff, word = self.parse_monomial()
            terms.append((-coeff if negate else coeff, word))
            if self.accept("+"):
                negate = False
            elif self.accept("-"):
                negate = True
            else:
                break
        if not self.at_end():
            raise self.error(f"unexpected {self.peek()!r}")
        return tuple(terms)


def relation_parse(text: str, name: str = "adhoc") -> Relation:
    return Relation(name, RelationParser(text).parse_terms())
