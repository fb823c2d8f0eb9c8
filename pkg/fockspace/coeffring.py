"""Exact Laurent polynomials in r^(1/2), s^(1/2) with rational coefficients.

Every element is a finite sum of terms ``c * r^(p) * s^(q)`` where ``p`` and
``q`` are integers or halves.  Exponents are stored doubled, as powers of
``u = r^(1/2)`` and ``v = s^(1/2)``, so the key of ``r^(1/2) s^(-1)`` is
``Monomial(1, -2)``.  Coefficients are :class:`fractions.Fraction`; nothing in
this module ever touches a float.

Canonical text form
-------------------
Terms are sorted by ``(a, b)`` descending and printed as ``c*r^(p)*s^(q)``,
with zero exponents omitted, joined by `` + `` / `` - ``.  The zero element
prints as ``0``.  :func:`ring_parse` accepts that grammar plus whitespace,
parenthesised sub-expressions and integer powers.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Union

from fockspace.errors import CoefficientError, ParseError

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]
Exponent = Union[int, Fraction, str]


class Monomial(NamedTuple):
    a: int  # exponent of u, u^2 = r
    b: int  # exponent of v, v^2 = s


UNIT_MONOMIAL = Monomial(0, 0)


def _doubled(value: Exponent) -> int:
    """Return ``2 * value`` for a half-integer exponent, else raise."""
    try:
        exponent = Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise CoefficientError(f"invalid exponent {value!r}") from exc
    twice = 2 * exponent
    if twice.denominator != 1:
        raise CoefficientError(
            f"exponent {exponent} is not an integer multiple of 1/2"
        )
    return int(twice)


def _render_half(doubled: int) -> str:
    if doubled % 2 == 0:
        return str(doubled // 2)
    return f"{doubled}/2"


# ---------------------------------------------------------------------------
# Two-parameter ring
# ---------------------------------------------------------------------------


class RingElem:
    """Immutable element of Q[r^(±1/2), s^(±1/2)] in normal form."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], Scalar] | None = None) -> None:
        clean: dict[Monomial, Fraction] = {}
        for key, coeff in (terms or {}).items():
            value = Fraction(coeff)
            if value:
                clean[Monomial(*key)] = value
        self._terms = clean
        self._hash: int | None = None

    @classmethod
    def _raw(cls, terms: dict[Monomial, Fraction]) -> "RingElem":
        obj = object.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, value: Scalar) -> "RingElem":
        value = Fraction(value)
        return cls._raw({UNIT_MONOMIAL: value} if value else {})

    @classmethod
    def monomial(cls, r_exp: Exponent = 0, s_exp: Exponent = 0, coeff: Scalar = 1) -> "RingElem":
        coeff = Fraction(coeff)
        if not coeff:
            return ZERO
        return cls._raw({Monomial(_doubled(r_exp), _doubled(s_exp)): coeff})

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self._terms.items(), key=lambda item: item[0], reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        """True for a single term (any nonzero coefficient)."""
        return len(self._terms) == 1

    def is_unit_monomial(self) -> bool:
        """True for ``r^(p) s^(q)`` with coefficient exactly 1."""
        if len(self._terms) != 1:
            return False
        (coeff,) = self._terms.values()
        return coeff == 1

    def leading(self) -> tuple[Monomial, Fraction]:
        if not self._terms:
            raise CoefficientError("the zero element has no leading term")
        return self.sorted_terms()[0]

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    # -- arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other: object) -> "RingElem | None":
        if isinstance(other, RingElem):
            return other
        if isinstance(other, (int, Fraction)):
            return RingElem.constant(other)
        return None

    def __add__(self, other: object) -> "RingElem":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        if not rhs._terms:
            return self
        out = dict(self._terms)
        for key, coeff in rhs._terms.items():
            total = out.get(key, 0) + coeff
            if total:
                out[key] = total
            else:
                out.pop(key, None)
        return RingElem._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "RingElem":
        return RingElem._raw({key: -coeff for key, coeff in self._terms.items()})

    def __sub__(self, other: object) -> "RingElem":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other: object) -> "RingElem":
        lhs = self._coerce(other)
        if lhs is None:
            return NotImplemented
        return lhs - self

    def __mul__(self, other: object) -> "RingElem":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        if not self._terms or not rhs._terms:
            return ZERO
        out: dict[Monomial, Fraction] = {}
        for (a1, b1), c1 in self._terms.items():
            for (a2, b2), c2 in rhs._terms.items():
                key = Monomial(a1 + a2, b1 + b2)
                total = out.get(key, 0) + c1 * c2
                if total:
                    out[key] = total
                else:
                    out.pop(key, None)
        return RingElem._raw(out)

    __rmul__ = __mul__

    def scale(self, factor: Scalar) -> "RingElem":
        factor = Fraction(factor)
        if not factor:
            return ZERO
        return RingElem._raw({key: coeff * factor for key, coeff in self._terms.items()})

    def inverse(self) -> "RingElem":
        """Inverse of a single term; the Laurent ring has no other units."""
        if len(self._terms) != 1:
            raise CoefficientError(f"{self} is not invertible in the Laurent ring")
        ((a, b), coeff), = self._terms.items()
        return RingElem._raw({Monomial(-a, -b): 1 / coeff})

    def __pow__(self, exponent: int) -> "RingElem":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result, base = ONE, self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def power(self, exponent: Scalar) -> "RingElem":
        """Rational power of ``r^(p) s^(q)`` (coefficient 1), e.g. a square root."""
        exponent = Fraction(exponent)
        if exponent.denominator == 1:
            return self ** int(exponent)
        if not self.is_unit_monomial():
            raise CoefficientError(f"cannot take the {exponent} power of {self}")
        ((a, b), _), = self._terms.items()
        na, nb = a * exponent, b * exponent
        if na.denominator != 1 or nb.denominator != 1:
            raise CoefficientError(
                f"{self} raised to {exponent} leaves the half-integer exponent lattice"
            )
        return RingElem._raw({Monomial(int(na), int(nb)): Fraction(1)})

    def substitute(self, u: "RingElem", v: "RingElem") -> "RingElem":
        """Replace ``u = r^(1/2)`` and ``v = s^(1/2)`` by the given monomials."""
        out = ZERO
        for (a, b), coeff in self._terms.items():
            out = out + (u ** a) * (v ** b) * coeff
        return out

    def invert_parameters(self) -> "RingElem":
        """Image under ``r -> r^-1, s -> s^-1``."""
        return RingElem._raw({Monomial(-a, -b): c for (a, b), c in self._terms.items()})

    def specialize(self) -> "TPolynomial":
        out: dict[int, Fraction] = {}
        for (a, b), coeff in self._terms.items():
            total = out.get(a - b, 0) + coeff
            if total:
                out[a - b] = total
            else:
                out.pop(a - b, None)
        return TPolynomial._raw(out)

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self._terms == rhs._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- text ---------------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts: list[str] = []
        for index, ((a, b), coeff) in enumerate(self.sorted_terms()):
            factors = [str(abs(coeff))]
            if a:
                factors.append(f"r^({_render_half(a)})")
            if b:
                factors.append(f"s^({_render_half(b)})")
            body = "*".join(factors)
            if index == 0:
                parts.append(f"-{body}" if coeff < 0 else body)
            else:
                parts.append(f" - {body}" if coeff < 0 else f" + {body}")
        return "".join(parts)

    def __repr__(self) -> str:
        return f"RingElem('{self}')"

    def __reduce__(self):
        return (RingElem, (dict(self._terms),))


ZERO = RingElem._raw({})
ONE = RingElem._raw({UNIT_MONOMIAL: Fraction(1)})
R = RingElem.monomial(1, 0)
S = RingElem.monomial(0, 1)
R_HALF = RingElem.monomial("1/2", 0)
S_HALF = RingElem.monomial(0, "1/2")
RS = R * S


# ---------------------------------------------------------------------------
# One-parameter specialization target
# ---------------------------------------------------------------------------


class TPolynomial:
    """Laurent polynomial in one variable ``t`` (``r -> t^2``, ``s -> t^-2``)."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, Scalar] | None = None) -> None:
        self._terms = {int(k): Fraction(c) for k, c in (terms or {}).items() if Fraction(c)}

    @classmethod
    def _raw(cls, terms: dict[int, Fraction]) -> "TPolynomial":
        obj = object.__new__(cls)
        obj._terms = terms
        return obj

    @classmethod
    def monomial(cls, exponent: int, coeff: Scalar = 1) -> "TPolynomial":
        coeff = Fraction(coeff)
        return cls._raw({exponent: coeff} if coeff else {})

    @property
    def terms(self) -> Mapping[int, Fraction]:
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other: "TPolynomial") -> "TPolynomial":
        if not isinstance(other, TPolynomial):
            return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            total = out.get(k, 0) + c
            if total:
                out[k] = total
            else:
                out.pop(k, None)
        return TPolynomial._raw(out)

    def __neg__(self) -> "TPolynomial":
        return TPolynomial._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "TPolynomial") -> "TPolynomial":
        return self + (-other)

    def __mul__(self, other: "TPolynomial") -> "TPolynomial":
        if not isinstance(other, TPolynomial):
            return NotImplemented
        out: dict[int, Fraction] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                total = out.get(k1 + k2, 0) + c1 * c2
                if total:
                    out[k1 + k2] = total
                else:
                    out.pop(k1 + k2, None)
        return TPolynomial._raw(out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for index, (k, c) in enumerate(sorted(self._terms.items(), reverse=True)):
            body = str(abs(c)) if k == 0 else f"{abs(c)}*t^({k})"
            if index == 0:
                parts.append(f"-{body}" if c < 0 else body)
            else:
                parts.append(f" - {body}" if c < 0 else f" + {body}")
        return "".join(parts)

    def __repr__(self) -> str:
        return f"TPolynomial('{self}')"


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class RingParser:
    """Recursive-descent parser for ring expressions.

    Grammar::

        expr     := [+|-] term (( + | - ) term)*
        term     := factor (* factor)*
        factor   := atom [^ exponent]
        atom     := INT [/ INT] | r | s | ( expr )
        exponent := ( [+|-] INT [/ INT] ) | [+|-] INT

    ``words.RelationParser`` extends :meth:`parse_term` to interleave
    generator symbols with ring factors.
    """

    def __init__(self, text: str, *, offset: int = 0) -> None:
        self.text = text
        self.pos = 0
        self.offset = offset

    # -- scanning -----------------------------------------------------------

    def error(self, message: str) -> ParseError:
        return ParseError(message, position=self.offset + self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def accept(self, token: str) -> bool:
        self.skip_ws()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def expect(self, token: str) -> None:
        if not self.accept(token):
            found = self.peek() or "end of input"
            raise self.error(f"expected {token!r}, found {found!r}")

    def at_end(self) -> bool:
        return self.peek() == ""

    def read_int(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise self.error("expected an integer")
        return int(self.text[start:self.pos])

    def read_rational(self) -> Fraction:
        numerator = self.read_int()
        if self.accept("/"):
            denominator = self.read_int()
            if denominator == 0:
                raise self.error("zero denominator")
            return Fraction(numerator, denominator)
        return Fraction(numerator)

    def read_signed_rational(self) -> Fraction:
        if self.accept("-"):
            return -self.read_rational()
        self.accept("+")
        return self.read_rational()

    # -- grammar ------------------------------------------------------------

    def parse(self) -> RingElem:
        value = self.parse_expr()
        if not self.at_end():
            raise self.error(f"unexpected {self.peek()!r}")
        return value

    def parse_expr(self) -> RingElem:
        negate = False
        if self.accept("-"):
            negate = True
        else:
            self.accept("+")
        value = self.parse_term()
        if negate:
            value = -value
        while True:
            if self.accept("+"):
                value = value + self.parse_term()
            elif self.accept("-"):
                value = value - self.parse_term()
            else:
                return value

    def parse_term(self) -> RingElem:
        value = self.parse_factor()
        while self.accept("*"):
            value = value * self.parse_factor()
        return value

    def parse_factor(self) -> RingElem:
        base = self.parse_atom()
        if self.accept("^"):
            start = self.pos
            exponent = self.parse_exponent()
            try:
                return base.power(exponent)
            except CoefficientError as exc:
                raise ParseError(exc.message, position=self.offset + start) from exc
        return base

    def parse_atom(self) -> RingElem:
        ch = self.peek()
        if ch.isdigit():
            return RingElem.constant(self.read_rational())
        if ch in ("r", "s") and not self._word_continues(self.pos + 1):
            self.pos += 1
            return R if ch == "r" else S
        if self.accept("("):
            value = self.parse_expr()
            self.expect(")")
            return value
        raise self.error(f"unexpected {ch or 'end of input'!r}")

    def parse_exponent(self) -> Fraction:
        if self.accept("("):
            value = self.read_signed_rational()
            self.expect(")")
            return value
        sign = -1 if self.accept("-") else 1
        return sign * Fraction(self.read_int())

    def _word_continues(self, index: int) -> bool:
        return index < len(self.text) and (self.text[index].isalnum() or self.text[index] in "_[")


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def ring_make(terms: Iterable[tuple[Exponent, Exponent, Scalar]]) -> RingElem:
    """Build an element from ``(r_exp, s_exp, coeff)`` triples; like terms merge."""
    out = ZERO
    for r_exp, s_exp, coeff in terms:
        out = out + RingElem.monomial(r_exp, s_exp, coeff)
    return out


def ring_mul(x: RingElem, y: RingElem) -> RingElem:
    return x * y


def ring_specialize(x: RingElem) -> TPolynomial:
    """Substitute ``u -> t``, ``v -> 1/t`` (so ``r -> t^2``, ``s -> t^-2``)."""
    return x.specialize()


def ring_parse(text: str) -> RingElem:
    return RingParser(text).parse()


def ring_print(x: RingElem) -> str:
    return str(x)
