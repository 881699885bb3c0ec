"""Exact scalar functions on a coordinate chart.

A Coefficient is a sparse Laurent polynomial over Q in the chart's
coordinates.  Representation: a dict mapping exponent vectors (one signed
int per chart coordinate, as a tuple) to nonzero Fractions.  The zero
polynomial is the empty dict.  Negative exponents are allowed only for
coordinates the chart flags as nonvanishing; everything else is ordinary
polynomial data.  No floats anywhere.

Coefficients are immutable by convention: all operations return new
objects and nothing mutates `terms` after construction.

The textual form is `3/2*s0*y^2 - 1*z^-1`: terms joined by signs, each
term a rational prefix followed by `name^exponent` factors with the names
in lexicographic order.  The same token stream and precedence are used by
the CLI expression language, where `^` doubles as the wedge; on scalars
both readings agree because `name^int` is parsed as an integer power.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, ParseError, StructuralError

__all__ = [
    "Chart",
    "Coefficient",
    "parse_coefficient",
    "format_coefficient",
    "tokenize",
    "Token",
]

_NAME_OK = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")


@dataclass(frozen=True)
class Chart:
    """An ordered family of coordinate names, some flagged nonvanishing.

    The nonvanishing flag is what licenses negative exponents (Laurent
    directions) for that coordinate in every Coefficient on the chart.
    """

    coordinates: tuple[str, ...]
    nonvanishing: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.coordinates:
            raise StructuralError("a chart needs at least one coordinate")
        if len(set(self.coordinates)) != len(self.coordinates):
            raise StructuralError(f"duplicate coordinate names in {self.coordinates}")
        for name in self.coordinates:
            if not name or name[0].isdigit() or not set(name) <= _NAME_OK:
                raise StructuralError(f"bad coordinate name {name!r}")
        extra = set(self.nonvanishing) - set(self.coordinates)
        if extra:
            raise StructuralError(f"nonvanishing flags for unknown coordinates {sorted(extra)}")

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    def index(self, name: str) -> int:
        try:
            return self.coordinates.index(name)
        except ValueError:
            raise StructuralError(f"coordinate {name!r} not on chart {self.coordinates}") from None

    def extend(self, name: str, nonvanishing: bool = False) -> "Chart":
        """New chart with one appended coordinate."""
        flags = set(self.nonvanishing) | ({name} if nonvanishing else set())
        return Chart(self.coordinates + (name,), frozenset(flags))


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise StructuralError(f"expected an exact rational, got {type(value).__name__}")


class Coefficient:
    """Sparse exact Laurent polynomial attached to a chart."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms: Mapping[tuple[int, ...], Fraction] | None = None):
        clean: dict[tuple[int, ...], Fraction] = {}
        for expo, coeff in (terms or {}).items():
            coeff = _as_fraction(coeff)
            if coeff == 0:
                continue
            if len(expo) != chart.dimension:
                raise StructuralError(
                    f"exponent vector {expo} has length {len(expo)}, chart has {chart.dimension}"
                )
            for k, name in zip(expo, chart.coordinates):
                if k < 0 and name not in chart.nonvanishing:
                    raise DomainError(
                        f"negative exponent on {name!r}, which is not flagged nonvanishing"
                    )
            clean[tuple(expo)] = coeff
        self.chart = chart
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(chart: Chart) -> "Coefficient":
        return Coefficient(chart, {})

    @staticmethod
    def constant(chart: Chart, value) -> "Coefficient":
        return Coefficient(chart, {(0,) * chart.dimension: _as_fraction(value)})

    @staticmethod
    def one(chart: Chart) -> "Coefficient":
        return Coefficient.constant(chart, 1)

    @staticmethod
    def coordinate(chart: Chart, name: str, power: int = 1) -> "Coefficient":
        expo = [0] * chart.dimension
        expo[chart.index(name)] = power
        return Coefficient(chart, {tuple(expo): Fraction(1)})

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(k == 0 for k in expo) for expo in self.terms)

    def constant_value(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_constant():
            raise DomainError(f"{self} is not a constant")
        return next(iter(self.terms.values()))

    def is_unit(self) -> bool:
        """True when invertible in the ring: a single term supported on
        nonvanishing coordinates only."""
        if len(self.terms) != 1:
            return False
        expo = next(iter(self.terms))
        return all(
            k == 0 or name in self.chart.nonvanishing
            for k, name in zip(expo, self.chart.coordinates)
        )

    def unit_inverse(self) -> "Coefficient":
        if not self.is_unit():
            raise DomainError(f"{self} is not a unit of the Laurent ring")
        expo, coeff = next(iter(self.terms.items()))
        return Coefficient(self.chart, {tuple(-k for k in expo): Fraction(1) / coeff})

    def depends_on(self, name: str) -> bool:
        i = self.chart.index(name)
        return any(expo[i] != 0 for expo in self.terms)

    def support(self) -> set[str]:
        names = set()
        for expo in self.terms:
            for k, name in zip(expo, self.chart.coordinates):
                if k != 0:
                    names.add(name)
        return names

    def max_degree(self) -> int:
        """Largest total degree over the terms (sum of positive parts)."""
        return max((sum(k for k in expo if k > 0) for expo in self.terms), default=0)

    # -- arithmetic --------------------------------------------------------

    def _check_mate(self, other: "Coefficient"):
        if self.chart != other.chart:
            raise StructuralError("coefficients live on different charts")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Coefficient.constant(self.chart, other)
        if not isinstance(other, Coefficient):
            return NotImplemented
        self._check_mate(other)
        terms = dict(self.terms)
        for expo, coeff in other.terms.items():
            acc = terms.get(expo, Fraction(0)) + coeff
            if acc == 0:
                terms.pop(expo, None)
            else:
                terms[expo] = acc
        return Coefficient(self.chart, terms)

    __radd__ = __add__

    def __neg__(self):
        return Coefficient(self.chart, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Coefficient.constant(self.chart, other)
        if not isinstance(other, Coefficient):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Coefficient):
            return NotImplemented
        self._check_mate(other)
        terms: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                expo = tuple(a + b for a, b in zip(e1, e2))
                acc = terms.get(expo, Fraction(0)) + c1 * c2
                if acc == 0:
                    terms.pop(expo, None)
                else:
                    terms[expo] = acc
        return Coefficient(self.chart, terms)

    __rmul__ = __mul__

    def scale(self, value) -> "Coefficient":
        value = _as_fraction(value)
        if value == 0:
            return Coefficient.zero(self.chart)
        return Coefficient(self.chart, {e: c * value for e, c in self.terms.items()})

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n == 0:
            return Coefficient.one(self.chart)
        if n < 0:
            return self.unit_inverse() ** (-n)
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    def __eq__(self, other):
        return (
            isinstance(other, Coefficient)
            and self.chart == other.chart
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.chart, frozenset(self.terms.items())))

    # -- calculus ----------------------------------------------------------

    def partial(self, name: str) -> "Coefficient":
        """Exact partial derivative; Laurent terms differentiate termwise."""
        i = self.chart.index(name)
        terms: dict[tuple[int, ...], Fraction] = {}
        for expo, coeff in self.terms.items():
            k = expo[i]
            if k == 0:
                continue
            new = list(expo)
            new[i] = k - 1
            key = tuple(new)
            acc = terms.get(key, Fraction(0)) + coeff * k
            if acc == 0:
                terms.pop(key, None)
            else:
                terms[key] = acc
        return Coefficient(self.chart, terms)

    def evaluate(self, point: Mapping[str, Fraction | int]) -> Fraction:
        """Evaluate at a rational point; every chart coordinate must be
        assigned, and nonvanishing coordinates must be nonzero."""
        values = []
        for name in self.chart.coordinates:
            if name not in point:
                raise StructuralError(f"no value supplied for coordinate {name!r}")
            v = _as_fraction(point[name])
            if v == 0 and name in self.chart.nonvanishing:
                raise DomainError(f"coordinate {name!r} is nonvanishing but got 0")
            values.append(v)
        unknown = set(point) - set(self.chart.coordinates)
        if unknown:
            raise StructuralError(f"values supplied for unknown coordinates {sorted(unknown)}")
        total = Fraction(0)
        for expo, coeff in self.terms.items():
            acc = coeff
            for v, k in zip(values, expo):
                if k == 0:
                    continue
                if v == 0 and k < 0:
                    raise DomainError("division by zero while evaluating a Laurent term")
                acc *= v**k
            total += acc
        return total

    def substitute(self, images: Mapping[str, "Coefficient"], target: Chart) -> "Coefficient":
        """Ring morphism: replace every coordinate by its image (a
        Coefficient on `target`).  Negative powers require the image to be
        a unit."""
        out = Coefficient.zero(target)
        cache: dict[tuple[int, int], Coefficient] = {}

        def power(i: int, k: int) -> Coefficient:
            if (i, k) not in cache:
                name = self.chart.coordinates[i]
                if name not in images:
                    raise StructuralError(f"no substitution image for coordinate {name!r}")
                cache[(i, k)] = images[name] ** k
            return cache[(i, k)]

        for expo, coeff in self.terms.items():
            term = Coefficient.constant(target, coeff)
            for i, k in enumerate(expo):
                if k != 0:
                    term = term * power(i, k)
            out = out + term
        return out

    def rename_chart(self, target: Chart, mapping: Mapping[str, str] | None = None) -> "Coefficient":
        """Reinterpret on `target`, coordinate names mapped by `mapping`
        (default: same names).  Purely positional re-indexing."""
        mapping = mapping or {}
        terms: dict[tuple[int, ...], Fraction] = {}
        positions: dict[int, int] = {}

        def position(i: int) -> int:
            if i not in positions:
                name = self.chart.coordinates[i]
                positions[i] = target.index(mapping.get(name, name))
            return positions[i]

        for expo, coeff in self.terms.items():
            new = [0] * target.dimension
            for i, k in enumerate(expo):
                if k != 0:
                    new[position(i)] += k
            key = tuple(new)
            acc = terms.get(key, Fraction(0)) + coeff
            if acc == 0:
                terms.pop(key, None)
            else:
                terms[key] = acc
        return Coefficient(target, terms)

    # -- display -----------------------------------------------------------

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Canonical term order: exponents read along lexicographically
        sorted coordinate names, larger vectors first."""
        order = sorted(range(self.chart.dimension), key=lambda i: self.chart.coordinates[i])

        def key(item):
            expo, _ = item
            return tuple(-expo[i] for i in order)

        return sorted(self.terms.items(), key=key)

    def __repr__(self):
        return f"Coefficient({format_coefficient(self)!r})"

    def __str__(self):
        return format_coefficient(self)


# ---------------------------------------------------------------------------
# shared tokenizer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # NUMBER NAME OP END
    text: str
    line: int
    column: int
    value: Fraction | None = None


_OPS = {"+", "-", "*", "^", "(", ")", ",", "="}


def tokenize(text: str) -> list[Token]:
    """Token stream shared by the scalar grammar and the CLI expression
    language.  Numbers are integers or integer ratios like 3/2 (no spaces
    around the slash); names are identifiers."""
    tokens: list[Token] = []
    line, col = 1, 0
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 0
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        start_col = col
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            num = int(text[i:j])
            den = 1
            if j < len(text) and text[j] == "/" and j + 1 < len(text) and text[j + 1].isdigit():
                j += 1
                k = j
                while k < len(text) and text[k].isdigit():
                    k += 1
                den = int(text[j:k])
                if den == 0:
                    raise ParseError("zero denominator in numeric literal", line, start_col)
                j = k
            tokens.append(Token("NUMBER", text[i:j], line, start_col, Fraction(num, den)))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("NAME", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch in _OPS:
            tokens.append(Token("OP", ch, line, start_col))
            col += 1
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, start_col)
    tokens.append(Token("END", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# scalar parser (the Coefficient textual form)
# ---------------------------------------------------------------------------


class _ScalarParser:
    def __init__(self, chart: Chart, tokens: list[Token]):
        self.chart = chart
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def take(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind != "OP" or tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.line, tok.column)
        return self.take()

    def parse(self) -> Coefficient:
        value = self.expr()
        tok = self.peek()
        if tok.kind != "END":
            raise ParseError(f"trailing input starting at {tok.text!r}", tok.line, tok.column)
        return value

    def expr(self) -> Coefficient:
        negate = False
        tok = self.peek()
        if tok.kind == "OP" and tok.text in {"+", "-"}:
            self.take()
            negate = tok.text == "-"
        value = self.term()
        if negate:
            value = -value
        while True:
            tok = self.peek()
            if tok.kind == "OP" and tok.text in {"+", "-"}:
                self.take()
                rhs = self.term()
                value = value + rhs if tok.text == "+" else value - rhs
            else:
                return value

    def term(self) -> Coefficient:
        value = self.atom()
        while True:
            tok = self.peek()
            if tok.kind == "OP" and tok.text == "*":
                self.take()
                value = value * self.atom()
            else:
                return value

    def atom(self) -> Coefficient:
        tok = self.take()
        if tok.kind == "NUMBER":
            base = Coefficient.constant(self.chart, tok.value)
        elif tok.kind == "NAME":
            if tok.text not in self.chart.coordinates:
                raise ParseError(f"unknown coordinate {tok.text!r}", tok.line, tok.column)
            base = Coefficient.coordinate(self.chart, tok.text)
        elif tok.kind == "OP" and tok.text == "(":
            base = self.expr()
            self.expect_op(")")
        else:
            raise ParseError(
                f"expected a number, coordinate or '(', found {tok.text or 'end of input'!r}",
                tok.line,
                tok.column,
            )
        nxt = self.peek()
        if nxt.kind == "OP" and nxt.text == "^":
            self.take()
            power = self.signed_int()
            base = base**power
        return base

    def signed_int(self) -> int:
        sign = 1
        tok = self.take()
        if tok.kind == "OP" and tok.text in {"+", "-"}:
            sign = -1 if tok.text == "-" else 1
            tok = self.take()
        if tok.kind != "NUMBER" or tok.value.denominator != 1:
            raise ParseError("exponent must be an integer", tok.line, tok.column)
        return sign * int(tok.value)


def parse_coefficient(chart: Chart, text: str) -> Coefficient:
    """Parse the textual scalar form, e.g. ``3/2*s0*y^2 - 1*z^-1``."""
    return _ScalarParser(chart, tokenize(text)).parse()


def _format_rational(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def format_monomial(chart: Chart, expo: tuple[int, ...]) -> str:
    names = sorted(
        (name, k) for name, k in zip(chart.coordinates, expo) if k != 0
    )
    parts = [name if k == 1 else f"{name}^{k}" for name, k in names]
    return "*".join(parts)


def format_coefficient(c: Coefficient, elide_unit: bool = False) -> str:
    """Canonical text.  With ``elide_unit`` a ±1 rational prefix in front
    of a nontrivial monomial is dropped (used when coefficients are
    embedded in rendered forms)."""
    if c.is_zero():
        return "0"
    pieces: list[str] = []
    for i, (expo, coeff) in enumerate(c.sorted_terms()):
        mono = format_monomial(c.chart, expo)
        mag = abs(coeff)
        if not mono:
            body = _format_rational(mag)
        elif elide_unit and mag == 1:
            body = mono
        else:
            body = f"{_format_rational(mag)}*{mono}"
        if i == 0:
            pieces.append(body if coeff > 0 else f"-{body}")
        else:
            pieces.append(f"{' + ' if coeff > 0 else ' - '}{body}")
    return "".join(pieces)
