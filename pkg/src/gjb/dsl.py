"""Expression language and renderers for the command-line surface.

The grammar (EBNF):

    expr   := ('+' | '-')? term (('+' | '-') term)*
    term   := power ('*' power)*
    power  := factor ('^' factor)*
    factor := FUNC '(' expr (',' expr)* ')'
            | NAME | NUMBER
            | '(' expr ')'
            | '-' factor

with functions ``d`` (exterior derivative), ``i_`` (interior product),
``L_`` (Lie derivative), ``sn`` (Schouten-Nijenhuis bracket), ``jb``
(Jacobi bracket of conformal data), ``cup`` (cup product) and ``psi``
(transport to the homogeneous extension).

``^`` binds tighter than ``*`` so that ``1/2*p0^2`` reads as half the
square of ``p0``; both act as the exterior product on graded operands,
while ``base ^ k`` with an integer literal ``k`` is a power when the base
has degree zero and an iterated wedge otherwise.

Bare names resolve, in order, against session bindings, chart
coordinates, ``d<coordinate>`` (a coordinate differential) and
``e_<coordinate>`` (a coordinate vector field); this matches the textual
form every object in the package renders to, so ``parse`` inverts the
plain renderer.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .coeffring import (
    Chart,
    Coefficient,
    Token,
    format_coefficient,
    parse_coefficient,
    tokenize,
)
from .errors import DegreeError, ParseError, StructuralError
from .exterior import (
    DiffForm,
    MultiVector,
    exterior_derivative,
    interior_product,
    lie_derivative,
    schouten_nijenhuis,
    wedge,
)
from .structures import ConformalData, NFormStructure, cup_product, jacobi_bracket

__all__ = [
    "Node",
    "Num",
    "Ident",
    "Neg",
    "BinOp",
    "Call",
    "parse",
    "free_names",
    "Environment",
    "elaborate",
    "evaluate",
    "render",
    "latex_name",
    "to_json",
    "object_from_json",
    "chart_to_json",
    "chart_from_json",
]


# ---------------------------------------------------------------------------
# abstract syntax
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Node:
    line: int
    column: int


@dataclass(frozen=True)
class Num(Node):
    value: Fraction


@dataclass(frozen=True)
class Ident(Node):
    name: str


@dataclass(frozen=True)
class Neg(Node):
    operand: Node


@dataclass(frozen=True)
class BinOp(Node):
    op: str  # + - * ^
    left: Node
    right: Node


@dataclass(frozen=True)
class Call(Node):
    func: str
    args: tuple[Node, ...]


FUNCTIONS = {"d": 1, "i_": 2, "L_": 2, "sn": 2, "jb": 2, "cup": 2, "psi": 1}


class _Parser:
    def __init__(self, tokens: list[Token]):
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
            raise ParseError(
                f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.line, tok.column
            )
        return self.take()

    def parse(self) -> Node:
        node = self.expr()
        tok = self.peek()
        if tok.kind != "END":
            raise ParseError(f"trailing input starting at {tok.text!r}", tok.line, tok.column)
        return node

    def expr(self) -> Node:
        tok = self.peek()
        negate = False
        if tok.kind == "OP" and tok.text in {"+", "-"}:
            self.take()
            negate = tok.text == "-"
        node = self.term()
        if negate:
            node = Neg(tok.line, tok.column, node)
        while True:
            tok = self.peek()
            if tok.kind == "OP" and tok.text in {"+", "-"}:
                self.take()
                rhs = self.term()
                node = BinOp(tok.line, tok.column, tok.text, node, rhs)
            else:
                return node

    def term(self) -> Node:
        node = self.power()
        while True:
            tok = self.peek()
            if tok.kind == "OP" and tok.text == "*":
                self.take()
                node = BinOp(tok.line, tok.column, "*", node, self.power())
            else:
                return node

    def power(self) -> Node:
        node = self.factor()
        while True:
            tok = self.peek()
            if tok.kind == "OP" and tok.text == "^":
                self.take()
                node = BinOp(tok.line, tok.column, "^", node, self.factor())
            else:
                return node

    def factor(self) -> Node:
        tok = self.take()
        if tok.kind == "NUMBER":
            return Num(tok.line, tok.column, tok.value)
        if tok.kind == "NAME":
            nxt = self.peek()
            if tok.text in FUNCTIONS and nxt.kind == "OP" and nxt.text == "(":
                self.take()
                args = [self.expr()]
                while self.peek().kind == "OP" and self.peek().text == ",":
                    self.take()
                    args.append(self.expr())
                self.expect_op(")")
                arity = FUNCTIONS[tok.text]
                if len(args) != arity:
                    raise ParseError(
                        f"{tok.text} takes {arity} argument{'s' if arity > 1 else ''}, got {len(args)}",
                        tok.line,
                        tok.column,
                    )
                return Call(tok.line, tok.column, tok.text, tuple(args))
            return Ident(tok.line, tok.column, tok.text)
        if tok.kind == "OP" and tok.text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        if tok.kind == "OP" and tok.text == "-":
            return Neg(tok.line, tok.column, self.factor())
        raise ParseError(
            f"expected a name, number or '(', found {tok.text or 'end of input'!r}",
            tok.line,
            tok.column,
        )


def parse(text: str) -> Node:
    """Parse expression text into an abstract syntax tree."""
    return _Parser(tokenize(text)).parse()


def free_names(node: Node) -> set[str]:
    """All bare identifiers appearing in the tree."""
    if isinstance(node, Ident):
        return {node.name}
    if isinstance(node, Neg):
        return free_names(node.operand)
    if isinstance(node, BinOp):
        return free_names(node.left) | free_names(node.right)
    if isinstance(node, Call):
        out: set[str] = set()
        for arg in node.args:
            out |= free_names(arg)
        return out
    return set()


# ---------------------------------------------------------------------------
# elaboration
# ---------------------------------------------------------------------------


Value = object  # Coefficient | DiffForm | MultiVector | ConformalData


@dataclass
class Environment:
    """Everything an expression may refer to.

    ``extension`` is the homogeneous extension used by ``psi`` and is
    built on demand by the command layer.
    """

    chart: Chart
    bindings: Mapping[str, Value] = field(default_factory=dict)
    structure: NFormStructure | None = None
    extension: object | None = None  # symplectization.Symplectization
    warnings: list[str] = field(default_factory=list)

    def warn(self, message: str) -> None:
        if message not in self.warnings:
            self.warnings.append(message)


def _resolve(env: Environment, node: Ident) -> Value:
    name = node.name
    if name in env.bindings:
        return env.bindings[name]
    chart = env.chart
    if name in chart.coordinates:
        return Coefficient.coordinate(chart, name)
    if name.startswith("d") and name[1:] in chart.coordinates:
        return DiffForm.differential(chart, name[1:])
    if name.startswith("e_") and name[2:] in chart.coordinates:
        return MultiVector.basis_vector(chart, name[2:])
    raise ParseError(f"unknown name {name!r}", node.line, node.column)


def _degree_of(value: Value) -> int:
    if isinstance(value, Coefficient):
        return 0
    return value.degree


def _describe(value: Value) -> str:
    if isinstance(value, Coefficient):
        return "scalar"
    if isinstance(value, DiffForm):
        return f"{value.degree}-form"
    if isinstance(value, MultiVector):
        return f"{value.degree}-vector"
    if isinstance(value, ConformalData):
        return f"conformal data of degree {value.degree}"
    return type(value).__name__


def _as_scalar(value: Value) -> Coefficient | None:
    if isinstance(value, Coefficient):
        return value
    if isinstance(value, (DiffForm, MultiVector)) and value.degree == 0:
        return value.scalar()
    return None


def _as_form(env: Environment, value: Value, node: Node) -> DiffForm:
    if isinstance(value, DiffForm):
        return value
    scalar = _as_scalar(value)
    if scalar is not None:
        return DiffForm.from_scalar(scalar)
    raise ParseError(f"expected a form, got a {_describe(value)}", node.line, node.column)


def _as_multivector(env: Environment, value: Value, node: Node) -> MultiVector:
    if isinstance(value, MultiVector):
        return value
    scalar = _as_scalar(value)
    if scalar is not None:
        return MultiVector.from_scalar(scalar)
    raise ParseError(
        f"expected a multivector, got a {_describe(value)}", node.line, node.column
    )


def _as_data(value: Value, node: Node) -> ConformalData:
    if isinstance(value, ConformalData):
        return value
    raise ParseError(
        f"expected conformal data, got a {_describe(value)}", node.line, node.column
    )


def _literal_int(node: Node) -> int | None:
    if isinstance(node, Num) and node.value.denominator == 1:
        return int(node.value)
    if isinstance(node, Neg):
        inner = _literal_int(node.operand)
        return None if inner is None else -inner
    return None


def _add(env: Environment, node: BinOp, left: Value, right: Value) -> Value:
    sign = 1 if node.op == "+" else -1
    if isinstance(left, ConformalData) or isinstance(right, ConformalData):
        a, b = _as_data(left, node.left), _as_data(right, node.right)
        return a + b.scale(sign) if sign < 0 else a + b
    ls, rs = _as_scalar(left), _as_scalar(right)
    if ls is not None and rs is not None:
        return ls + rs if sign > 0 else ls - rs
    if isinstance(left, DiffForm) or isinstance(right, DiffForm):
        a, b = _as_form(env, left, node.left), _as_form(env, right, node.right)
    else:
        a = _as_multivector(env, left, node.left)
        b = _as_multivector(env, right, node.right)
    try:
        return a + b if sign > 0 else a - b
    except DegreeError as err:
        raise ParseError(str(err), node.line, node.column) from err


def _wedge_like(env: Environment, node: BinOp, left: Value, right: Value) -> Value:
    """Shared semantics of ``*`` and graded ``^``: scalars scale, graded
    operands of the same species take their exterior product."""
    ls, rs = _as_scalar(left), _as_scalar(right)
    if ls is not None and rs is not None:
        return ls * rs
    if ls is not None:
        if isinstance(right, ConformalData):
            if ls.is_constant():
                return right.scale(ls.terms.get((0,) * ls.chart.dimension, Fraction(0)))
            raise ParseError(
                "conformal data scales by constants only", node.line, node.column
            )
        return right.scale(ls)
    if rs is not None:
        if isinstance(left, ConformalData):
            if rs.is_constant():
                return left.scale(rs.terms.get((0,) * rs.chart.dimension, Fraction(0)))
            raise ParseError(
                "conformal data scales by constants only", node.line, node.column
            )
        return left.scale(rs)
    if isinstance(left, DiffForm) and isinstance(right, DiffForm):
        product = wedge(left, right)
    elif isinstance(left, MultiVector) and isinstance(right, MultiVector):
        product = wedge(left, right)
    else:
        raise ParseError(
            f"cannot multiply a {_describe(left)} with a {_describe(right)}",
            node.line,
            node.column,
        )
    if product.is_zero() and not left.is_zero() and not right.is_zero():
        env.warn("exterior product vanishes identically (repeated factor)")
    return product


def _power(env: Environment, node: BinOp, left: Value, exponent: int) -> Value:
    scalar = _as_scalar(left)
    if scalar is not None:
        return scalar**exponent
    if isinstance(left, ConformalData):
        raise ParseError("conformal data has no powers", node.line, node.column)
    if exponent < 0:
        raise ParseError(
            f"negative power of a {_describe(left)} is undefined", node.line, node.column
        )
    result: Value = (
        DiffForm.from_scalar(Coefficient.one(left.chart))
        if isinstance(left, DiffForm)
        else MultiVector.from_scalar(Coefficient.one(left.chart))
    )
    for _ in range(exponent):
        result = wedge(result, left)
    if exponent >= 2 and result.is_zero() and not left.is_zero():
        env.warn("exterior product vanishes identically (repeated factor)")
    return result


def elaborate(node: Node, env: Environment) -> Value:
    """Evaluate an abstract syntax tree against an environment."""
    if isinstance(node, Num):
        return Coefficient.constant(env.chart, node.value)
    if isinstance(node, Ident):
        return _resolve(env, node)
    if isinstance(node, Neg):
        value = elaborate(node.operand, env)
        if isinstance(value, ConformalData):
            return value.scale(-1)
        return -value
    if isinstance(node, BinOp):
        if node.op in {"+", "-"}:
            return _add(env, node, elaborate(node.left, env), elaborate(node.right, env))
        left = elaborate(node.left, env)
        if node.op == "^":
            exponent = _literal_int(node.right)
            if exponent is not None and (
                _as_scalar(left) is not None or isinstance(left, (DiffForm, MultiVector))
            ):
                return _power(env, node, left, exponent)
        right = elaborate(node.right, env)
        if node.op == "^":
            rs = _as_scalar(right)
            if rs is not None and rs.is_constant() and _as_scalar(left) is not None:
                value = rs.terms.get((0,) * rs.chart.dimension, Fraction(0))
                if value.denominator != 1:
                    raise ParseError("exponent must be an integer", node.line, node.column)
                return _power(env, node, left, int(value))
        return _wedge_like(env, node, left, right)
    if isinstance(node, Call):
        return _call(env, node)
    raise ParseError("malformed expression tree", node.line, node.column)


def _call(env: Environment, node: Call) -> Value:
    args = [elaborate(arg, env) for arg in node.args]
    if node.func == "d":
        value = args[0]
        scalar = _as_scalar(value)
        if scalar is not None:
            return exterior_derivative(DiffForm.from_scalar(scalar))
        if isinstance(value, DiffForm):
            return exterior_derivative(value)
        raise ParseError(
            f"d applies to forms, got a {_describe(value)}", node.line, node.column
        )
    if node.func == "i_":
        U = _as_multivector(env, args[0], node.args[0])
        omega = _as_form(env, args[1], node.args[1])
        try:
            return interior_product(U, omega)
        except DegreeError as err:
            raise ParseError(str(err), node.line, node.column) from err
    if node.func == "L_":
        U = _as_multivector(env, args[0], node.args[0])
        omega = _as_form(env, args[1], node.args[1])
        return lie_derivative(U, omega)
    if node.func == "sn":
        U = _as_multivector(env, args[0], node.args[0])
        V = _as_multivector(env, args[1], node.args[1])
        return schouten_nijenhuis(U, V)
    if node.func in {"jb", "cup"}:
        a = _as_data(args[0], node.args[0])
        b = _as_data(args[1], node.args[1])
        return jacobi_bracket(a, b) if node.func == "jb" else cup_product(a, b)
    if node.func == "psi":
        data = _as_data(args[0], node.args[0])
        if env.extension is None:
            raise ParseError(
                "psi needs a homogeneous extension in scope (run `symplectize`)",
                node.line,
                node.column,
            )
        from .symplectization import psi_map

        return psi_map(env.extension, data)[0]
    raise ParseError(f"unknown function {node.func!r}", node.line, node.column)


def evaluate(text: str, env: Environment) -> Value:
    """Parse and elaborate in one step."""
    return elaborate(parse(text), env)


# ---------------------------------------------------------------------------
# renderers
# ---------------------------------------------------------------------------


def latex_name(name: str) -> str:
    """Coordinate names to LaTeX: trailing digits become a superscript
    index and underscores start subscripts, so ``p0_1`` is ``p^{0}_{1}``
    and ``y_x0`` is ``y_{x^{0}}``."""
    if "_" in name:
        head, tail = name.split("_", 1)
        return f"{latex_name(head)}_{{{latex_name(tail)}}}"
    m = re.fullmatch(r"([A-Za-z]+)(\d+)", name)
    if m:
        return f"{m.group(1)}^{{{m.group(2)}}}"
    return name


def _latex_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    sign = "-" if value < 0 else ""
    return f"{sign}\\tfrac{{{abs(value.numerator)}}}{{{value.denominator}}}"


def _latex_base(text: str) -> str:
    return f"{{{text}}}" if ("^" in text or "_" in text) else text


def latex_coefficient(c: Coefficient) -> str:
    if c.is_zero():
        return "0"
    pieces: list[str] = []
    for i, (expo, value) in enumerate(c.sorted_terms()):
        monomials = [
            (name, k)
            for name, k in sorted(zip(c.chart.coordinates, expo))
            if k != 0
        ]
        mono = " ".join(
            latex_name(name) if k == 1 else f"{_latex_base(latex_name(name))}^{{{k}}}"
            for name, k in monomials
        )
        mag = abs(value)
        if not mono:
            body = _latex_rational(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_latex_rational(mag)} {mono}"
        if i == 0:
            pieces.append(body if value > 0 else f"-{body}")
        else:
            pieces.append(f" + {body}" if value > 0 else f" - {body}")
    return "".join(pieces)


def _latex_graded(obj: DiffForm | MultiVector) -> str:
    if obj.degree == 0:
        return latex_coefficient(obj.scalar())
    if not obj.terms:
        return "0"
    if isinstance(obj, DiffForm):
        factor = lambda i: f"\\mathrm{{d}}{latex_name(obj.chart.coordinates[i])}"
    else:
        factor = lambda i: f"\\partial_{{{latex_name(obj.chart.coordinates[i])}}}"
    pieces: list[str] = []
    for key in sorted(obj.terms):
        coeff = obj.terms[key]
        factors = " \\wedge ".join(factor(i) for i in key)
        if len(coeff.terms) == 1:
            expo, value = next(iter(coeff.terms.items()))
            negative = value < 0
            magnitude = Coefficient(obj.chart, {expo: abs(value)})
            scalar_text = latex_coefficient(magnitude)
            body = factors if scalar_text == "1" else f"{scalar_text}\\, {factors}"
        else:
            negative = False
            body = f"\\left({latex_coefficient(coeff)}\\right) {factors}"
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces)


def _latex_conformal(data: ConformalData) -> str:
    return "\n".join(
        [
            f"\\alpha = {_latex_graded(data.alpha)}",
            f"X = {_latex_graded(data.x_field)}",
            f"V = {_latex_graded(data.v_field)}",
            "\\text{with } \\iota_X\\Theta = -\\alpha,\\quad"
            " \\iota_X\\mathrm{d}\\Theta = (-1)^{p+1}"
            "(\\mathrm{d}\\alpha + \\iota_V\\Theta)",
        ]
    )


def _plain(obj: Value) -> str:
    if isinstance(obj, Coefficient):
        return format_coefficient(obj, elide_unit=True)
    if isinstance(obj, ConformalData):
        return "\n".join(
            [
                f"alpha = {obj.alpha}",
                f"X = {obj.x_field}",
                f"V = {obj.v_field}",
            ]
        )
    return str(obj)


# -- JSON interchange --------------------------------------------------------


def chart_to_json(chart: Chart) -> dict:
    return {
        "coordinates": list(chart.coordinates),
        "nonvanishing": sorted(chart.nonvanishing),
    }


def chart_from_json(payload: dict) -> Chart:
    return Chart(tuple(payload["coordinates"]), frozenset(payload.get("nonvanishing", ())))


def _graded_to_json(obj: DiffForm | MultiVector) -> dict:
    return {
        "kind": "form" if isinstance(obj, DiffForm) else "multivector",
        "degree": obj.degree,
        "chart": chart_to_json(obj.chart),
        "terms": [
            {"indices": list(key), "coeff": format_coefficient(obj.terms[key])}
            for key in sorted(obj.terms)
        ],
    }


def to_json(obj: Value) -> dict:
    """Serializable dictionary for any expression value."""
    if isinstance(obj, Coefficient):
        return {
            "kind": "coefficient",
            "degree": 0,
            "chart": chart_to_json(obj.chart),
            "terms": [] if obj.is_zero() else [{"indices": [], "coeff": format_coefficient(obj)}],
        }
    if isinstance(obj, (DiffForm, MultiVector)):
        return _graded_to_json(obj)
    if isinstance(obj, ConformalData):
        return {
            "kind": "conformal-data",
            "alpha": _graded_to_json(obj.alpha),
            "x_field": _graded_to_json(obj.x_field),
            "v_field": _graded_to_json(obj.v_field),
            "validated": True,
        }
    raise StructuralError(f"cannot serialize a {type(obj).__name__}")


def _graded_from_json(payload: dict, chart: Chart | None) -> DiffForm | MultiVector:
    target = chart_from_json(payload["chart"])
    if chart is not None and target != chart:
        raise StructuralError("serialized object lives on a different chart")
    cls = DiffForm if payload["kind"] == "form" else MultiVector
    degree = int(payload["degree"])
    result = cls.zero(target, degree)
    for term in payload["terms"]:
        indices = tuple(int(i) for i in term["indices"])
        if len(indices) != degree or tuple(sorted(set(indices))) != indices:
            raise StructuralError(f"malformed index tuple {indices} for degree {degree}")
        if indices and not (0 <= indices[0] and indices[-1] < target.dimension):
            raise StructuralError(f"index tuple {indices} escapes the chart")
        coeff = parse_coefficient(target, term["coeff"])
        single = cls(target, degree, {indices: coeff} if not coeff.is_zero() else {})
        result = result + single
    return result


def object_from_json(payload: dict, chart: Chart | None = None, structure: NFormStructure | None = None) -> Value:
    """Rebuild an expression value; conformal data is re-validated
    against ``structure`` and never trusts the stored stamp."""
    kind = payload.get("kind")
    if kind == "coefficient":
        target = chart_from_json(payload["chart"])
        if chart is not None and target != chart:
            raise StructuralError("serialized object lives on a different chart")
        total = Coefficient.zero(target)
        for term in payload["terms"]:
            total = total + parse_coefficient(target, term["coeff"])
        return total
    if kind in {"form", "multivector"}:
        return _graded_from_json(payload, chart)
    if kind == "conformal-data":
        if structure is None:
            raise StructuralError("conformal data needs a structure to re-validate against")
        from .structures import make_conformal_data

        alpha = _graded_from_json(payload["alpha"], structure.chart)
        x_field = _graded_from_json(payload["x_field"], structure.chart)
        v_field = _graded_from_json(payload["v_field"], structure.chart)
        return make_conformal_data(structure, alpha, x_field, v_field)
    raise StructuralError(f"unknown serialized kind {kind!r}")


def render(obj: Value, fmt: str = "plain") -> str:
    """Deterministic text for an expression value in the given format."""
    if fmt == "plain":
        return _plain(obj)
    if fmt == "latex":
        if isinstance(obj, Coefficient):
            return latex_coefficient(obj)
        if isinstance(obj, (DiffForm, MultiVector)):
            return _latex_graded(obj)
        if isinstance(obj, ConformalData):
            return _latex_conformal(obj)
        raise StructuralError(f"cannot render a {type(obj).__name__}")
    if fmt == "json":
        return json.dumps(to_json(obj), indent=2, sort_keys=True)
    raise StructuralError(f"unknown render format {fmt!r}")
