"""Symbolic coefficient expressions: parsing, differentiation, evaluation.

Coefficient functions of the configuration variables q1..qN and time t are
held as small immutable ASTs.  The algebra deliberately stops far short of a
CAS: smart constructors fold constants and drop additive/multiplicative
zeros so Leibniz expansions stay compact, and expression equality is decided
numerically on random sample points rather than by canonicalization.

Grammar (whitespace-insensitive, ^ binds tightest, then unary minus, then
* and /, then + and -)::

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := "-" factor | base ("^" ("-")? digits)?
    base   := number | "i" | "t" | "q" digits | func "(" expr ")" | "(" expr ")"
    func   := "exp" | "sin" | "cos" | "log" | "sqrt" | "conj"

`conj` is accepted on input so that serialized adjoint/hermitized output
round-trips; it is never required in hand-written Hamiltonian files.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    DimensionMismatchError,
    EvaluationDomainError,
    ExpressionSyntaxError,
    SamplingError,
)
from .multiindex import MultiIndex

# ---------------------------------------------------------------------------
# AST nodes

@dataclass(frozen=True)
class Const:
    value: complex


@dataclass(frozen=True)
class Coord:
    axis: int  # 1-based


@dataclass(frozen=True)
class TimeVar:
    pass


@dataclass(frozen=True)
class Add:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Sub:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Mul:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Div:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


@dataclass(frozen=True)
class Conj:
    arg: "Node"


Node = Union[Const, Coord, TimeVar, Add, Sub, Mul, Div, Pow, Neg, Call, Conj]

_FUNCTIONS = ("exp", "sin", "cos", "log", "sqrt")

_ZERO = Const(0j)
_ONE = Const(1 + 0j)


def _is_const(node, value=None):
    if not isinstance(node, Const):
        return False
    return value is None or node.value == value


# ---------------------------------------------------------------------------
# Smart constructors (light simplification only: constant folding, identity
# and annihilator elimination)

def _add(a: Node, b: Node) -> Node:
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    return Add(a, b)


def _sub(a: Node, b: Node) -> Node:
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return _neg(b)
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if a == b:
        return _ZERO
    return Sub(a, b)


def _mul(a: Node, b: Node) -> Node:
    if _is_const(a, 0) or _is_const(b, 0):
        return _ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    return Mul(a, b)


def _div(a: Node, b: Node) -> Node:
    if _is_const(a, 0):
        return _ZERO
    if _is_const(b, 1):
        return a
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0:
        return Const(a.value / b.value)
    return Div(a, b)


def _neg(a: Node) -> Node:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _pow(base: Node, exponent: int) -> Node:
    if exponent == 0:
        return _ONE
    if exponent == 1:
        return base
    if isinstance(base, Const) and not (base.value == 0 and exponent < 0):
        return Const(base.value ** exponent)
    return Pow(base, exponent)


def _call(func: str, arg: Node) -> Node:
    if isinstance(arg, Const):
        try:
            return Const(_apply_func(func, arg.value))
        except (ValueError, OverflowError, ZeroDivisionError):
            pass
    return Call(func, arg)


def _conj(a: Node) -> Node:
    """Pointwise complex conjugate; q and t are real so conjugation commutes
    with every operation except log/sqrt on their branch cut, which stay
    wrapped in an explicit Conj node."""
    if isinstance(a, Const):
        return Const(a.value.conjugate())
    if isinstance(a, (Coord, TimeVar)):
        return a
    if isinstance(a, Conj):
        return a.arg
    if isinstance(a, Add):
        return _add(_conj(a.left), _conj(a.right))
    if isinstance(a, Sub):
        return _sub(_conj(a.left), _conj(a.right))
    if isinstance(a, Mul):
        return _mul(_conj(a.left), _conj(a.right))
    if isinstance(a, Div):
        return _div(_conj(a.left), _conj(a.right))
    if isinstance(a, Neg):
        return _neg(_conj(a.arg))
    if isinstance(a, Pow):
        return _pow(_conj(a.base), a.exponent)
    if isinstance(a, Call):
        if a.func in ("exp", "sin", "cos"):
            return _call(a.func, _conj(a.arg))
        return Conj(a)
    raise TypeError(f"unknown node {a!r}")


def _apply_func(func: str, z: complex) -> complex:
    if func == "exp":
        return cmath.exp(z)
    if func == "sin":
        return cmath.sin(z)
    if func == "cos":
        return cmath.cos(z)
    if func == "log":
        if z == 0:
            raise ValueError("log of zero")
        return cmath.log(z)
    if func == "sqrt":
        return cmath.sqrt(z)
    raise ValueError(f"unknown function {func}")


# ---------------------------------------------------------------------------
# Differentiation (single axis; q variables only, t is a parameter)

def _diff(node: Node, axis: int) -> Node:
    if isinstance(node, (Const, TimeVar)):
        return _ZERO
    if isinstance(node, Coord):
        return _ONE if node.axis == axis else _ZERO
    if isinstance(node, Add):
        return _add(_diff(node.left, axis), _diff(node.right, axis))
    if isinstance(node, Sub):
        return _sub(_diff(node.left, axis), _diff(node.right, axis))
    if isinstance(node, Mul):
        return _add(
            _mul(_diff(node.left, axis), node.right),
            _mul(node.left, _diff(node.right, axis)),
        )
    if isinstance(node, Div):
        num = _sub(
            _mul(_diff(node.left, axis), node.right),
            _mul(node.left, _diff(node.right, axis)),
        )
        return _div(num, _pow(node.right, 2))
    if isinstance(node, Neg):
        return _neg(_diff(node.arg, axis))
    if isinstance(node, Pow):
        inner = _diff(node.base, axis)
        return _mul(
            _mul(Const(complex(node.exponent)), _pow(node.base, node.exponent - 1)),
            inner,
        )
    if isinstance(node, Conj):
        return _conj(_diff(node.arg, axis))
    if isinstance(node, Call):
        inner = _diff(node.arg, axis)
        if node.func == "exp":
            return _mul(_call("exp", node.arg), inner)
        if node.func == "sin":
            return _mul(_call("cos", node.arg), inner)
        if node.func == "cos":
            return _neg(_mul(_call("sin", node.arg), inner))
        if node.func == "log":
            return _div(inner, node.arg)
        if node.func == "sqrt":
            return _div(inner, _mul(Const(2 + 0j), _call("sqrt", node.arg)))
    raise TypeError(f"unknown node {node!r}")


# ---------------------------------------------------------------------------
# Evaluation

def _eval_scalar(node: Node, q, t: float) -> complex:
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Coord):
        return complex(q[node.axis - 1])
    if isinstance(node, TimeVar):
        return complex(t)
    if isinstance(node, Add):
        return _eval_scalar(node.left, q, t) + _eval_scalar(node.right, q, t)
    if isinstance(node, Sub):
        return _eval_scalar(node.left, q, t) - _eval_scalar(node.right, q, t)
    if isinstance(node, Mul):
        return _eval_scalar(node.left, q, t) * _eval_scalar(node.right, q, t)
    if isinstance(node, Div):
        denom = _eval_scalar(node.right, q, t)
        if denom == 0:
            raise EvaluationDomainError("division by zero", _render(node)[0])
        return _eval_scalar(node.left, q, t) / denom
    if isinstance(node, Neg):
        return -_eval_scalar(node.arg, q, t)
    if isinstance(node, Pow):
        base = _eval_scalar(node.base, q, t)
        if base == 0 and node.exponent < 0:
            raise EvaluationDomainError("zero raised to negative power", _render(node)[0])
        try:
            return base ** node.exponent
        except OverflowError as exc:
            raise EvaluationDomainError(f"overflow: {exc}", _render(node)[0]) from exc
    if isinstance(node, Conj):
        return _eval_scalar(node.arg, q, t).conjugate()
    if isinstance(node, Call):
        arg = _eval_scalar(node.arg, q, t)
        try:
            return _apply_func(node.func, arg)
        except (ValueError, OverflowError) as exc:
            raise EvaluationDomainError(str(exc), _render(node)[0]) from exc
    raise TypeError(f"unknown node {node!r}")


def _eval_array(node: Node, meshes, t: float):
    """Vectorized evaluation over coordinate meshes; returns array or scalar."""
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Coord):
        return meshes[node.axis - 1].astype(complex)
    if isinstance(node, TimeVar):
        return complex(t)
    if isinstance(node, Add):
        return _eval_array(node.left, meshes, t) + _eval_array(node.right, meshes, t)
    if isinstance(node, Sub):
        return _eval_array(node.left, meshes, t) - _eval_array(node.right, meshes, t)
    if isinstance(node, Mul):
        return _eval_array(node.left, meshes, t) * _eval_array(node.right, meshes, t)
    if isinstance(node, Div):
        return _eval_array(node.left, meshes, t) / _eval_array(node.right, meshes, t)
    if isinstance(node, Neg):
        return -_eval_array(node.arg, meshes, t)
    if isinstance(node, Pow):
        return _eval_array(node.base, meshes, t) ** node.exponent
    if isinstance(node, Conj):
        return np.conjugate(_eval_array(node.arg, meshes, t))
    if isinstance(node, Call):
        arg = np.asarray(_eval_array(node.arg, meshes, t), dtype=complex)
        fn = {"exp": np.exp, "sin": np.sin, "cos": np.cos, "log": np.log, "sqrt": np.sqrt}[node.func]
        return fn(arg)
    raise TypeError(f"unknown node {node!r}")


# ---------------------------------------------------------------------------
# Serialization

_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _fmt_float(x: float) -> str:
    return repr(float(x))


def _render_const(value: complex) -> tuple[str, int]:
    re_, im = value.real, value.imag
    if im == 0:
        text = _fmt_float(re_)
        return text, (_PREC_UNARY if re_ < 0 else _PREC_ATOM)
    if re_ == 0:
        if im == 1:
            return "i", _PREC_ATOM
        if im == -1:
            return "-i", _PREC_UNARY
        return f"{_fmt_float(im)}*i", _PREC_MUL
    sign = "+" if im >= 0 else "-"
    return f"({_fmt_float(re_)}{sign}{_fmt_float(abs(im))}*i)", _PREC_ATOM


def _wrap(child: Node, min_prec: int) -> str:
    text, prec = _render(child)
    if prec < min_prec:
        return f"({text})"
    return text


def _render(node: Node) -> tuple[str, int]:
    if isinstance(node, Const):
        return _render_const(node.value)
    if isinstance(node, Coord):
        return f"q{node.axis}", _PREC_ATOM
    if isinstance(node, TimeVar):
        return "t", _PREC_ATOM
    if isinstance(node, Add):
        return f"{_wrap(node.left, _PREC_ADD)} + {_wrap(node.right, _PREC_ADD)}", _PREC_ADD
    if isinstance(node, Sub):
        return f"{_wrap(node.left, _PREC_ADD)} - {_wrap(node.right, _PREC_ADD + 1)}", _PREC_ADD
    if isinstance(node, Mul):
        return f"{_wrap(node.left, _PREC_MUL)}*{_wrap(node.right, _PREC_MUL)}", _PREC_MUL
    if isinstance(node, Div):
        return f"{_wrap(node.left, _PREC_MUL)}/{_wrap(node.right, _PREC_MUL + 1)}", _PREC_MUL
    if isinstance(node, Neg):
        return f"-{_wrap(node.arg, _PREC_UNARY)}", _PREC_UNARY
    if isinstance(node, Pow):
        return f"{_wrap(node.base, _PREC_ATOM)}^{node.exponent}", _PREC_POW
    if isinstance(node, Call):
        return f"{node.func}({_render(node.arg)[0]})", _PREC_ATOM
    if isinstance(node, Conj):
        return f"conj({_render(node.arg)[0]})", _PREC_ATOM
    raise TypeError(f"unknown node {node!r}")


_LATEX_FUNC = {"exp": r"\exp", "sin": r"\sin", "cos": r"\cos", "log": r"\log"}


def _latex_const(value: complex) -> tuple[str, int]:
    re_, im = value.real, value.imag
    if im == 0:
        return _fmt_float(re_), (_PREC_UNARY if re_ < 0 else _PREC_ATOM)
    if re_ == 0:
        if im == 1:
            return r"\mathrm{i}", _PREC_ATOM
        if im == -1:
            return r"-\mathrm{i}", _PREC_UNARY
        return _fmt_float(im) + r"\,\mathrm{i}", _PREC_MUL
    sign = "+" if im >= 0 else "-"
    return (
        rf"\left({_fmt_float(re_)} {sign} {_fmt_float(abs(im))}\,\mathrm{{i}}\right)",
        _PREC_ATOM,
    )


def _latex(node: Node) -> tuple[str, int]:
    if isinstance(node, Const):
        return _latex_const(node.value)
    if isinstance(node, Coord):
        return f"q_{{{node.axis}}}", _PREC_ATOM
    if isinstance(node, TimeVar):
        return "t", _PREC_ATOM
    if isinstance(node, Add):
        return f"{_lwrap(node.left, _PREC_ADD)} + {_lwrap(node.right, _PREC_ADD)}", _PREC_ADD
    if isinstance(node, Sub):
        return f"{_lwrap(node.left, _PREC_ADD)} - {_lwrap(node.right, _PREC_ADD + 1)}", _PREC_ADD
    if isinstance(node, Mul):
        return f"{_lwrap(node.left, _PREC_MUL)} \\, {_lwrap(node.right, _PREC_MUL)}", _PREC_MUL
    if isinstance(node, Div):
        return f"\\frac{{{_latex(node.left)[0]}}}{{{_latex(node.right)[0]}}}", _PREC_ATOM
    if isinstance(node, Neg):
        return f"-{_lwrap(node.arg, _PREC_UNARY)}", _PREC_UNARY
    if isinstance(node, Pow):
        return f"{_lwrap(node.base, _PREC_ATOM)}^{{{node.exponent}}}", _PREC_POW
    if isinstance(node, Call):
        if node.func == "sqrt":
            return f"\\sqrt{{{_latex(node.arg)[0]}}}", _PREC_ATOM
        return f"{_LATEX_FUNC[node.func]}\\left({_latex(node.arg)[0]}\\right)", _PREC_ATOM
    if isinstance(node, Conj):
        return f"\\overline{{{_latex(node.arg)[0]}}}", _PREC_ATOM
    raise TypeError(f"unknown node {node!r}")


def _lwrap(child: Node, min_prec: int) -> str:
    text, prec = _latex(child)
    if prec < min_prec:
        return f"\\left({text}\\right)"
    return text


# ---------------------------------------------------------------------------
# Tokenizer / parser

_TOKEN_RE = re.compile(
    r"(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<ident>[A-Za-z]+\d*)|(?P<op>[-+*/^()]))"
)


class _Parser:
    def __init__(self, text: str, dim: int):
        self.text = text
        self.dim = dim
        self.tokens = self._tokenize(text)
        self.pos = 0

    @staticmethod
    def _tokenize(text):
        tokens = []
        idx = 0
        line, line_start = 1, 0
        while idx < len(text):
            ch = text[idx]
            if ch == "\n":
                line += 1
                line_start = idx + 1
                idx += 1
                continue
            if ch in " \t\r":
                idx += 1
                continue
            match = _TOKEN_RE.match(text, idx)
            if match is None:
                raise ExpressionSyntaxError(f"unexpected character '{ch}'", line, idx - line_start + 1)
            kind = match.lastgroup
            tokens.append((kind, match.group(kind), line, idx - line_start + 1))
            idx = match.end()
        tokens.append(("eof", "", line, len(text) - line_start + 1))
        return tokens

    def _peek(self):
        return self.tokens[self.pos]

    def _advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _expect_op(self, op):
        kind, value, line, col = self._peek()
        if kind != "op" or value != op:
            raise ExpressionSyntaxError(f"expected '{op}', found '{value or 'end of input'}'", line, col)
        return self._advance()

    def _error(self, message):
        _, value, line, col = self._peek()
        raise ExpressionSyntaxError(message, line, col)

    def parse(self) -> Node:
        node = self._expr()
        kind, value, line, col = self._peek()
        if kind != "eof":
            raise ExpressionSyntaxError(f"unexpected trailing input '{value}'", line, col)
        return node

    def _expr(self) -> Node:
        node = self._term()
        while True:
            kind, value, _, _ = self._peek()
            if kind == "op" and value in "+-":
                self._advance()
                rhs = self._term()
                node = _add(node, rhs) if value == "+" else _sub(node, rhs)
            else:
                return node

    def _term(self) -> Node:
        node = self._factor()
        while True:
            kind, value, _, _ = self._peek()
            if kind == "op" and value in "*/":
                self._advance()
                rhs = self._factor()
                node = _mul(node, rhs) if value == "*" else _div(node, rhs)
            else:
                return node

    def _factor(self) -> Node:
        kind, value, _, _ = self._peek()
        if kind == "op" and value == "-":
            self._advance()
            return _neg(self._factor())
        node = self._base()
        kind, value, _, _ = self._peek()
        if kind == "op" and value == "^":
            self._advance()
            node = _pow(node, self._int_literal())
        return node

    def _int_literal(self) -> int:
        sign = 1
        kind, value, _, _ = self._peek()
        if kind == "op" and value == "-":
            self._advance()
            sign = -1
        kind, value, line, col = self._peek()
        if kind != "num" or not re.fullmatch(r"\d+", value):
            raise ExpressionSyntaxError("power exponent must be an integer literal", line, col)
        self._advance()
        return sign * int(value)

    def _base(self) -> Node:
        kind, value, line, col = self._advance()
        if kind == "num":
            return Const(complex(float(value)))
        if kind == "op" and value == "(":
            node = self._expr()
            self._expect_op(")")
            return node
        if kind == "ident":
            if value == "i":
                return Const(1j)
            if value == "t":
                return TimeVar()
            if value[0] == "q" and value[1:].isdigit():
                axis = int(value[1:])
                if not 1 <= axis <= self.dim:
                    raise ExpressionSyntaxError(
                        f"variable q{axis} out of range for dimension {self.dim}", line, col
                    )
                return Coord(axis)
            if value in _FUNCTIONS or value == "conj":
                self._expect_op("(")
                arg = self._expr()
                self._expect_op(")")
                return _conj(arg) if value == "conj" else _call(value, arg)
            raise ExpressionSyntaxError(f"unknown identifier '{value}'", line, col)
        raise ExpressionSyntaxError(f"unexpected token '{value or 'end of input'}'", line, col)


# ---------------------------------------------------------------------------
# Public wrapper

@dataclass(frozen=True)
class CoefficientExpression:
    """Immutable expression in q1..qN and t with complex constants."""

    node: Node
    dim: int

    def _check_dim(self, other: "CoefficientExpression"):
        if self.dim != other.dim:
            raise DimensionMismatchError(f"expression dimensions differ: {self.dim} vs {other.dim}")

    # -- algebra ------------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other, self.dim)
        self._check_dim(other)
        return CoefficientExpression(_add(self.node, other.node), self.dim)

    def __sub__(self, other):
        other = _coerce(other, self.dim)
        self._check_dim(other)
        return CoefficientExpression(_sub(self.node, other.node), self.dim)

    def __mul__(self, other):
        other = _coerce(other, self.dim)
        self._check_dim(other)
        return CoefficientExpression(_mul(self.node, other.node), self.dim)

    def __rmul__(self, other):
        return _coerce(other, self.dim) * self

    def __truediv__(self, other):
        other = _coerce(other, self.dim)
        self._check_dim(other)
        return CoefficientExpression(_div(self.node, other.node), self.dim)

    def __neg__(self):
        return CoefficientExpression(_neg(self.node), self.dim)

    def conjugate(self) -> "CoefficientExpression":
        return CoefficientExpression(_conj(self.node), self.dim)

    # -- calculus -----------------------------------------------------------
    def differentiate(self, n: MultiIndex) -> "CoefficientExpression":
        if n.dim != self.dim:
            raise DimensionMismatchError(f"multi-index dimension {n.dim} != expression dimension {self.dim}")
        node = self.node
        for axis0, count in enumerate(n.entries):
            for _ in range(count):
                node = _diff(node, axis0 + 1)
        return CoefficientExpression(node, self.dim)

    def evaluate(self, q, t: float) -> complex:
        if len(q) != self.dim:
            raise DimensionMismatchError(f"point dimension {len(q)} != expression dimension {self.dim}")
        return _eval_scalar(self.node, q, t)

    def evaluate_on(self, meshes, t: float) -> np.ndarray:
        """Evaluate over coordinate meshes (list of N broadcastable arrays)."""
        if len(meshes) != self.dim:
            raise DimensionMismatchError(f"{len(meshes)} meshes for dimension {self.dim}")
        shape = np.broadcast_shapes(*(np.shape(m) for m in meshes))
        try:
            with np.errstate(divide="raise", invalid="raise", over="raise"):
                out = _eval_array(self.node, meshes, t)
        except FloatingPointError as exc:
            raise EvaluationDomainError(str(exc), self.to_string()) from exc
        return np.broadcast_to(np.asarray(out, dtype=complex), shape).copy()

    # -- predicates ---------------------------------------------------------
    @property
    def is_structural_zero(self) -> bool:
        return _is_const(self.node, 0)

    def constant_value(self) -> complex | None:
        """The folded constant if the expression is a literal, else None."""
        return self.node.value if isinstance(self.node, Const) else None

    # -- rendering ----------------------------------------------------------
    def to_string(self) -> str:
        return _render(self.node)[0]

    def to_latex(self) -> str:
        return _latex(self.node)[0]

    def __str__(self) -> str:
        return self.to_string()


def _coerce(value, dim: int) -> CoefficientExpression:
    if isinstance(value, CoefficientExpression):
        return value
    if isinstance(value, (int, float, complex)):
        return CoefficientExpression(Const(complex(value)), dim)
    raise TypeError(f"cannot use {value!r} as an expression")


# ---------------------------------------------------------------------------
# Public constructors and operations

def parse(text: str, dim: int) -> CoefficientExpression:
    """Parse expression text in dimension `dim`."""
    return CoefficientExpression(_Parser(text, dim).parse(), dim)


def const(value: complex, dim: int) -> CoefficientExpression:
    return CoefficientExpression(Const(complex(value)), dim)


def coord(axis: int, dim: int) -> CoefficientExpression:
    if not 1 <= axis <= dim:
        raise DimensionMismatchError(f"axis {axis} out of range for dimension {dim}")
    return CoefficientExpression(Coord(axis), dim)


def time_var(dim: int) -> CoefficientExpression:
    return CoefficientExpression(TimeVar(), dim)


def call(func: str, arg: CoefficientExpression) -> CoefficientExpression:
    if func not in _FUNCTIONS:
        raise ValueError(f"unknown function '{func}'")
    return CoefficientExpression(_call(func, arg.node), arg.dim)


def differentiate(e: CoefficientExpression, n: MultiIndex) -> CoefficientExpression:
    return e.differentiate(n)


def evaluate(e: CoefficientExpression, q, t: float) -> complex:
    return e.evaluate(q, t)


SAMPLE_HALF_WIDTH = 2.0  # randomized checks sample q from [-2, 2]^N, t from [0, 1]


def approx_equal(
    a: CoefficientExpression,
    b: CoefficientExpression,
    samples: int = 32,
    seed: int = 2024,
    tol: float = 1e-9,
    box_center=None,
    box_half_width: float = SAMPLE_HALF_WIDTH,
) -> bool:
    """Numerical expression equality on reproducible random sample points.

    True iff |a-b| <= tol*(1+|a|+|b|) at `samples` points drawn from the
    sampling box (centered on `box_center`, default the origin) x [0,1] in t.
    Points where either side faults are redrawn, giving up after a 10x
    oversampling budget.
    """
    a._check_dim(b)
    dim = a.dim
    center = np.zeros(dim) if box_center is None else np.asarray(box_center, dtype=float)
    if center.shape != (dim,):
        raise DimensionMismatchError(f"box center must have {dim} entries")
    rng = np.random.default_rng(seed)
    valid = 0
    attempts = 0
    budget = 10 * samples
    while valid < samples:
        if attempts >= budget:
            raise SamplingError(
                f"only {valid}/{samples} valid sample points after {attempts} draws"
            )
        attempts += 1
        q = center + rng.uniform(-box_half_width, box_half_width, dim)
        t = rng.uniform(0.0, 1.0)
        try:
            va = a.evaluate(q, t)
            vb = b.evaluate(q, t)
        except EvaluationDomainError:
            continue
        valid += 1
        if abs(va - vb) > tol * (1.0 + abs(va) + abs(vb)):
            return False
    return True


def contains_time(e: CoefficientExpression) -> bool:
    """True when the expression references t anywhere."""

    def walk(node: Node) -> bool:
        if isinstance(node, TimeVar):
            return True
        if isinstance(node, (Add, Sub, Mul, Div)):
            return walk(node.left) or walk(node.right)
        if isinstance(node, (Neg, Conj, Call)):
            return walk(node.arg)
        if isinstance(node, Pow):
            return walk(node.base)
        return False

    return walk(e.node)


def is_zero(e: CoefficientExpression, samples: int = 16, seed: int = 99, tol: float = 1e-12) -> bool:
    """Zero test used for pruning: structural fold, then sampled probes.

    Probes several nested box scales so that functions localized away from
    the origin (e.g. coefficients centered mid-domain on a grid) are not
    mistaken for zero.  A scale where evaluation keeps faulting counts as
    "not provably zero": pruning must only ever drop genuine zeros.
    """
    if e.is_structural_zero:
        return True
    if isinstance(e.node, Const):
        return e.node.value == 0
    zero = const(0, e.dim)
    for scale in (1.0, 8.0, 32.0):
        try:
            if not approx_equal(
                e, zero, samples=samples, seed=seed, tol=tol,
                box_half_width=scale * SAMPLE_HALF_WIDTH,
            ):
                return False
        except SamplingError:
            return False
    return True
