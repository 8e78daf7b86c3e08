"""Recursive-descent parser for polynomial and smooth-function expressions.

Grammar (both front ends share it)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?
    atom   := number | name | name '(' expr ')' | '(' expr ')'

``parse_poly`` expands the tree into an exact :class:`HomoPoly` and refuses
anything that is not a homogeneous polynomial; ``parse_fn`` compiles it to a
float evaluator.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Union

import numpy as np

from .poly import HomoPoly, PolynomialError


class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None, text: str = ""):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class DomainError(ValueError):
    """Expression undefined at the requested point."""


# ----------------------------------------------------------------- AST


class Num(NamedTuple):
    value: Fraction


class Var(NamedTuple):
    name: str


class Unary(NamedTuple):
    op: str
    arg: "Node"


class BinOp(NamedTuple):
    op: str
    left: "Node"
    right: "Node"


class Call(NamedTuple):
    func: str
    arg: "Node"


Node = Union[Num, Var, Unary, BinOp, Call]

FUNCTIONS = ("exp", "sin", "cos", "sqrt", "log")
CONSTANTS = {"pi": math.pi}
ALIASES = {"φ": "phi", "ρ": "rho", "π": "pi"}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_φρπ][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^()]))"
)


class Token(NamedTuple):
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        start = m.start(kind)
        tok = m.group(kind)
        if kind == "op" and tok == "**":
            tok = "^"
        if kind == "name":
            tok = ALIASES.get(tok, tok)
        tokens.append(Token(kind, tok, start))
        pos = m.end()
    tokens.append(Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def accept(self, op: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == op:
            self.i += 1
            return True
        return False

    def expect(self, op: str) -> None:
        if not self.accept(op):
            found = self.tok.text or "end of input"
            raise ParseError(f"expected {op!r}, found {found!r}", self.tok.pos, self.text)

    def parse(self) -> Node:
        if self.tok.kind == "end":
            raise ParseError("empty expression", 0, self.text)
        node = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos, self.text)
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            if self.accept("+"):
                node = BinOp("+", node, self.term())
            elif self.accept("-"):
                node = BinOp("-", node, self.term())
            else:
                return node

    def term(self) -> Node:
        node = self.unary()
        while True:
            if self.accept("*"):
                node = BinOp("*", node, self.unary())
            elif self.accept("/"):
                node = BinOp("/", node, self.unary())
            else:
                return node

    def unary(self) -> Node:
        if self.accept("-"):
            return Unary("-", self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.accept("^"):
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(Fraction(tok.text))
        if tok.kind == "name":
            self.i += 1
            if self.accept("("):
                arg = self.expr()
                self.expect(")")
                return Call(tok.text, arg)
            return Var(tok.text)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise ParseError(f"unexpected {found!r}", tok.pos, self.text)


def parse_expr(text: str) -> Node:
    return _Parser(text).parse()


# ------------------------------------------------------------ polynomials


def _poly_of(node: Node, text: str) -> dict[tuple[int, int], Fraction]:
    """Expand to ``{(i, j): coeff}`` for ``x**i y**j``."""
    if isinstance(node, Num):
        return {(0, 0): node.value} if node.value else {}
    if isinstance(node, Var):
        if node.name == "x":
            return {(1, 0): Fraction(1)}
        if node.name == "y":
            return {(0, 1): Fraction(1)}
        raise ParseError(f"unknown identifier {node.name!r} in polynomial", None, text)
    if isinstance(node, Unary):
        return {k: -v for k, v in _poly_of(node.arg, text).items()}
    if isinstance(node, Call):
        raise ParseError(f"non-polynomial construct: function {node.func}()", None, text)
    a = _poly_of(node.left, text)
    if node.op == "^":
        b = _poly_of(node.right, text)
        if set(b) - {(0, 0)} or b.get((0, 0), Fraction(0)).denominator != 1 or b.get((0, 0), 0) < 0:
            raise ParseError("non-polynomial construct: exponent must be a non-negative integer",
                             None, text)
        n = int(b.get((0, 0), 0))
        out = {(0, 0): Fraction(1)}
        for _ in range(n):
            out = _poly_mul(out, a)
        return out
    b = _poly_of(node.right, text)
    if node.op == "+":
        return _poly_add(a, b, 1)
    if node.op == "-":
        return _poly_add(a, b, -1)
    if node.op == "*":
        return _poly_mul(a, b)
    if node.op == "/":
        if set(b) - {(0, 0)}:
            raise ParseError("non-polynomial construct: division by a variable", None, text)
        c = b.get((0, 0), Fraction(0))
        if c == 0:
            raise ParseError("division by zero", None, text)
        return {k: v / c for k, v in a.items()}
    raise AssertionError(node.op)


def _poly_add(a, b, sign):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, Fraction(0)) + sign * v
        if out[k] == 0:
            del out[k]
    return out


def _poly_mul(a, b):
    out: dict[tuple[int, int], Fraction] = {}
    for (i1, j1), v1 in a.items():
        for (i2, j2), v2 in b.items():
            k = (i1 + i2, j1 + j2)
            out[k] = out.get(k, Fraction(0)) + v1 * v2
    return {k: v for k, v in out.items() if v}


def parse_poly(text: str) -> HomoPoly:
    """Parse and expand a homogeneous polynomial in ``x`` and ``y``.

    >>> parse_poly("x^2 - y^2").coeffs
    (Fraction(-1, 1), Fraction(0, 1), Fraction(1, 1))
    """
    terms = _poly_of(parse_expr(text), text)
    if not terms:
        return HomoPoly.zero()
    degrees = {i + j for i, j in terms}
    if len(degrees) > 1:
        raise PolynomialError(
            f"non-homogeneous polynomial: monomials of degrees {sorted(degrees)}")
    d = degrees.pop()
    cs = [Fraction(0)] * (d + 1)
    for (i, _), v in terms.items():
        cs[i] = v
    return HomoPoly(cs)


# ------------------------------------------------------- smooth functions

VARS_XY = ("x", "y")
VARS_POLAR = ("phi", "rho")
VARS_T = ("t",)


def _free_names(node: Node, acc: set[str]) -> set[str]:
    if isinstance(node, Var):
        acc.add(node.name)
    elif isinstance(node, Unary):
        _free_names(node.arg, acc)
    elif isinstance(node, BinOp):
        _free_names(node.left, acc)
        _free_names(node.right, acc)
    elif isinstance(node, Call):
        _free_names(node.arg, acc)
    return acc


def _check_names(node: Node, variables: tuple[str, ...], text: str) -> None:
    if isinstance(node, Var):
        if node.name not in variables and node.name not in CONSTANTS:
            raise ParseError(f"unknown identifier {node.name!r}", None, text)
    elif isinstance(node, Unary):
        _check_names(node.arg, variables, text)
    elif isinstance(node, BinOp):
        _check_names(node.left, variables, text)
        _check_names(node.right, variables, text)
    elif isinstance(node, Call):
        if node.func not in FUNCTIONS:
            raise ParseError(f"unknown function {node.func!r}", None, text)
        _check_names(node.arg, variables, text)


def _source(node: Node, lib: str) -> str:
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        if node.name in CONSTANTS:
            return repr(CONSTANTS[node.name])
        return node.name
    if isinstance(node, Unary):
        return f"(-{_source(node.arg, lib)})"
    if isinstance(node, Call):
        return f"{lib}.{node.func}({_source(node.arg, lib)})"
    left, right = _source(node.left, lib), _source(node.right, lib)
    if node.op == "^":
        if isinstance(node.right, Num) and node.right.value.denominator == 1:
            return f"({left} ** {int(node.right.value)})"
        return f"_pow({left}, {right})"
    return f"({left} {node.op} {right})"


def _np_pow(a, b):
    return np.power(a, b)


@dataclass(frozen=True)
class SmoothFn:
    """Float evaluator for a parsed expression.

    ``value_at_origin`` replaces the expression on the singular set of the
    variable pair: ``x = y = 0`` for ``(x, y)``, the boundary ``rho = 0`` for
    ``(phi, rho)`` and ``t = 0`` for ``(t,)``.
    """

    ast: Node
    variables: tuple[str, ...] = VARS_XY
    value_at_origin: float | None = None
    text: str = ""
    _scalar: object = field(default=None, repr=False, compare=False)
    _vector: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        args = ", ".join(self.variables)
        env = {"math": math, "_pow": math.pow}
        scalar = eval(f"lambda {args}: {_source(self.ast, 'math')}", env)  # noqa: S307
        venv = {"np": np, "_pow": _np_pow}
        vector = eval(f"lambda {args}: {_source(self.ast, 'np')}", venv)  # noqa: S307
        object.__setattr__(self, "_scalar", scalar)
        object.__setattr__(self, "_vector", vector)

    @property
    def is_constant(self) -> bool:
        return not (_free_names(self.ast, set()) - set(CONSTANTS))

    def _at_origin(self, *args) -> bool:
        if self.variables == VARS_POLAR:
            return args[1] == 0
        return all(a == 0 for a in args)

    def __call__(self, *args: float) -> float:
        if self.value_at_origin is not None and self._at_origin(*args):
            return float(self.value_at_origin)
        try:
            value = self._scalar(*args)
        except (ZeroDivisionError, ValueError, OverflowError) as exc:
            raise DomainError(f"{self.text or 'expression'} undefined at {args}: {exc}") from exc
        if isinstance(value, complex):
            raise DomainError(f"{self.text or 'expression'} is complex at {args}")
        return float(value)

    def evaluate_array(self, *arrays) -> np.ndarray:
        """Vectorized evaluation; points in the singular set get the origin value."""
        arrays = np.broadcast_arrays(*[np.asarray(a, dtype=float) for a in arrays])
        with np.errstate(all="ignore"):
            out = np.asarray(self._vector(*arrays), dtype=float)
            out = np.broadcast_to(out, arrays[0].shape).copy()
        if self.value_at_origin is not None:
            if self.variables == VARS_POLAR:
                mask = arrays[1] == 0
            else:
                mask = np.logical_and.reduce([a == 0 for a in arrays])
            out[mask] = self.value_at_origin
        return out

    def derivative(self, var: str) -> SmoothFn:
        """Symbolic partial derivative; the origin value is dropped."""
        if var not in self.variables:
            raise ValueError(f"{var!r} is not a variable of this function")
        return SmoothFn(_simplify(_diff(self.ast, var)), self.variables, None,
                        f"d/d{var}({self.text})")

    def __str__(self) -> str:
        return self.text or _unparse(self.ast)


def parse_fn(text: str, variables: tuple[str, ...] = VARS_XY,
             value_at_origin: float | None = None) -> SmoothFn:
    """Parse a smooth scalar function of the given variables."""
    variables = tuple(ALIASES.get(v, v) for v in variables)
    ast = parse_expr(text)
    _check_names(ast, variables, text)
    return SmoothFn(ast, variables, value_at_origin, text)


def constant_fn(c: float, variables: tuple[str, ...] = VARS_XY) -> SmoothFn:
    return SmoothFn(Num(Fraction(c)), variables, None, repr(c) if c != int(c) else str(int(c)))


# ------------------------------------------------------ symbolic algebra

ZERO, ONE = Num(Fraction(0)), Num(Fraction(1))


def _diff(node: Node, var: str) -> Node:
    if isinstance(node, Num):
        return ZERO
    if isinstance(node, Var):
        return ONE if node.name == var else ZERO
    if isinstance(node, Unary):
        return Unary("-", _diff(node.arg, var))
    if isinstance(node, Call):
        a, da = node.arg, _diff(node.arg, var)
        outer = {
            "exp": node,
            "sin": Call("cos", a),
            "cos": Unary("-", Call("sin", a)),
            "sqrt": BinOp("/", ONE, BinOp("*", Num(Fraction(2)), node)),
            "log": BinOp("/", ONE, a),
        }[node.func]
        return BinOp("*", outer, da)
    u, v = node.left, node.right
    du, dv = _diff(u, var), _diff(v, var)
    if node.op in "+-":
        return BinOp(node.op, du, dv)
    if node.op == "*":
        return BinOp("+", BinOp("*", du, v), BinOp("*", u, dv))
    if node.op == "/":
        return BinOp("/", BinOp("-", BinOp("*", du, v), BinOp("*", u, dv)), BinOp("^", v, Num(Fraction(2))))
    # power
    if _is_zero(_simplify(dv)):
        n = v
        return BinOp("*", BinOp("*", n, BinOp("^", u, BinOp("-", n, ONE))), du)
    # u^v = exp(v log u)
    return BinOp("*", node, BinOp("+", BinOp("*", dv, Call("log", u)), BinOp("/", BinOp("*", v, du), u)))


def _is_zero(node: Node) -> bool:
    return isinstance(node, Num) and node.value == 0


def _is_one(node: Node) -> bool:
    return isinstance(node, Num) and node.value == 1


def _simplify(node: Node) -> Node:
    if isinstance(node, (Num, Var)):
        return node
    if isinstance(node, Unary):
        a = _simplify(node.arg)
        if isinstance(a, Num):
            return Num(-a.value)
        if isinstance(a, Unary):
            return a.arg
        return Unary("-", a)
    if isinstance(node, Call):
        return Call(node.func, _simplify(node.arg))
    a, b = _simplify(node.left), _simplify(node.right)
    op = node.op
    if isinstance(a, Num) and isinstance(b, Num):
        if op == "+":
            return Num(a.value + b.value)
        if op == "-":
            return Num(a.value - b.value)
        if op == "*":
            return Num(a.value * b.value)
        if op == "/" and b.value != 0:
            return Num(a.value / b.value)
        if op == "^" and b.value.denominator == 1 and (b.value >= 0 or a.value != 0):
            return Num(a.value ** int(b.value))
    if op == "+":
        if _is_zero(a):
            return b
        if _is_zero(b):
            return a
    if op == "-":
        if _is_zero(b):
            return a
        if _is_zero(a):
            return _simplify(Unary("-", b))
    if op == "*":
        if _is_zero(a) or _is_zero(b):
            return ZERO
        if _is_one(a):
            return b
        if _is_one(b):
            return a
    if op == "/":
        if _is_zero(a):
            return ZERO
        if _is_one(b):
            return a
    if op == "^":
        if _is_zero(b):
            return ONE
        if _is_one(b):
            return a
    return BinOp(op, a, b)


def _unparse(node: Node) -> str:
    if isinstance(node, Num):
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"({v.numerator}/{v.denominator})"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        return f"(-{_unparse(node.arg)})"
    if isinstance(node, Call):
        return f"{node.func}({_unparse(node.arg)})"
    return f"({_unparse(node.left)} {node.op} {_unparse(node.right)})"


def substitute(node: Node, mapping: dict[str, Node]) -> Node:
    if isinstance(node, Var):
        return mapping.get(node.name, node)
    if isinstance(node, Num):
        return node
    if isinstance(node, Unary):
        return Unary(node.op, substitute(node.arg, mapping))
    if isinstance(node, Call):
        return Call(node.func, substitute(node.arg, mapping))
    return BinOp(node.op, substitute(node.left, mapping), substitute(node.right, mapping))
