"""Scalar coordinate expressions with exact first and second derivatives.

Metric components, warping functions, and domain guards are all small
expression trees parsed from infix source text.  Evaluation propagates
second-order forward jets: values, gradients, and Hessians are exact up to
floating-point rounding (no truncation error), which is what makes the
downstream curvature tensors trustworthy at tight tolerances.

Variables are ``x1 .. xn`` by default; a chart family may register aliases
(``t``, ``y``, ``u1``, ...) mapping extra names onto coordinate indices.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

__all__ = [
    "DomainError",
    "Expression",
    "ExpressionError",
    "Jet2",
    "ParseError",
    "parse",
]


class ExpressionError(ValueError):
    """Base class for expression parsing/evaluation failures."""


class ParseError(ExpressionError):
    def __init__(self, message: str, source: str, position: int):
        self.source = source
        self.position = position
        super().__init__(f"{message} at offset {position} in {source!r}")


class DomainError(ExpressionError):
    """Evaluation left the domain of a subexpression (log of a non-positive
    value, division by zero, ...).  Carries the offending subexpression."""

    def __init__(self, message: str, subexpression: str):
        self.subexpression = subexpression
        super().__init__(f"{message} in '{subexpression}'")


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int
    name: str


@dataclass(frozen=True)
class Unary:
    # op is "neg" or a function name: exp, log, sin, cos, sqrt, abs
    op: str
    child: "Node"


@dataclass(frozen=True)
class Binary:
    op: str  # + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Power:
    base: "Node"
    exponent: float  # constant exponent; integral values use repeated multiplication


Node = Union[Const, Var, Unary, Binary, Power]

_FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt", "abs")


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>\*\*|[-+*/^()])"
    r")"
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None or m.end() == pos:
            stripped = source[pos:].lstrip()
            if not stripped:
                break
            where = len(source) - len(stripped)
            raise ParseError(f"unexpected character {source[where]!r}", source, where)
        if m.group("number") is not None:
            tokens.append(("number", m.group("number"), m.start("number")))
        elif m.group("ident") is not None:
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            op = m.group("op")
            tokens.append(("op", "^" if op == "**" else op, m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


# ---------------------------------------------------------------------------
# Parser: precedence  ^  >  unary -  >  * /  >  + -

_VAR_PATTERN = re.compile(r"^x(\d+)$")


class _Parser:
    def __init__(self, source: str, dim: int, names: dict[str, int]):
        self.source = source
        self.dim = dim
        self.names = names
        self.tokens = _tokenize(source)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message):
        kind, text, where = self.peek()
        raise ParseError(message, self.source, where)

    def parse(self) -> Node:
        node = self.expr()
        kind, text, where = self.peek()
        if kind != "end":
            self.fail(f"unexpected token {text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.advance()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            op = self.advance()[1]
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek()[:2] == ("op", "-"):
            self.advance()
            return Unary("neg", self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.advance()
            exponent = self.exponent()
            return Power(base, exponent)
        return base

    def exponent(self) -> float:
        # Exponents must be constants (optionally signed, optionally
        # parenthesized); general expression exponents are out of scope.
        sign = 1.0
        while self.peek()[:2] == ("op", "-"):
            self.advance()
            sign = -sign
        kind, text, where = self.peek()
        if kind == "number":
            self.advance()
            return sign * float(text)
        if kind == "op" and text == "(":
            self.advance()
            value = self.exponent()
            self.expect(")")
            return sign * value
        self.fail("expected a constant exponent")

    def expect(self, op):
        kind, text, where = self.peek()
        if kind != "op" or text != op:
            self.fail(f"expected {op!r}")
        self.advance()

    def atom(self) -> Node:
        kind, text, where = self.advance()
        if kind == "number":
            return Const(float(text))
        if kind == "ident":
            if self.peek()[:2] == ("op", "("):
                if text not in _FUNCTIONS:
                    raise ParseError(f"unknown function {text!r}", self.source, where)
                self.advance()
                arg = self.expr()
                self.expect(")")
                return Unary(text, arg)
            if text in self.names:
                return Var(self.names[text], text)
            m = _VAR_PATTERN.match(text)
            if m is not None:
                raise ParseError(
                    f"variable {text!r} out of range for dimension {self.dim}",
                    self.source,
                    where,
                )
            raise ParseError(f"unknown identifier {text!r}", self.source, where)
        if kind == "op" and text == "(":
            self.pos -= 1
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            raise ParseError("unexpected end of input", self.source, where)
        raise ParseError(f"unexpected token {text!r}", self.source, where)


# ---------------------------------------------------------------------------
# Printer


def _fmt_number(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return repr(int(value))
    return repr(value)


def to_source(node: Node) -> str:
    """Render a node back to parseable infix text (canonical spacing)."""
    text, _prec = _render(node)
    return text


def _render(node: Node) -> tuple[str, int]:
    # precedence levels: add 1, mul 2, neg 3, pow 4, atom 5
    if isinstance(node, Const):
        text = _fmt_number(node.value)
        return (text, 3 if node.value < 0 else 5)
    if isinstance(node, Var):
        return (node.name, 5)
    if isinstance(node, Binary):
        # the right operand always gets the next level: reparsing is
        # left-associative, so "a + (b + c)" must keep its parentheses
        # to round-trip to an equal AST
        own = 1 if node.op in "+-" else 2
        lt = _wrap(node.left, own)
        rt = _wrap(node.right, own + 1)
        if own == 1:
            return (f"{lt} {node.op} {rt}", own)
        return (f"{lt}{node.op}{rt}", own)
    if isinstance(node, Unary):
        if node.op == "neg":
            return (f"-{_wrap(node.child, 3)}", 3)
        return (f"{node.op}({to_source(node.child)})", 5)
    if isinstance(node, Power):
        base = _wrap(node.base, 5)
        exp = _fmt_number(node.exponent)
        if node.exponent < 0:
            exp = f"({exp})"
        return (f"{base}^{exp}", 4)
    raise TypeError(f"not an expression node: {node!r}")


def _wrap(node: Node, minimum: int) -> str:
    text, prec = _render(node)
    if prec < minimum:
        return f"({text})"
    return text


# ---------------------------------------------------------------------------
# Jets


@dataclass
class Jet2:
    """Second-order forward jet: value, gradient, and (exactly symmetric)
    Hessian with respect to the chart coordinates.

    ``value`` has the batch shape ``S`` of the evaluation points, ``grad``
    has shape ``S + (n,)`` and ``hess`` shape ``S + (n, n)``.
    """

    value: np.ndarray
    grad: np.ndarray
    hess: np.ndarray


def _outer(ga: np.ndarray, gb: np.ndarray) -> np.ndarray:
    return ga[..., :, None] * gb[..., None, :]


def _sym_outer(ga: np.ndarray, gb: np.ndarray) -> np.ndarray:
    # a_i*b_j + b_i*a_j is bitwise symmetric because IEEE * and + commute
    return _outer(ga, gb) + _outer(gb, ga)


class _Evaluator:
    """Single recursion over the AST shared by the three evaluation orders.

    order 0: values only; 1: values + gradients; 2: full second-order jets.
    ``strict=False`` suppresses domain errors and lets NaN/inf propagate,
    which the geodesic stepper uses to detect chart exits without aborting
    a whole batch.
    """

    def __init__(self, dim: int, coords: np.ndarray, order: int, strict: bool):
        self.dim = dim
        self.coords = coords
        self.order = order
        self.strict = strict
        self.batch = coords.shape[:-1]

    def zeros_grad(self):
        return np.zeros(self.batch + (self.dim,))

    def zeros_hess(self):
        return np.zeros(self.batch + (self.dim, self.dim))

    def run(self, node: Node):
        v, g, h = self.visit(node)
        if self.order >= 1 and g is None:
            g = self.zeros_grad()
        if self.order >= 2 and h is None:
            h = self.zeros_hess()
        return v, g, h

    def visit(self, node: Node):
        # Returns (value, grad|None, hess|None); None stands for exact zero.
        if isinstance(node, Const):
            return (np.full(self.batch, node.value), None, None)
        if isinstance(node, Var):
            v = np.array(self.coords[..., node.index])
            g = None
            if self.order >= 1:
                g = self.zeros_grad()
                g[..., node.index] = 1.0
            return (v, g, None)
        if isinstance(node, Binary):
            return self.binary(node)
        if isinstance(node, Unary):
            if node.op == "neg":
                v, g, h = self.visit(node.child)
                return (-v, None if g is None else -g, None if h is None else -h)
            return self.function(node)
        if isinstance(node, Power):
            return self.power(node)
        raise TypeError(f"not an expression node: {node!r}")

    # -- helpers ----------------------------------------------------------

    def add_g(self, a, b):
        if a is None:
            return b
        if b is None:
            return a
        return a + b

    def binary(self, node: Binary):
        va, ga, ha = self.visit(node.left)
        if node.op == "+":
            vb, gb, hb = self.visit(node.right)
            return (va + vb, self.add_g(ga, gb), self.add_g(ha, hb))
        if node.op == "-":
            vb, gb, hb = self.visit(node.right)
            vb, gb, hb = -vb, None if gb is None else -gb, None if hb is None else -hb
            return (va + vb, self.add_g(ga, gb), self.add_g(ha, hb))
        if node.op == "*":
            vb, gb, hb = self.visit(node.right)
            return self.mul((va, ga, ha), (vb, gb, hb))
        # division: multiply by the reciprocal
        vb, gb, hb = self.visit(node.right)
        if self.strict and np.any(vb == 0.0):
            raise DomainError("division by zero", to_source(node))
        rec = self.compose((vb, gb, hb), 1.0 / vb, -1.0 / vb**2, 2.0 / vb**3)
        return self.mul((va, ga, ha), rec)

    def mul(self, a, b):
        va, ga, ha = a
        vb, gb, hb = b
        v = va * vb
        g = h = None
        if self.order >= 1:
            terms = []
            if gb is not None:
                terms.append(va[..., None] * gb)
            if ga is not None:
                terms.append(vb[..., None] * ga)
            g = sum(terms) if terms else None
        if self.order >= 2:
            terms = []
            if hb is not None:
                terms.append(va[..., None, None] * hb)
            if ha is not None:
                terms.append(vb[..., None, None] * ha)
            if ga is not None and gb is not None:
                terms.append(_sym_outer(ga, gb))
            h = sum(terms) if terms else None
        return (v, g, h)

    def compose(self, inner, f, fp, fpp):
        """Chain rule for a scalar function applied to an inner jet; f, fp,
        fpp are the already-evaluated function value and derivatives."""
        v, g, h = inner
        if g is None:  # constant subtree
            return (f, None, None)
        out_g = fp[..., None] * g if self.order >= 1 else None
        out_h = None
        if self.order >= 2:
            out_h = fpp[..., None, None] * _outer(g, g)
            if h is not None:
                out_h = out_h + fp[..., None, None] * h
        return (f, out_g, out_h)

    def function(self, node: Unary):
        v, g, h = self.visit(node.child)
        op = node.op
        with np.errstate(all="ignore"):
            if op == "exp":
                f = np.exp(v)
                return self.compose((v, g, h), f, f, f)
            if op == "log":
                if self.strict and np.any(v <= 0.0):
                    raise DomainError("log of a non-positive value", to_source(node))
                return self.compose((v, g, h), np.log(v), 1.0 / v, -1.0 / v**2)
            if op == "sin":
                s, c = np.sin(v), np.cos(v)
                return self.compose((v, g, h), s, c, -s)
            if op == "cos":
                s, c = np.sin(v), np.cos(v)
                return self.compose((v, g, h), c, -s, -c)
            if op == "sqrt":
                if self.strict and np.any(v < 0.0):
                    raise DomainError("sqrt of a negative value", to_source(node))
                r = np.sqrt(v)
                return self.compose((v, g, h), r, 0.5 / r, -0.25 / (v * r))
            if op == "abs":
                # derivative at 0 taken as 0; second derivative 0 away from 0
                sign = np.sign(v)
                return self.compose((v, g, h), np.abs(v), sign, np.zeros_like(v))
        raise TypeError(f"unknown function {op!r}")

    def power(self, node: Power):
        inner = self.visit(node.base)
        p = node.exponent
        if float(p).is_integer():
            return self.pow_int(inner, int(p), node)
        v = inner[0]
        if self.strict and np.any(v <= 0.0):
            raise DomainError(
                "non-integer power of a non-positive value", to_source(node)
            )
        with np.errstate(all="ignore"):
            return self.compose(
                inner, v**p, p * v ** (p - 1.0), p * (p - 1.0) * v ** (p - 2.0)
            )

    def pow_int(self, inner, k: int, node: Power):
        # integer exponents by repeated multiplication: exact for any base sign
        if k == 0:
            return (np.ones(self.batch), None, None)
        negative = k < 0
        k = abs(k)
        out = inner
        for _ in range(k - 1):
            out = self.mul(out, inner)
        if negative:
            v = out[0]
            if self.strict and np.any(v == 0.0):
                raise DomainError("zero raised to a negative power", to_source(node))
            with np.errstate(all="ignore"):
                out = self.compose(out, 1.0 / v, -1.0 / v**2, 2.0 / v**3)
        return out


# ---------------------------------------------------------------------------
# Public surface


@dataclass(frozen=True)
class Expression:
    """Immutable parsed expression over ``dim`` coordinates."""

    root: Node
    dim: int
    source: str

    def to_source(self) -> str:
        """Canonical re-parseable rendering of the AST."""
        return to_source(self.root)

    def __str__(self) -> str:
        return self.to_source()

    def value(self, point, strict: bool = True) -> np.ndarray:
        """Evaluate at ``point`` (shape ``(..., dim)``); returns shape ``(...)``."""
        coords = self._coords(point)
        return _Evaluator(self.dim, coords, 0, strict).run(self.root)[0]

    def jet1(self, point, strict: bool = True):
        """Value and gradient: shapes ``(...)`` and ``(..., dim)``."""
        coords = self._coords(point)
        v, g, _ = _Evaluator(self.dim, coords, 1, strict).run(self.root)
        return v, g

    def jet2(self, point, strict: bool = True) -> Jet2:
        """Full second-order jet (exact derivatives, no truncation error)."""
        coords = self._coords(point)
        v, g, h = _Evaluator(self.dim, coords, 2, strict).run(self.root)
        return Jet2(v, g, h)

    def variables(self) -> frozenset[int]:
        """Indices of coordinates the expression actually depends on."""
        found: set[int] = set()
        _collect_vars(self.root, found)
        return frozenset(found)

    def is_constant(self) -> bool:
        return not self.variables()

    def _coords(self, point) -> np.ndarray:
        coords = np.asarray(point, dtype=float)
        if coords.shape[-1:] != (self.dim,):
            raise ExpressionError(
                f"point has {coords.shape[-1] if coords.ndim else 0} coordinates, "
                f"expression expects {self.dim}"
            )
        return coords


def _collect_vars(node: Node, found: set[int]) -> None:
    if isinstance(node, Var):
        found.add(node.index)
    elif isinstance(node, Unary):
        _collect_vars(node.child, found)
    elif isinstance(node, Binary):
        _collect_vars(node.left, found)
        _collect_vars(node.right, found)
    elif isinstance(node, Power):
        _collect_vars(node.base, found)


def default_names(dim: int) -> dict[str, int]:
    return {f"x{i + 1}": i for i in range(dim)}


def parse(
    source: str, dim: int, aliases: Optional[dict[str, int]] = None
) -> Expression:
    """Parse infix ``source`` into an :class:`Expression` over ``dim`` variables.

    ``aliases`` maps extra variable names onto coordinate indices on top of
    the default ``x1 .. x{dim}``; chart families use it for their coordinate
    conventions (``t``, ``y``, ``u1``, ...).
    """
    if dim < 1:
        raise ExpressionError(f"dimension must be positive, got {dim}")
    names = default_names(dim)
    if aliases:
        for name, index in aliases.items():
            if not (0 <= index < dim):
                raise ExpressionError(
                    f"alias {name!r} points at coordinate {index}, "
                    f"dimension is {dim}"
                )
            names[name] = index
    root = _Parser(source, dim, names).parse()
    return Expression(root, dim, source)
