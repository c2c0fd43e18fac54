"""Arithmetic expression language for periodic metric coefficients.

Grammar (single-token lookahead, left associative):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := atom ('^' int)?
    atom   := number | 'pi' | 'x'digits | func '(' expr ')' | '(' expr ')' | '-' atom
    func   := 'sin' | 'cos' | 'exp'

Trees evaluate on scalars or numpy arrays; division by zero and non-finite
results raise EvaluationError instead of propagating inf/nan.
"""

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    DepthExceeded,
    EvaluationError,
    ExprSyntaxError,
    UnknownVariable,
)
from .algebra import group_multiply

MAX_DEPTH = 64


# --- AST nodes ------------------------------------------------------------

@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str  # '+', '-', '*', '/'
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Func:
    name: str  # 'sin', 'cos', 'exp'
    arg: object


_FUNCS = ("sin", "cos", "exp")

_NUMBER_RE = re.compile(r"(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?")


def _tokenize(text):
    """Yields (kind, value, offset) triples; raises ExprSyntaxError on junk."""
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _NUMBER_RE.match(text, pos)
        if m:
            tokens.append(("number", float(m.group(0)), pos))
            pos = m.end()
            continue
        ch = text[pos]
        if ch.isalpha() or ch == "_":
            end = pos + 1
            while end < len(text) and (text[end].isalnum() or text[end] == "_"):
                end += 1
            tokens.append(("name", text[pos:end], pos))
            pos = end
            continue
        if ch in "+-*/^()":
            tokens.append((ch, ch, pos))
            pos += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", pos, expected=("token",))
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens, dim):
        self.tokens = tokens
        self.dim = dim
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            raise ExprSyntaxError(
                f"expected {kind!r}, found {tok[1]!r}", tok[2], expected=(kind,)
            )
        return self.next()

    def parse_expr(self, depth):
        if depth > MAX_DEPTH:
            raise DepthExceeded(f"expression nests deeper than {MAX_DEPTH}")
        node = self.parse_term(depth + 1)
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            node = BinOp(op, node, self.parse_term(depth + 1))
        return node

    def parse_term(self, depth):
        if depth > MAX_DEPTH:
            raise DepthExceeded(f"expression nests deeper than {MAX_DEPTH}")
        node = self.parse_factor(depth + 1)
        while self.peek()[0] in ("*", "/"):
            op = self.next()[0]
            node = BinOp(op, node, self.parse_factor(depth + 1))
        return node

    def parse_factor(self, depth):
        if depth > MAX_DEPTH:
            raise DepthExceeded(f"expression nests deeper than {MAX_DEPTH}")
        node = self.parse_atom(depth + 1)
        if self.peek()[0] == "^":
            self.next()
            node = Pow(node, self.parse_int_exponent())
        return node

    def parse_int_exponent(self):
        sign = 1
        tok = self.peek()
        if tok[0] == "-":
            self.next()
            sign = -1
            tok = self.peek()
        if tok[0] != "number" or tok[1] != int(tok[1]):
            raise ExprSyntaxError(
                "exponent must be an integer", tok[2], expected=("integer",)
            )
        self.next()
        return sign * int(tok[1])

    def parse_atom(self, depth):
        if depth > MAX_DEPTH:
            raise DepthExceeded(f"expression nests deeper than {MAX_DEPTH}")
        kind, value, offset = self.peek()
        if kind == "number":
            self.next()
            return Number(value)
        if kind == "-":
            self.next()
            return Neg(self.parse_atom(depth + 1))
        if kind == "(":
            self.next()
            node = self.parse_expr(depth + 1)
            self.expect(")")
            return node
        if kind == "name":
            self.next()
            if value == "pi":
                return Pi()
            if value in _FUNCS:
                self.expect("(")
                arg = self.parse_expr(depth + 1)
                self.expect(")")
                return Func(value, arg)
            m = re.fullmatch(r"x(\d+)", value)
            if m:
                index = int(m.group(1))
                if not 1 <= index <= self.dim:
                    raise UnknownVariable(value, self.dim, offset)
                return Var(index)
            raise ExprSyntaxError(
                f"unknown name {value!r}", offset, expected=("pi", "x<i>") + _FUNCS
            )
        raise ExprSyntaxError(
            f"expected a value, found {value!r}",
            offset,
            expected=("number", "name", "(", "-"),
        )


def parse(text, dim):
    """Parse an expression for a dim-dimensional algebra into an AST."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0, expected=("expression",))
    parser = _Parser(_tokenize(text), dim)
    node = parser.parse_expr(0)
    kind, value, offset = parser.peek()
    if kind != "end":
        raise ExprSyntaxError(
            f"trailing input {value!r}", offset, expected=("end", "+", "-", "*", "/")
        )
    return node


def constant(value):
    return Number(float(value))


def evaluate(node, x):
    """Evaluate an AST at x (sequence of coordinates, scalars or arrays)."""
    out = _eval(node, x)
    if np.any(~np.isfinite(out)):
        raise EvaluationError("expression evaluated to a non-finite value")
    return out


def _eval(node, x):
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Pi):
        return math.pi
    if isinstance(node, Var):
        return np.asarray(x[node.index - 1], dtype=np.float64)
    if isinstance(node, Neg):
        return -_eval(node.arg, x)
    if isinstance(node, BinOp):
        a = _eval(node.left, x)
        b = _eval(node.right, x)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if np.any(b == 0):
            raise EvaluationError("division by zero")
        return a / b
    if isinstance(node, Pow):
        base = _eval(node.base, x)
        if node.exponent < 0 and np.any(base == 0):
            raise EvaluationError("zero raised to a negative power")
        return np.power(base, node.exponent)
    if isinstance(node, Func):
        arg = _eval(node.arg, x)
        if node.name == "sin":
            return np.sin(arg)
        if node.name == "cos":
            return np.cos(arg)
        return np.exp(arg)
    raise TypeError(f"not an AST node: {node!r}")


def variables_used(node):
    """Set of 1-based variable indices appearing in the tree."""
    if isinstance(node, Var):
        return {node.index}
    if isinstance(node, Neg):
        return variables_used(node.arg)
    if isinstance(node, BinOp):
        return variables_used(node.left) | variables_used(node.right)
    if isinstance(node, Pow):
        return variables_used(node.base)
    if isinstance(node, Func):
        return variables_used(node.arg)
    return set()


def pretty(node):
    """Deterministic text form; pretty(parse(s)) reparses to the same tree."""
    if isinstance(node, Number):
        return repr(node.value)
    if isinstance(node, Pi):
        return "pi"
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Neg):
        return f"-({pretty(node.arg)})"
    if isinstance(node, BinOp):
        return f"({pretty(node.left)} {node.op} {pretty(node.right)})"
    if isinstance(node, Pow):
        return f"({pretty(node.base)})^{node.exponent}"
    if isinstance(node, Func):
        return f"{node.name}({pretty(node.arg)})"
    raise TypeError(f"not an AST node: {node!r}")


def check_lattice_periodicity(node, algebra, samples=200, tol=1e-9, rng=None):
    """Statistically test invariance under the lattice generators.

    Compares evaluate(gamma * x) to evaluate(x) for `samples` random points
    and each generator gamma = exp(X_j); returns (passed, worst_violation).
    """
    if samples < 100:
        raise ValueError("need at least 100 samples for the periodicity check")
    rng = np.random.default_rng(0) if rng is None else rng
    n = algebra.dim
    pts = rng.uniform(-2.0, 2.0, size=(samples, n))
    worst = 0.0
    base = evaluate(node, pts.T)
    for j in range(n):
        gen = np.zeros(n)
        gen[j] = 1.0
        shifted = group_multiply(algebra, gen, pts)
        vals = evaluate(node, shifted.T)
        worst = max(worst, float(np.max(np.abs(vals - base))))
    return worst <= tol, worst
