"""Expression language for germ descriptions.

Expressions are small immutable trees parsed from infix text such as
``abs(x*log(abs(x)))`` or ``norm(x, y)^0.5``.  Two evaluators are provided:
a scalar one built on :mod:`math` and an array one built on numpy that the
samplers use for bulk work.  Both report domain violations (log of a
non-positive number, division by zero, ...) as :class:`DomainError` instead
of letting NaN leak out.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError, ExpressionSyntaxError, UnknownFunction, UnknownVariable

UNARY_OPS = ("neg", "abs", "sqrt", "log", "exp", "sin", "cos")
BINARY_OPS = ("add", "sub", "mul", "div", "pow", "min", "max")

_INFIX = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}
_UNARY_FUNCS = ("abs", "sqrt", "log", "exp", "sin", "cos")
_BINARY_FUNCS = ("pow", "min", "max")


@dataclass(frozen=True)
class Const:
    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v) or v < 0:
            raise ValueError(f"constants must be finite and non-negative, got {self.value!r}")
        object.__setattr__(self, "value", v)


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    child: "Expression"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Norm:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("norm needs at least one argument")


Expression = Const | Var | Unary | Binary | Norm


# --------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^(),]))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ExpressionSyntaxError(pos, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        if kind == "op" and value == "**":
            value = "^"
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, allowed_vars):
        self.text = text
        self.allowed = set(allowed_vars)
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, value):
        kind, v, pos = self.tok
        if v != value or kind == "end":
            what = "end of input" if kind == "end" else repr(v)
            raise ExpressionSyntaxError(pos, f"expected {value!r}, found {what}")
        self.advance()

    def parse(self):
        node = self.expr()
        kind, v, pos = self.tok
        if kind != "end":
            raise ExpressionSyntaxError(pos, f"unexpected token {v!r}")
        return node

    def expr(self):
        node = self.term()
        while self.tok[0] == "op" and self.tok[1] in "+-":
            op = "add" if self.advance()[1] == "+" else "sub"
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok[0] == "op" and self.tok[1] in "*/":
            op = "mul" if self.advance()[1] == "*" else "div"
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        if self.tok[0] == "op" and self.tok[1] == "-":
            self.advance()
            return Unary("neg", self.unary())
        if self.tok[0] == "op" and self.tok[1] == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.advance()
            # right associative; the exponent may carry a sign
            return Binary("pow", base, self.unary())
        return base

    def atom(self):
        kind, v, pos = self.tok
        if kind == "num":
            self.advance()
            return Const(float(v))
        if kind == "name":
            self.advance()
            if self.tok[0] == "op" and self.tok[1] == "(":
                return self.call(v, pos)
            if v not in self.allowed:
                raise UnknownVariable(v)
            return Var(v)
        if kind == "op" and v == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        what = "end of input" if kind == "end" else repr(v)
        raise ExpressionSyntaxError(pos, f"expected an operand, found {what}")

    def call(self, name, pos):
        if name not in _UNARY_FUNCS and name not in _BINARY_FUNCS and name != "norm":
            raise UnknownFunction(name)
        self.expect("(")
        args = [self.expr()]
        while self.tok[0] == "op" and self.tok[1] == ",":
            self.advance()
            args.append(self.expr())
        self.expect(")")
        if name == "norm":
            return Norm(tuple(args))
        want = 1 if name in _UNARY_FUNCS else 2
        if len(args) != want:
            raise ExpressionSyntaxError(pos, f"{name} takes {want} argument(s), got {len(args)}")
        if want == 1:
            return Unary(name, args[0])
        return Binary(name, args[0], args[1])


def parse_expression(text: str, allowed_vars: Sequence[str]) -> Expression:
    """Parse infix ``text`` into an expression tree.

    Precedence from tightest: ``^`` (right associative, ``**`` is an alias),
    unary minus, ``* /``, ``+ -``.  Functions: abs, sqrt, log, exp, sin, cos,
    pow, min, max and the variadic ``norm(a, b, ...)``.
    """
    if not text or not text.strip():
        raise ExpressionSyntaxError(0, "empty expression")
    return _Parser(text, allowed_vars).parse()


# --------------------------------------------------------------------------
# printing

def _fmt_number(v):
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def print_expression(expr: Expression) -> str:
    if isinstance(expr, Const):
        return _fmt_number(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Unary):
        if expr.op == "neg":
            return f"(-{print_expression(expr.child)})"
        return f"{expr.op}({print_expression(expr.child)})"
    if isinstance(expr, Binary):
        a, b = print_expression(expr.left), print_expression(expr.right)
        if expr.op in _INFIX:
            return f"({a} {_INFIX[expr.op]} {b})"
        return f"{expr.op}({a}, {b})"
    if isinstance(expr, Norm):
        return "norm(" + ", ".join(print_expression(c) for c in expr.children) + ")"
    raise TypeError(f"not an expression node: {expr!r}")


def variables(expr: Expression) -> set:
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, Const):
        return set()
    if isinstance(expr, Unary):
        return variables(expr.child)
    if isinstance(expr, Binary):
        return variables(expr.left) | variables(expr.right)
    return set().union(*(variables(c) for c in expr.children))


# --------------------------------------------------------------------------
# scalar evaluation

def _is_integral(b):
    return b == math.floor(b) and abs(b) < 2.0**53


def _pow(a, b):
    if _is_integral(b):
        if a == 0.0 and b < 0:
            raise DomainError("zero raised to a negative power")
        try:
            return math.pow(a, b)
        except OverflowError:
            return math.copysign(math.inf, a) if (b % 2 == 1) else math.inf
    if a > 0.0:
        return _exp(b * math.log(a))
    if a == 0.0:
        if b > 0:
            return 0.0
        raise DomainError("zero raised to a negative power")
    raise DomainError("negative base with non-integer exponent")


def _exp(x):
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _eval(e, env):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise UnknownVariable(e.name) from None
    if isinstance(e, Unary):
        x = _eval(e.child, env)
        op = e.op
        if op == "neg":
            return -x
        if op == "abs":
            return abs(x)
        if op == "sqrt":
            if x < 0:
                raise DomainError(f"sqrt of negative number {x!r}")
            return math.sqrt(x)
        if op == "log":
            if not x > 0:
                raise DomainError(f"log of non-positive number {x!r}")
            return math.log(x)
        if op == "exp":
            return _exp(x)
        if op in ("sin", "cos"):
            if math.isinf(x):
                raise DomainError(f"{op} of infinity")
            return math.sin(x) if op == "sin" else math.cos(x)
        raise UnknownFunction(op)
    if isinstance(e, Binary):
        a = _eval(e.left, env)
        b = _eval(e.right, env)
        op = e.op
        if op == "add":
            r = a + b
        elif op == "sub":
            r = a - b
        elif op == "mul":
            r = a * b
        elif op == "div":
            if b == 0:
                raise DomainError("division by zero")
            r = a / b
        elif op == "pow":
            r = _pow(a, b)
        elif op == "min":
            r = min(a, b)
        elif op == "max":
            r = max(a, b)
        else:
            raise UnknownFunction(op)
        if math.isnan(r):
            raise DomainError(f"{op} produced NaN")
        return r
    if isinstance(e, Norm):
        s = 0.0
        for c in e.children:
            v = _eval(c, env)
            s += v * v
        return math.sqrt(s)
    raise TypeError(f"not an expression node: {e!r}")


def evaluate(expr: Expression, assignment: Mapping[str, float]) -> float:
    """Evaluate ``expr`` at one point with IEEE double semantics."""
    env = {k: float(v) for k, v in assignment.items()}
    missing = variables(expr) - env.keys()
    if missing:
        raise UnknownVariable(sorted(missing)[0])
    return _eval(expr, env)


# --------------------------------------------------------------------------
# array evaluation

def _aeval(e, env, shape):
    """Return (values, invalid_mask); invalid entries hold NaN."""
    if isinstance(e, Const):
        return np.full(shape, e.value), np.zeros(shape, dtype=bool)
    if isinstance(e, Var):
        v = env[e.name]
        return v.copy(), ~np.isfinite(v)
    if isinstance(e, Unary):
        x, bad = _aeval(e.child, env, shape)
        op = e.op
        if op == "neg":
            r = -x
        elif op == "abs":
            r = np.abs(x)
        elif op == "sqrt":
            bad = bad | (x < 0)
            r = np.sqrt(np.where(bad, 0.0, x))
        elif op == "log":
            bad = bad | ~(x > 0)
            r = np.log(np.where(bad, 1.0, x))
        elif op == "exp":
            r = np.exp(x)
        elif op == "sin":
            bad = bad | np.isinf(x)
            r = np.sin(np.where(bad, 0.0, x))
        elif op == "cos":
            bad = bad | np.isinf(x)
            r = np.cos(np.where(bad, 0.0, x))
        else:
            raise UnknownFunction(op)
    elif isinstance(e, Binary):
        a, bad_a = _aeval(e.left, env, shape)
        b, bad_b = _aeval(e.right, env, shape)
        bad = bad_a | bad_b
        op = e.op
        if op == "add":
            r = a + b
        elif op == "sub":
            r = a - b
        elif op == "mul":
            r = a * b
        elif op == "div":
            bad = bad | (b == 0)
            r = a / np.where(bad, 1.0, b)
        elif op == "pow":
            integral = (b == np.floor(b)) & (np.abs(b) < 2.0**53)
            bad = bad | ((a == 0) & (b < 0)) | ((a < 0) & ~integral)
            safe_a = np.where(bad, 1.0, a)
            r_int = np.power(safe_a, np.where(integral, b, 0.0))
            pos = safe_a > 0
            r_frac = np.where(
                pos, np.exp(b * np.log(np.where(pos, safe_a, 1.0))), 0.0
            )
            r = np.where(integral, r_int, r_frac)
        elif op == "min":
            r = np.minimum(a, b)
        elif op == "max":
            r = np.maximum(a, b)
        else:
            raise UnknownFunction(op)
    elif isinstance(e, Norm):
        s = np.zeros(shape)
        bad = np.zeros(shape, dtype=bool)
        for c in e.children:
            v, bc = _aeval(c, env, shape)
            s = s + v * v
            bad = bad | bc
        r = np.sqrt(s)
    else:
        raise TypeError(f"not an expression node: {e!r}")
    bad = bad | np.isnan(r)
    return np.where(bad, np.nan, r), bad


def evaluate_array(expr: Expression, arrays: Mapping[str, np.ndarray], strict: bool = True):
    """Vectorized evaluation over equally shaped arrays.

    With ``strict=True`` any domain violation raises :class:`DomainError`.
    With ``strict=False`` the pair ``(values, valid)`` is returned and the
    invalid entries are NaN; samplers use this to reject proposals.
    """
    env = {k: np.asarray(v, dtype=float) for k, v in arrays.items()}
    missing = variables(expr) - env.keys()
    if missing:
        raise UnknownVariable(sorted(missing)[0])
    shape = np.broadcast_shapes(*(v.shape for v in env.values())) if env else ()
    env = {k: np.broadcast_to(v, shape) for k, v in env.items()}
    with np.errstate(all="ignore"):
        values, bad = _aeval(expr, env, shape)
    if strict:
        if np.any(bad):
            raise DomainError(f"{int(np.sum(bad))} evaluation point(s) outside the domain")
        return values
    return values, ~bad


def evaluate_columns(exprs: Sequence[Expression], names: Sequence[str], X: np.ndarray, strict=True):
    """Evaluate several expressions on the rows of ``X`` (columns = ``names``).

    Returns an ``(len(X), len(exprs))`` array, or ``(values, valid)`` when
    ``strict`` is False.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    env = {name: X[:, i] for i, name in enumerate(names)}
    out = np.empty((X.shape[0], len(exprs)))
    valid = np.ones(X.shape[0], dtype=bool)
    for j, e in enumerate(exprs):
        v, ok = evaluate_array(e, env, strict=False)
        out[:, j] = v
        valid &= ok
    if strict:
        if not valid.all():
            raise DomainError(f"{int((~valid).sum())} evaluation point(s) outside the domain")
        return out
    return out, valid
