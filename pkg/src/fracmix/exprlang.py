"""A small expression language for nonlinearities ``f(t, u)`` and sources ``y(t)``.

Grammar (``^`` binds tighter than unary minus and is right-associative)::

    expr  := term (("+" | "-") term)*
    term  := unary (("*" | "/") unary)*
    unary := "-" unary | power
    power := atom ("^" unary)?
    atom  := NUMBER | "t" | "u" | NAME "(" args ")" | "(" expr ")"
    args  := expr ("," expr)*          # phi_p separates p from x with ";"

Literals are non-negative; ``-2`` parses as ``Neg(Num(2))``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma

from .errors import FracMixError, NumericError

VARIABLES = ("t", "u")
# name -> (min args, max args); None means unbounded
FUNCTIONS = {
    "log": (1, 1),
    "exp": (1, 1),
    "abs": (1, 1),
    "sqrt": (1, 1),
    "gamma": (1, 1),
    "min": (2, None),
    "max": (2, None),
    "phi_p": (2, 2),
}


class ExprSyntaxError(SyntaxError):
    """Parse failure at ``offset`` (0-based) with the set of tokens that would have fit."""

    def __init__(self, message, offset, expected=()):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.expected = frozenset(expected)


class EvalError(NumericError):
    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class UnknownBuiltin(FracMixError, KeyError):
    pass


# ---------------------------------------------------------------- AST


@dataclass(frozen=True)
class Num:
    value: float

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value >= 0):
            raise ValueError("literals are finite and non-negative; use Neg for the sign")


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Expr = Num | Var | Neg | BinOp | Call


def lit(x):
    """Literal node for any finite float (negative values become ``Neg``)."""
    x = float(x)
    return Neg(Num(-x)) if x < 0 or (x == 0 and math.copysign(1, x) < 0) else Num(x)


# ---------------------------------------------------------------- lexer


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),;]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(src):
    toks = []
    pos = 0
    while True:
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            rest = src[pos:]
            if rest.strip() == "":
                toks.append(_Tok("end", "", len(src.rstrip()) if rest else pos))
                return toks
            off = pos + (len(rest) - len(rest.lstrip()))
            raise ExprSyntaxError(f"unexpected character {src[off]!r}", off, ("number", "name", "operator"))
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()


# ---------------------------------------------------------------- parser


class _Parser:
    def __init__(self, src):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def fail(self, expected):
        tok = self.tok
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ExprSyntaxError(f"unexpected {what}", tok.pos, expected)

    def accept(self, text):
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            self.fail({text})

    def parse(self):
        if self.tok.kind == "end":
            self.fail({"expression"})
        node = self.expr()
        if self.tok.kind != "end":
            self.fail({"+", "-", "*", "/", "^", "end of input"})
        return node

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.accept("^"):
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "name":
            self.i += 1
            if tok.text in VARIABLES:
                return Var(tok.text)
            if tok.text not in FUNCTIONS:
                raise ExprSyntaxError(
                    f"unknown identifier {tok.text!r}", tok.pos, set(VARIABLES) | set(FUNCTIONS)
                )
            return self.call(tok)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        self.fail({"number", "t", "u", "function", "(", "-"})

    def call(self, tok):
        name = tok.text
        self.expect("(")
        args = [self.expr()]
        if name == "phi_p":
            self.expect(";")
            args.append(self.expr())
        else:
            while self.accept(","):
                args.append(self.expr())
        self.expect(")")
        lo, hi = FUNCTIONS[name]
        if len(args) < lo or (hi is not None and len(args) > hi):
            count = f"{lo}" if hi == lo else f"at least {lo}"
            raise ExprSyntaxError(f"{name} expects {count} argument(s), got {len(args)}", tok.pos, {")"})
        return Call(name, tuple(args))


def parse(src: str):
    """Parse ``src`` into an immutable AST; raises :class:`ExprSyntaxError`."""
    if not isinstance(src, str) or not src.strip():
        raise ExprSyntaxError("empty expression", 0, {"expression"})
    return _Parser(src).parse()


# ---------------------------------------------------------------- printer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node):
    if isinstance(node, BinOp):
        return 4 if node.op == "^" else _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    return 5


def _wrap(node, ok):
    text = to_text(node)
    return text if ok else f"({text})"


def to_text(node) -> str:
    """Render with the fewest parentheses that reparse to the same tree."""
    if isinstance(node, Num):
        v = node.value
        return str(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, _prec(node.operand) >= 3)
    if isinstance(node, Call):
        sep = "; " if node.name == "phi_p" else ", "
        return f"{node.name}({sep.join(to_text(a) for a in node.args)})"
    if node.op == "^":
        return _wrap(node.left, _prec(node.left) == 5) + "^" + _wrap(node.right, _prec(node.right) >= 3)
    p = _PREC[node.op]
    left = _wrap(node.left, _prec(node.left) >= p)
    right = _wrap(node.right, _prec(node.right) > p)
    return f"{left} {node.op} {right}"


# ---------------------------------------------------------------- evaluation


def phi_p(p, x):
    """``x |x|^(p-1)``."""
    x = np.asarray(x, dtype=float)
    return x * np.abs(x) ** (np.asarray(p, dtype=float) - 1.0)


def _fail(node, why):
    raise EvalError(f"{why} in {to_text(node)}", node)


def _finite(node, val):
    if not np.all(np.isfinite(val)):
        _fail(node, "non-finite result")
    return val


def evaluate(node, t, u):
    """Evaluate with numpy broadcasting over ``t`` and ``u``."""
    t = np.asarray(t, dtype=float)
    u = np.asarray(u, dtype=float)
    with np.errstate(all="ignore"):
        return _eval(node, t, u)


def _eval(node, t, u):
    if isinstance(node, Num):
        return np.float64(node.value)
    if isinstance(node, Var):
        return t if node.name == "t" else u
    if isinstance(node, Neg):
        return -_eval(node.operand, t, u)
    if isinstance(node, BinOp):
        a = _eval(node.left, t, u)
        b = _eval(node.right, t, u)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if np.any(b == 0):
                _fail(node, "division by zero")
            return a / b
        return _finite(node, np.power(a, b))
    args = [_eval(a, t, u) for a in node.args]
    name = node.name
    x = args[0]
    if name == "log":
        if np.any(x <= 0):
            _fail(node, "log of a non-positive value")
        return np.log(x)
    if name == "sqrt":
        if np.any(x < 0):
            _fail(node, "sqrt of a negative value")
        return np.sqrt(x)
    if name == "exp":
        return _finite(node, np.exp(x))
    if name == "abs":
        return np.abs(x)
    if name == "gamma":
        return _finite(node, _gamma(x))
    if name == "min":
        return np.minimum.reduce(np.broadcast_arrays(*args))
    if name == "max":
        return np.maximum.reduce(np.broadcast_arrays(*args))
    return _finite(node, phi_p(args[0], args[1]))


def to_callable(node):
    """``f(t, u)`` returning an array broadcast to the shape of the inputs."""

    def f(t, u=0.0):
        t = np.asarray(t, dtype=float)
        u = np.asarray(u, dtype=float)
        val = evaluate(node, t, u)
        return np.broadcast_to(val, np.broadcast_shapes(t.shape, u.shape, np.shape(val))).astype(float)

    f.expr = node
    return f


# ---------------------------------------------------------------- builtins


def _example1a():
    return parse("(1+t)*log(2+u)")


def _example1b(a=2.0):
    return BinOp("*", parse("2-t"), BinOp("^", Var("u"), lit(a)))


def _example2():
    return parse("t*(u+1)/(u+2)")


def _example3(p=2.0, lam=0.0, alpha=1.5):
    return BinOp(
        "-",
        Call("phi_p", (lit(p), Var("u"))),
        BinOp("*", lit(lam), BinOp("^", Var("t"), lit(alpha))),
    )


BUILTINS = {
    "example1a": _example1a,
    "example1b": _example1b,
    "example2": _example2,
    "example3": _example3,
}


def builtin(name, **params):
    """Registered nonlinearity with its parameters bound."""
    try:
        make = BUILTINS[name]
    except KeyError:
        raise UnknownBuiltin(f"unknown builtin {name!r}; known: {', '.join(BUILTINS)}") from None
    try:
        return make(**params)
    except TypeError as exc:
        raise UnknownBuiltin(f"bad parameters for {name}: {exc}") from None


_SPEC = re.compile(r"^\s*([A-Za-z_][A-Za-z_0-9]*)\s*(?:\((.*)\))?\s*$")


def builtin_from_text(text):
    """``"example3(p=2, lam=-0.5, alpha=1.5)"`` -> bound builtin."""
    m = _SPEC.match(text)
    if m is None:
        raise UnknownBuiltin(f"cannot read builtin spec {text!r}")
    params = {}
    if m.group(2) and m.group(2).strip():
        for item in m.group(2).split(","):
            key, sep, val = item.partition("=")
            if not sep:
                raise UnknownBuiltin(f"builtin parameters are key=value, got {item.strip()!r}")
            try:
                params[key.strip()] = float(val)
            except ValueError:
                raise UnknownBuiltin(f"non-numeric value for {key.strip()}") from None
    return builtin(m.group(1), **params)
