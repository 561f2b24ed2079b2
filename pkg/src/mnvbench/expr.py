"""Parser for polynomial / rational expressions in ``x``, ``y``, ``s`` and ``i``.

Grammar (highest binding last)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom (("^" | "**") INT)?
    atom   := INT | "x" | "y" | "s" | "i" | "(" expr ")"

A ratio literal ``a/b`` is ordinary division of two integers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .algebra import GaussRational, I, RationalFn, SparsePoly, format_gauss

MAX_INPUT = 64 * 1024


class ParseError(ValueError):
    def __init__(self, message: str, position: int, expected: frozenset[str] = frozenset()):
        detail = f" (expected one of: {', '.join(sorted(expected))})" if expected else ""
        super().__init__(f"{message} at position {position}{detail}")
        self.position = position
        self.expected = expected


@dataclass(frozen=True)
class Const:
    value: GaussRational

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", GaussRational.coerce(self.value))


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


Expr = Union[Const, Var, Neg, BinOp, Pow]

_TOKEN = re.compile(r"\s*(?:(\d+)|(\*\*|[-+*/^()])|([A-Za-z_]\w*))")
_VARS = ("x", "y", "s", "i")
_ATOM_START = frozenset({"integer", "x", "y", "s", "i", "("})


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                start = len(text) - len(text[pos:].lstrip())
                raise ParseError(f"unexpected character {text[start]!r}", start)
            start = m.start(m.lastindex)
            if m.group(1):
                self.tokens.append(("int", m.group(1), start))
            elif m.group(2):
                op = "^" if m.group(2) == "**" else m.group(2)
                self.tokens.append(("op", op, start))
            else:
                name = m.group(3)
                if name not in _VARS:
                    raise ParseError(f"unknown identifier {name!r}", start, frozenset(_VARS))
                self.tokens.append(("var", name, start))
            pos = m.end()
        self.end = len(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def pos(self) -> int:
        tok = self.peek()
        return tok[2] if tok else self.end

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def at_op(self, *ops: str) -> bool:
        tok = self.peek()
        return tok is not None and tok[0] == "op" and tok[1] in ops

    def parse(self) -> Expr:
        node = self.expr()
        if self.peek() is not None:
            raise ParseError(
                f"unexpected token {self.peek()[1]!r}",
                self.pos(),
                frozenset({"+", "-", "*", "/", "^", "end of input"}),
            )
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.at_op("+", "-"):
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.at_op("*", "/"):
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.at_op("-"):
            self.take()
            return Neg(self.unary())
        if self.at_op("+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.at_op("^"):
            self.take()
            tok = self.peek()
            if tok is None or tok[0] != "int":
                raise ParseError("exponent must be a non-negative integer", self.pos(), frozenset({"integer"}))
            self.take()
            if self.at_op("^"):
                raise ParseError("chained powers need parentheses", self.pos())
            return Pow(base, int(tok[1]))
        return base

    def atom(self) -> Expr:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.end, _ATOM_START)
        kind, val, _ = tok
        if kind == "int":
            self.take()
            return Const(GaussRational(Fraction(int(val))))
        if kind == "var":
            self.take()
            return Var(val)
        if kind == "op" and val == "(":
            self.take()
            node = self.expr()
            if not self.at_op(")"):
                raise ParseError("missing closing parenthesis", self.pos(), frozenset({")"}))
            self.take()
            return node
        raise ParseError(f"unexpected token {val!r}", tok[2], _ATOM_START)


def parse_expr(text: str) -> Expr:
    if len(text.encode("utf-8")) > MAX_INPUT:
        raise ParseError("input exceeds 64 KiB", MAX_INPUT)
    return _Parser(text).parse()


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    if isinstance(node, Const):
        v = node.value
        plain = v.im == 0 and v.re >= 0 and v.re.denominator == 1
        return 5 if plain else 0
    return 5


def to_text(node: Expr) -> str:
    """Print with the fewest parentheses that reparse to the same tree."""
    if isinstance(node, Const):
        return format_gauss(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        inner = to_text(node.operand)
        return f"-{inner}" if _prec(node.operand) >= 3 else f"-({inner})"
    if isinstance(node, Pow):
        inner = to_text(node.base)
        return f"{inner}^{node.exponent}" if _prec(node.base) >= 5 else f"({inner})^{node.exponent}"
    p = _PREC[node.op]
    left = to_text(node.left)
    right = to_text(node.right)
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p:
        right = f"({right})"
    return f"{left} {node.op} {right}"


_VAR_VALUES = {"x": SparsePoly.var("x"), "y": SparsePoly.var("y"), "s": SparsePoly.var("s"), "i": I}


def lower(node: Expr) -> RationalFn:
    """Exact rational function denoted by the tree."""
    if isinstance(node, Const):
        return RationalFn(SparsePoly.const(node.value))
    if isinstance(node, Var):
        return RationalFn(_VAR_VALUES[node.name])
    if isinstance(node, Neg):
        return -lower(node.operand)
    if isinstance(node, Pow):
        return lower(node.base) ** node.exponent
    a, b = lower(node.left), lower(node.right)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    return a / b


def parse_rational(text: str) -> RationalFn:
    return lower(parse_expr(text))
