"""Textual expression language: parse, print, and lower to rational functions.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' int)?
    base   := int | ident tick* | '(' expr ')' | '-' base

Note that unary minus is part of ``base``, so ``-y^2`` means ``(-y)^2``.
Exponents are integer literals (an optional leading ``-`` is accepted).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .algebra import Derivation, Kind, RationalFunction, Var, as_rf
from .errors import DivisionByZero, ParseError, TickError, UndeclaredIdentifier


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Name:
    name: str
    ticks: int = 0


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


Expr = Int | Name | Neg | BinOp | Pow


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", text[i:j], i))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
        elif c in "+-*/^()'":
            tokens.append((c, c, i))
            i += 1
        else:
            raise ParseError(f"unknown character {c!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind, what):
        tok = self.take()
        if tok[0] != kind:
            raise ParseError(f"expected {what}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def expr(self):
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] in ("*", "/"):
            op = self.take()[0]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        node = self.base()
        if self.peek()[0] == "^":
            self.take()
            sign = 1
            if self.peek()[0] == "-":
                self.take()
                sign = -1
            tok = self.take()
            if tok[0] != "int":
                raise ParseError("exponent must be an integer literal", tok[2])
            node = Pow(node, sign * int(tok[1]))
        return node

    def base(self):
        tok = self.take()
        kind = tok[0]
        if kind == "int":
            return Int(int(tok[1]))
        if kind == "ident":
            ticks = 0
            while self.peek()[0] == "'":
                self.take()
                ticks += 1
            return Name(tok[1], ticks)
        if kind == "(":
            node = self.expr()
            self.expect(")", "')'")
            return node
        if kind == "-":
            return Neg(self.base())
        raise ParseError(f"unexpected {tok[1] or 'end of input'!r}", tok[2])


def parse(text: str) -> Expr:
    p = _Parser(text)
    node = p.expr()
    tok = p.peek()
    if tok[0] != "end":
        raise ParseError(f"unexpected {tok[1]!r}", tok[2])
    return node


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Pow):
        return 3
    return 4


def format(e: Expr) -> str:  # noqa: A001 - mirrors the public operation name
    """Print with the fewest parentheses that parse back to the same tree."""
    if isinstance(e, Int):
        return str(e.value)
    if isinstance(e, Name):
        return e.name + "'" * e.ticks
    if isinstance(e, Neg):
        inner = format(e.operand)
        return "-" + (inner if _prec(e.operand) == 4 else f"({inner})")
    if isinstance(e, Pow):
        inner = format(e.base)
        if _prec(e.base) < 4:
            inner = f"({inner})"
        return f"{inner}^{e.exponent}"
    p = _PREC[e.op]
    left = format(e.left)
    if _prec(e.left) < p:
        left = f"({left})"
    right = format(e.right)
    if _prec(e.right) <= p:
        right = f"({right})"
    if p == 1:
        return f"{left} {e.op} {right}"
    return f"{left}{e.op}{right}"


def declare(names: Mapping[str, str | Kind]) -> dict:
    """Build a lowering context ``{name: Var}`` from ``{name: kind}``."""
    return {n: Var(n, k) for n, k in names.items()}


def lower(e: Expr, ctx: Mapping[str, Var], d: Derivation | None = None) -> RationalFunction:
    """Lower an AST to a rational function.

    A ticked name ``y'`` resolves to the context entry ``"y'"`` when declared
    (second-order contexts), otherwise to ``d`` applied to ``y``.
    """
    if isinstance(e, Int):
        return as_rf(e.value)
    if isinstance(e, Name):
        if e.name not in ctx:
            raise UndeclaredIdentifier(e.name)
        var = ctx[e.name]
        if not e.ticks:
            return as_rf(var)
        if var.kind is not Kind.DEPENDENT:
            raise TickError(f"derivative tick on non-dependent variable {e.name!r}")
        ticked = e.name + "'" * e.ticks
        if ticked in ctx:
            return as_rf(ctx[ticked])
        if d is None:
            raise TickError(f"no derivative available for {ticked!r}")
        value = as_rf(var)
        for _ in range(e.ticks):
            value = d(value)
        return value
    if isinstance(e, Neg):
        return -lower(e.operand, ctx, d)
    if isinstance(e, Pow):
        base = lower(e.base, ctx, d)
        if e.exponent < 0 and base.is_zero():
            raise DivisionByZero("negative power of zero")
        return base ** e.exponent
    left, right = lower(e.left, ctx, d), lower(e.right, ctx, d)
    if e.op == "+":
        return left + right
    if e.op == "-":
        return left - right
    if e.op == "*":
        return left * right
    if right.is_zero():
        raise DivisionByZero("division by zero in expression")
    return left / right


def lower_solution(e: Expr, ctx: Mapping[str, Var]) -> RationalFunction:
    """Lower an expression meant as a closed-form solution y(t, params).

    Derivative ticks are rejected: solutions are functions of t and constants only.
    """
    if _has_ticks(e):
        raise TickError("derivative ticks are not allowed in solution expressions")
    r = lower(e, ctx)
    bad = [v.name for v in r.variables if v.kind is Kind.DEPENDENT]
    if bad:
        raise TickError(f"solution expression depends on dependent variables {sorted(bad)}")
    return r


def _has_ticks(e: Expr) -> bool:
    if isinstance(e, Name):
        return e.ticks > 0
    if isinstance(e, Neg):
        return _has_ticks(e.operand)
    if isinstance(e, Pow):
        return _has_ticks(e.base)
    if isinstance(e, BinOp):
        return _has_ticks(e.left) or _has_ticks(e.right)
    return False


def parse_rf(text: str, ctx: Mapping[str, Var], d: Derivation | None = None) -> RationalFunction:
    return lower(parse(text), ctx, d)


__all__ = [
    "Int", "Name", "Neg", "BinOp", "Pow", "Expr", "parse", "format", "lower",
    "lower_solution", "parse_rf", "declare",
]
