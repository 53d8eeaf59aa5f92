"""A small expression language for scalar fields on R^4.

Grammar (whitespace insignificant, ``#`` comments to end of line)::

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := "-" factor | power
    power  := atom ("^" exponent)?
    atom   := literal | var | "(" expr ")" | func "(" expr ")"
    exponent := literal | "(" literal ")"      # literal may be signed here
    literal  := decimal | integer "/" integer

Decimal literals are kept as exact fractions.  An integer literal followed
by ``/`` and another integer literal is read as a single rational constant,
so ``1/2*x1`` is ``Const(1/2) * x1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .jets import DomainError, apply_func, is_exact

FUNCS = ("exp", "ln", "abs", "sqrt", "sin", "cos")
TRANSCENDENTAL = frozenset({"exp", "ln", "sin", "cos", "sqrt"})


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte offset {offset}")
        self.offset = offset


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Var:
    index: int  # 1..4

    def __post_init__(self):
        if not 1 <= self.index <= 4:
            raise ValueError(f"variable index {self.index} out of range 1..4")


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Div:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: Fraction


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"

    def __post_init__(self):
        if self.func not in FUNCS:
            raise ValueError(f"unknown function {self.func!r}")


Expr = Union[Const, Var, Add, Sub, Mul, Div, Neg, Pow, Call]

# ---------------------------------------------------------------------------
# tokenizer

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(src: str):
    raw = src.encode("utf-8")
    toks = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", len(src[:pos].encode("utf-8")))
        kind = m.lastgroup
        if kind != "ws":
            toks.append((kind, m.group(), len(src[:pos].encode("utf-8"))))
        pos = m.end()
    toks.append(("end", "", len(raw)))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self, ahead: int = 0):
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.peek()[1] == text and self.peek()[0] == "op":
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            t = self.peek()
            raise ParseError(f"expected {text!r}, found {t[1] or 'end of input'!r}", t[2])

    def parse(self) -> Expr:
        e = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected token {t[1]!r}", t[2])
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            if self.accept("+"):
                e = Add(e, self.term())
            elif self.accept("-"):
                e = Sub(e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.factor()
        while True:
            if self.accept("*"):
                e = Mul(e, self.factor())
            elif self.accept("/"):
                e = Div(e, self.factor())
            else:
                return e

    def factor(self) -> Expr:
        if self.accept("-"):
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.accept("^"):
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> Fraction:
        t = self.peek()
        if self.accept("("):
            value = self.signed_literal()
            self.expect(")")
            return value
        if t[0] == "num" or (t[0] == "op" and t[1] == "-"):
            return self.signed_literal()
        raise ParseError("Pow exponent must be a literal", t[2])

    def signed_literal(self) -> Fraction:
        sign = -1 if self.accept("-") else 1
        t = self.peek()
        if t[0] != "num":
            raise ParseError("Pow exponent must be a literal", t[2])
        return sign * self.literal()

    def literal(self) -> Fraction:
        _, text, off = self.take()
        value = Fraction(text)
        # integer "/" integer is one rational literal
        nxt, after = self.peek(), self.peek(1)
        if (
            value.denominator == 1
            and text.isdigit()
            and nxt[:2] == ("op", "/")
            and after[0] == "num"
            and after[1].isdigit()
        ):
            self.i += 2
            den = int(after[1])
            if den == 0:
                raise ParseError("zero denominator in rational literal", after[2])
            value = Fraction(int(text), den)
        return value

    def atom(self) -> Expr:
        t = self.peek()
        if t[0] == "num":
            return Const(self.literal())
        if t[0] == "name":
            self.take()
            name = t[1]
            if name in FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(name, arg)
            m = re.fullmatch(r"x([1-4])", name)
            if m:
                return Var(int(m.group(1)))
            raise ParseError(f"unknown identifier {name!r}", t[2])
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError(f"unexpected token {t[1] or 'end of input'!r}", t[2])


def parse(source: str) -> Expr:
    """Parse text into an expression tree."""
    return _Parser(source).parse()


# ---------------------------------------------------------------------------


def _lit(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def to_text(e: Expr) -> str:
    """Fully parenthesised text that parses back to the same tree."""
    if isinstance(e, Const):
        return _lit(e.value)
    if isinstance(e, Var):
        return f"x{e.index}"
    if isinstance(e, Neg):
        return f"(-{to_text(e.operand)})"
    if isinstance(e, Pow):
        return f"({to_text(e.base)})^({_lit(e.exponent)})"
    if isinstance(e, Call):
        return f"{e.func}({to_text(e.arg)})"
    op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(e)]
    left = to_text(e.left)
    if isinstance(e, Div) and isinstance(e.left, Const):
        left = f"({left})"  # keep "3 / 4" from reading back as one literal
    return f"({left} {op} {to_text(e.right)})"


def dependence(e: Expr) -> frozenset[int]:
    """Indices of the variables appearing in ``e``."""
    if isinstance(e, Var):
        return frozenset({e.index})
    if isinstance(e, Const):
        return frozenset()
    if isinstance(e, (Neg,)):
        return dependence(e.operand)
    if isinstance(e, Pow):
        return dependence(e.base)
    if isinstance(e, Call):
        return dependence(e.arg)
    return dependence(e.left) | dependence(e.right)


def is_rational_only(e: Expr) -> bool:
    """True if ``e`` can be evaluated over the exact rational ring."""
    if isinstance(e, (Var, Const)):
        return True
    if isinstance(e, Neg):
        return is_rational_only(e.operand)
    if isinstance(e, Pow):
        return e.exponent.denominator == 1 and is_rational_only(e.base)
    if isinstance(e, Call):
        return e.func not in TRANSCENDENTAL and is_rational_only(e.arg)
    return is_rational_only(e.left) and is_rational_only(e.right)


def evaluate(e: Expr, point: Sequence):
    """Evaluate ``e`` with x1..x4 bound to ``point``.

    The ring is whatever ``point`` holds: floats, Fractions or jets.
    Constants are converted to float unless the point is exact.
    """
    exact = _ring_is_exact(point)
    if exact:
        point = [Fraction(x) if isinstance(x, int) else x for x in point]
    return _eval(e, point, exact)


def _ring_is_exact(point) -> bool:
    x = point[0]
    v = getattr(x, "value", x)
    return is_exact(v)


def _eval(e, pt, exact):
    if isinstance(e, Var):
        return pt[e.index - 1]
    if isinstance(e, Const):
        return e.value if exact else float(e.value)
    if isinstance(e, Add):
        return _eval(e.left, pt, exact) + _eval(e.right, pt, exact)
    if isinstance(e, Sub):
        return _eval(e.left, pt, exact) - _eval(e.right, pt, exact)
    if isinstance(e, Mul):
        return _eval(e.left, pt, exact) * _eval(e.right, pt, exact)
    if isinstance(e, Div):
        den = _eval(e.right, pt, exact)
        if getattr(den, "value", den) == 0:
            raise ZeroDivisionError("division by zero")
        return _eval(e.left, pt, exact) / den
    if isinstance(e, Neg):
        return -_eval(e.operand, pt, exact)
    if isinstance(e, Pow):
        base = _eval(e.base, pt, exact)
        if e.exponent.denominator == 1:
            return apply_func("pow_int", base, int(e.exponent))
        if exact:
            raise DomainError("non-integer power over the exact rational ring")
        return apply_func("pow_rat", base, e.exponent)
    if isinstance(e, Call):
        return apply_func(e.func, _eval(e.arg, pt, exact))
    raise TypeError(f"not an expression: {e!r}")


# helpers for building trees programmatically ---------------------------------


def const(q) -> Const:
    return Const(Fraction(q))


def sum_of(terms: Sequence[Expr]) -> Expr:
    terms = list(terms)
    if not terms:
        return Const(Fraction(0))
    e = terms[0]
    for t in terms[1:]:
        e = Add(e, t)
    return e


def product_of(factors: Sequence[Expr]) -> Expr:
    factors = list(factors)
    if not factors:
        return Const(Fraction(1))
    e = factors[0]
    for f in factors[1:]:
        e = Mul(e, f)
    return e
