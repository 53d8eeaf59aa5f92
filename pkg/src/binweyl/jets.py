"""Truncated forward-mode jets in four variables.

``Jet2`` carries a value, its gradient and its Hessian; ``Jet1`` carries a
value and gradient only.  Both are generic over the scalar ring: Python
floats or :class:`fractions.Fraction` (exact).  Transcendental functions
are refused over the exact ring.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence

DIM = 4

# packed upper-triangular index of (i, j), i <= j
_PACK = {}
_n = 0
for _i in range(DIM):
    for _j in range(_i, DIM):
        _PACK[(_i, _j)] = _PACK[(_j, _i)] = _n
        _n += 1
NPACK = _n
_PAIRS = [(i, j) for i in range(DIM) for j in range(i, DIM)]

TAU_ABS = 1e-12
TAU_REL = 1e-9


class DomainError(ArithmeticError):
    """A function was evaluated outside its domain (or ring)."""


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def close(a, b, tau_abs: float = TAU_ABS, tau_rel: float = TAU_REL) -> bool:
    """|a - b| <= tau_abs + tau_rel * max(|a|, |b|)."""
    return abs(a - b) <= tau_abs + tau_rel * max(abs(a), abs(b))


# ---------------------------------------------------------------------------
# scalar functions: value, first and second derivative


def scalar_derivs(name: str, v, param=None):
    """Return (f(v), f'(v), f''(v)) for a named function over float or Fraction."""
    exact = is_exact(v)
    if name == "abs":
        if v == 0:
            raise DomainError("abs is not differentiable at 0")
        s = 1 if v > 0 else -1
        return abs(v), s, 0
    if name == "pow_int":
        n = int(param)
        if n < 0 and v == 0:
            raise DomainError("division by zero in negative power")
        if exact:
            v = Fraction(v)
        if n == 0:
            return (Fraction(1) if exact else 1.0), 0, 0
        f0 = v ** n
        f1 = n * v ** (n - 1) if n != 1 else 1
        f2 = n * (n - 1) * v ** (n - 2) if n not in (0, 1) else 0
        return f0, f1, f2
    if exact:
        raise DomainError(f"{name} is not available over the exact rational ring")
    v = float(v)
    if name == "exp":
        e = math.exp(v)
        return e, e, e
    if name == "ln":
        if v <= 0:
            raise DomainError(f"ln of non-positive value {v!r}")
        return math.log(v), 1.0 / v, -1.0 / (v * v)
    if name == "sqrt":
        if v <= 0:
            raise DomainError(f"sqrt of non-positive value {v!r}")
        s = math.sqrt(v)
        return s, 0.5 / s, -0.25 / (s * v)
    if name == "sin":
        s, c = math.sin(v), math.cos(v)
        return s, c, -s
    if name == "cos":
        s, c = math.sin(v), math.cos(v)
        return c, -s, -c
    if name == "pow_rat":
        r = float(param)
        if v <= 0:
            raise DomainError(f"non-integer power of non-positive value {v!r}")
        return v ** r, r * v ** (r - 1), r * (r - 1) * v ** (r - 2)
    raise ValueError(f"unknown function {name!r}")


def scalar_func(name: str, v, param=None):
    """Plain (non-jet) evaluation; abs at 0 is allowed here."""
    if name == "abs":
        return abs(v)
    if name == "pow_int":
        n = int(param)
        if n < 0 and v == 0:
            raise DomainError("division by zero in negative power")
        if is_exact(v):
            return Fraction(v) ** n
        return v ** n
    return scalar_derivs(name, v, param)[0]


# ---------------------------------------------------------------------------


class Jet1:
    """Value and gradient, with Leibniz-rule arithmetic."""

    __slots__ = ("value", "grad")

    def __init__(self, value, grad: Sequence):
        self.value = value
        self.grad = list(grad)

    @classmethod
    def const(cls, c) -> "Jet1":
        return cls(c, [0] * DIM)

    def __repr__(self):
        return f"Jet1({self.value!r}, {self.grad!r})"

    def __add__(self, o):
        if isinstance(o, Jet1):
            return Jet1(self.value + o.value, [a + b for a, b in zip(self.grad, o.grad)])
        return Jet1(self.value + o, self.grad)

    __radd__ = __add__

    def __neg__(self):
        return Jet1(-self.value, [-a for a in self.grad])

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, Jet1):
            a, b = self.value, o.value
            return Jet1(a * b, [a * db + b * da for da, db in zip(self.grad, o.grad)])
        return Jet1(self.value * o, [a * o for a in self.grad])

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet1":
        if self.value == 0:
            raise ZeroDivisionError("jet division by zero")
        inv = 1 / Fraction(self.value) if is_exact(self.value) else 1.0 / self.value
        return Jet1(inv, [-inv * inv * a for a in self.grad])

    def __truediv__(self, o):
        if isinstance(o, Jet1):
            return self * o.reciprocal()
        if o == 0:
            raise ZeroDivisionError("jet division by zero")
        if is_exact(o) and is_exact(self.value):
            o = Fraction(o)
        return Jet1(self.value / o, [a / o for a in self.grad])

    def __rtruediv__(self, o):
        return self.reciprocal() * o


class Jet2:
    """Second-order jet: value, gradient (4) and symmetric Hessian (4x4).

    The Hessian is stored packed (upper triangle), so it is symmetric by
    construction.
    """

    __slots__ = ("value", "grad", "_h")

    def __init__(self, value, grad: Sequence, hpacked: Sequence):
        self.value = value
        self.grad = list(grad)
        self._h = list(hpacked)

    @classmethod
    def const(cls, c) -> "Jet2":
        return cls(c, [0] * DIM, [0] * NPACK)

    @classmethod
    def seed(cls, k: int, x) -> "Jet2":
        """Jet of the coordinate function x^k (k is 0-based) at value x."""
        g = [0] * DIM
        g[k] = 1
        return cls(x, g, [0] * NPACK)

    @classmethod
    def from_hessian(cls, value, grad, hess) -> "Jet2":
        for i, j in _PAIRS:
            if hess[i][j] != hess[j][i]:
                raise ValueError("Hessian is not symmetric")
        return cls(value, grad, [hess[i][j] for i, j in _PAIRS])

    def h(self, i: int, j: int):
        return self._h[_PACK[(i, j)]]

    @property
    def hess(self) -> list[list]:
        return [[self._h[_PACK[(i, j)]] for j in range(DIM)] for i in range(DIM)]

    def d(self, k: int) -> Jet1:
        """The first partial derivative along k, as a Jet1."""
        return Jet1(self.grad[k], [self._h[_PACK[(k, j)]] for j in range(DIM)])

    def as_jet1(self) -> Jet1:
        return Jet1(self.value, self.grad)

    def __repr__(self):
        return f"Jet2({self.value!r}, {self.grad!r}, {self.hess!r})"

    # arithmetic ------------------------------------------------------------

    def __add__(self, o):
        if isinstance(o, Jet2):
            return Jet2(
                self.value + o.value,
                [a + b for a, b in zip(self.grad, o.grad)],
                [a + b for a, b in zip(self._h, o._h)],
            )
        return Jet2(self.value + o, self.grad, self._h)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, [-a for a in self.grad], [-a for a in self._h])

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if not isinstance(o, Jet2):
            return Jet2(self.value * o, [a * o for a in self.grad], [a * o for a in self._h])
        a, b = self.value, o.value
        ga, gb = self.grad, o.grad
        h = [
            a * hb + b * ha + ga[i] * gb[j] + ga[j] * gb[i]
            for (i, j), ha, hb in zip(_PAIRS, self._h, o._h)
        ]
        return Jet2(a * b, [a * y + b * x for x, y in zip(ga, gb)], h)

    __rmul__ = __mul__

    def compose(self, f0, f1, f2) -> "Jet2":
        """Chain rule given f(v), f'(v), f''(v) at v = self.value."""
        g = self.grad
        h = [f2 * g[i] * g[j] + f1 * hij for (i, j), hij in zip(_PAIRS, self._h)]
        return Jet2(f0, [f1 * x for x in g], h)

    def reciprocal(self) -> "Jet2":
        v = self.value
        if v == 0:
            raise ZeroDivisionError("jet division by zero")
        inv = 1 / Fraction(v) if is_exact(v) else 1.0 / v
        return self.compose(inv, -inv * inv, 2 * inv * inv * inv)

    def __truediv__(self, o):
        if isinstance(o, Jet2):
            return self * o.reciprocal()
        if o == 0:
            raise ZeroDivisionError("jet division by zero")
        if is_exact(o) and is_exact(self.value):
            o = Fraction(o)
        return Jet2(self.value / o, [a / o for a in self.grad], [a / o for a in self._h])

    def __rtruediv__(self, o):
        return self.reciprocal() * o

    def apply(self, name: str, param=None) -> "Jet2":
        return self.compose(*scalar_derivs(name, self.value, param))


def apply_func(name: str, x, param=None):
    """Evaluate a named function on a scalar or a jet."""
    if isinstance(x, Jet2):
        return x.apply(name, param)
    return scalar_func(name, x, param)


def seed_point(point: Sequence) -> tuple[Jet2, ...]:
    return tuple(Jet2.seed(k, Fraction(x) if isinstance(x, int) else x) for k, x in enumerate(point))


def fd_check(f: Callable[[Sequence[float]], Jet2 | float], point: Sequence[float], h: float = 1e-4) -> float:
    """Largest discrepancy between jet derivatives and central differences.

    ``f`` maps a 4-tuple (floats or seed jets) to a value of the same ring.
    First derivatives use (f(x+h) - f(x-h)) / 2h, diagonal second
    derivatives the three-point stencil, mixed ones the four-corner stencil.
    """
    jet = f(seed_point([float(x) for x in point]))
    if not isinstance(jet, Jet2):
        jet = Jet2.const(jet)  # constant functions never touch the seeds
    base = [float(x) for x in point]

    def at(*shifts):
        q = list(base)
        for k, s in shifts:
            q[k] += s
        return float(f(tuple(q)))

    worst = 0.0
    f0 = at()
    for i in range(DIM):
        d1 = (at((i, h)) - at((i, -h))) / (2 * h)
        worst = max(worst, abs(d1 - jet.grad[i]))
        d2 = (at((i, h)) - 2 * f0 + at((i, -h))) / (h * h)
        worst = max(worst, abs(d2 - jet.h(i, i)))
        for j in range(i + 1, DIM):
            dij = (
                at((i, h), (j, h)) - at((i, h), (j, -h)) - at((i, -h), (j, h)) + at((i, -h), (j, -h))
            ) / (4 * h * h)
            worst = max(worst, abs(dij - jet.h(i, j)))
    return worst
