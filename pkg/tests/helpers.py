"""Seeded generators shared by the test modules."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np

from binweyl import exprlang as el
from binweyl.metric import PAIRS, Domain, MetricSpec, admissible, make_table1

BOX = (Fraction(-6, 5), Fraction(6, 5))


def _c(rng, scale=3):
    # small rational coefficient in [-scale/20, scale/20]
    return el.Const(Fraction(rng.randint(-scale, scale), 20))


def random_two_var_poly(rng, i, j, degree=2):
    terms = []
    for a, b in itertools.product(range(degree + 1), repeat=2):
        if 0 < a + b <= degree:
            mono = el.product_of([el.Pow(el.Var(i), Fraction(a))] * (a > 0) + [el.Pow(el.Var(j), Fraction(b))] * (b > 0))
            terms.append(el.Mul(_c(rng), mono))
    return el.sum_of(terms)


def random_positive_F(rng, i):
    # a0 + a1 x + a2 x^2 with a0 in [1, 2], |a1| <= 0.15, a2 in [0, 0.3]: positive on the box
    a0 = el.Const(Fraction(rng.randint(10, 20), 10))
    a1 = _c(rng)
    a2 = el.Const(Fraction(rng.randint(0, 3), 10))
    x = el.Var(i)
    return el.Add(el.Add(a0, el.Mul(a1, x)), el.Mul(a2, el.Pow(x, Fraction(2))))


def random_binary_spec(seed: int, M: el.Expr | None = None) -> MetricSpec:
    rng = random.Random(seed)
    phi = tuple(random_two_var_poly(rng, i, j) for i, j in PAIRS)
    F = tuple(random_positive_F(rng, i) for i in range(1, 5))
    return MetricSpec(
        f"random-{seed}",
        "binary-general",
        phi,
        F,
        M if M is not None else el.const(1),
        domain=Domain(boxes=(BOX,) * 4),
    )


def random_points(spec: MetricSpec, n: int, seed: int) -> list[tuple[float, ...]]:
    rng = np.random.default_rng(seed)
    lo = [float(b[0]) for b in spec.domain.boxes]
    hi = [float(b[1]) for b in spec.domain.boxes]
    out = []
    while len(out) < n:
        p = tuple(float(x) for x in rng.uniform(lo, hi))
        if admissible(spec, p) and min(abs(a - b) for a, b in itertools.combinations(p, 2)) > 0.05:
            out.append(p)
    return out


# one-variable building blocks for table instances ------------------------------

_SHAPES = ("sin", "cos", "exp", "poly")


def random_one_var(rng, k: int) -> el.Expr:
    x = el.Var(k)
    a = el.Const(Fraction(rng.randint(2, 8), 10))
    shape = rng.choice(_SHAPES)
    if shape == "poly":
        return el.Add(el.Mul(_c(rng), x), el.Mul(_c(rng), el.Pow(x, Fraction(3))))
    return el.Mul(_c(rng, 5), el.Call(shape, el.Mul(a, x)))


def random_table_instance(row: str, seed: int):
    rng = random.Random(seed)
    funcs = {key: [random_one_var(rng, k) for k in range(1, 5)] for key in "UVQ"}
    if row == "iv":
        # strictly increasing U_k so that U_i - U_j never vanishes on ordered points
        U = [el.Add(el.Mul(el.const(4), el.Var(k)), el.Mul(el.Const(Fraction(rng.randint(1, 3), 10)),
                                                         el.Call("sin", el.Var(k)))) for k in range(1, 5)]
        m = Fraction(rng.randint(-4, 4), 2)
        return make_table1("iv", {"U": U}, m=m, domain=Domain(boxes=(BOX,) * 4))
    free = [random_two_var_poly(rng, 1, 2), random_two_var_poly(rng, 3, 4)]
    return make_table1(row, funcs, free, domain=Domain(boxes=(BOX,) * 4))


def negative_control_spec(seed: int = 1) -> MetricSpec:
    """phi_12 = x1^2 x2^2, every other entry separable with unrelated pieces."""
    rng = random.Random(seed)
    phi = [el.parse("x1^2*x2^2")]
    for i, j in PAIRS[1:]:
        phi.append(el.Add(random_one_var(rng, i), random_one_var(rng, j)))
    one = el.const(1)
    return MetricSpec("negative-control", "binary-general", tuple(phi), (one,) * 4, one,
                      domain=Domain(boxes=(BOX,) * 4))
