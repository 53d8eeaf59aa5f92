import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binweyl import exprlang as el
from binweyl.jets import DomainError, Jet2, apply_func, close, fd_check, scalar_derivs, seed_point


def _f(text):
    e = el.parse(text)
    return lambda p: el.evaluate(e, p)


def test_product_jet():
    x1, x2, _, _ = seed_point((2.0, 3.0, 0.0, 0.0))
    j = x1 * x2
    assert j.value == 6
    assert j.grad == [3, 2, 0, 0]
    assert j.h(0, 1) == 1 and j.h(1, 0) == 1 and j.h(0, 0) == 0


def test_exact_quotient_jet():
    x1, x2, _, _ = seed_point((Fraction(1), Fraction(2), Fraction(0), Fraction(0)))
    j = x1 / x2
    assert j.value == Fraction(1, 2)
    assert j.grad[:2] == [Fraction(1, 2), Fraction(-1, 4)]
    # d2/dx2^2 of x1/x2 = 2 x1 / x2^3
    assert j.h(1, 1) == Fraction(1, 4)
    assert j.h(0, 1) == Fraction(-1, 4)
    assert all(isinstance(v, Fraction) for v in j.grad)


def test_jet_division_by_zero():
    x1, x2, _, _ = seed_point((1.0, 0.0, 0.0, 0.0))
    with pytest.raises(ZeroDivisionError):
        x1 / x2


def test_exp_jet():
    x1 = seed_point((0.0, 0.0, 0.0, 0.0))[0]
    j = x1.apply("exp")
    assert (j.value, j.grad[0], j.h(0, 0)) == (1.0, 1.0, 1.0)


def test_pow_int_of_difference():
    x1, x2, _, _ = seed_point((Fraction(3), Fraction(1), Fraction(0), Fraction(0)))
    j = apply_func("pow_int", x1 - x2, 2)
    assert j.value == 4
    assert j.grad[:2] == [4, -4]
    assert j.h(0, 0) == 2 and j.h(0, 1) == -2


def test_pow_int_negative():
    x1 = seed_point((Fraction(2), Fraction(0), Fraction(0), Fraction(0)))[0]
    j = apply_func("pow_int", x1, -1)
    assert (j.value, j.grad[0], j.h(0, 0)) == (Fraction(1, 2), Fraction(-1, 4), Fraction(1, 4))
    with pytest.raises(DomainError):
        apply_func("pow_int", Fraction(0), -2)


def test_domain_errors():
    with pytest.raises(DomainError):
        scalar_derivs("ln", 0.0)
    with pytest.raises(DomainError):
        scalar_derivs("ln", -1.0)
    with pytest.raises(DomainError):
        scalar_derivs("exp", Fraction(1))
    with pytest.raises(DomainError):
        scalar_derivs("abs", 0.0)


def test_from_hessian_rejects_asymmetry():
    with pytest.raises(ValueError):
        Jet2.from_hessian(0, [0] * 4, [[0, 1, 0, 0], [2, 0, 0, 0], [0] * 4, [0] * 4])


def test_fd_check_examples():
    assert fd_check(_f("x1^3"), (1.0, 1.0, 1.0, 1.0), 1e-4) <= 1e-6
    assert fd_check(_f("exp(x1)*x2"), (0.5, 2.0, 0.0, 0.0), 1e-4) <= 1e-5


def test_fd_second_order_convergence():
    f = _f("sin(x1*x2) + exp(0.5*x3)*x4^2")
    p = (0.3, 0.7, -0.4, 1.1)
    big, small = fd_check(f, p, 1e-2), fd_check(f, p, 5e-3)
    assert 3.0 < big / small < 5.0


def test_close():
    assert close(1.0, 1.0 + 1e-10)
    assert not close(1.0, 1.001)
    assert close(0.0, 1e-13)


# --- properties ------------------------------------------------------------------

_smooth_leaf = st.one_of(
    st.integers(1, 4).map(el.Var),
    st.fractions(min_value=-2, max_value=2, max_denominator=5).map(el.Const),
)


def _smooth_extend(c):
    return st.one_of(
        st.builds(el.Add, c, c),
        st.builds(el.Sub, c, c),
        st.builds(el.Mul, c, c),
        st.builds(el.Pow, c, st.integers(0, 3).map(Fraction)),
        st.builds(el.Call, st.sampled_from(["sin", "cos"]), c),
    )


smooth = st.recursive(_smooth_leaf, _smooth_extend, max_leaves=8)
unit_points = st.tuples(*[st.floats(-1, 1)] * 4)
rat_points = st.tuples(*[st.fractions(min_value=-3, max_value=3, max_denominator=9)] * 4)


@given(smooth, unit_points)
def test_hessian_symmetric(e, p):
    j = el.evaluate(e, seed_point(p))
    if isinstance(j, Jet2):
        h = j.hess
        assert all(h[a][b] == h[b][a] for a in range(4) for b in range(4))


@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=7), min_size=15, max_size=15), rat_points)
def test_quadratic_is_exact(coeffs, p):
    # q(x) = c + b.x + x^T A x with A upper-triangular coefficients
    c, b, a = coeffs[0], coeffs[1:5], coeffs[5:]
    pairs = [(i, j) for i in range(4) for j in range(i, 4)]
    x = seed_point(p)
    q = Jet2.const(c)
    for k in range(4):
        q = q + x[k] * b[k]
    for (i, j), aij in zip(pairs, a):
        q = q + x[i] * x[j] * aij
    for k in range(4):
        expect = b[k] + sum(aij * p[j if i == k else i] * (2 if i == j else 1)
                            for (i, j), aij in zip(pairs, a) if k in (i, j))
        assert q.grad[k] == expect
    for (i, j), aij in zip(pairs, a):
        assert q.h(i, j) == (2 * aij if i == j else aij)


@settings(max_examples=40)
@given(smooth, unit_points)
def test_fd_error_scales_like_h_squared(e, p):
    f = lambda q: el.evaluate(e, q)
    try:
        d3 = fd_check(f, p, 1e-3)
        d4 = fd_check(f, p, 1e-4)
        scale = max(1.0, abs(float(f(p))))
    except (ArithmeticError, OverflowError):
        return
    # C fitted at h = 1e-3 must bound the h = 1e-4 error; the mixed stencil's
    # cancellation error eps*|f|/h^2 ~ 1e-8 sets the floor
    c = d3 / 1e-6
    assert d4 <= 2 * c * 1e-8 + 1e-6 * scale


@given(unit_points)
def test_chain_rule_matches_closed_form(p):
    x1 = seed_point(p)[0]
    j = (x1 * 2.0).apply("sin")
    assert math.isclose(j.grad[0], 2 * math.cos(2 * p[0]), abs_tol=1e-12)
    assert math.isclose(j.h(0, 0), -4 * math.sin(2 * p[0]), abs_tol=1e-12)
