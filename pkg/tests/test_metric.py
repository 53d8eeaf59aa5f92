import logging
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binweyl import exprlang as el
from binweyl.metric import (
    PAIRS, Domain, MetricSpec, Poly, SpecError, admissible, case_iv, euclidean,
    make_lemma_family, make_table1, metric_values,
)

from helpers import random_binary_spec, random_points

P = (Fraction(4), Fraction(2), Fraction(1), Fraction(0))


def test_euclidean_components():
    assert metric_values(euclidean(), (1.0, 2.0, 3.0, 4.0)) == [1.0] * 4


def test_case_iv_component_form():
    # g_11 = (x1-x2)^2m (x1-x3)^2m (x1-x4)^2m / (M^2 F1), m = 1, F1 = 2
    spec = case_iv(1, [Poly((2,)), Poly((1,)), Poly((1,)), Poly((1,))])
    g = metric_values(spec, P)
    assert g[0] == Fraction(2 * 2 * 3 * 3 * 4 * 4, 2)
    assert g[3] == Fraction(16 * 4 * 1)  # (0-4)^2 (0-2)^2 (0-1)^2


def test_binary_product_structure():
    spec = random_binary_spec(3)
    p = (0.3, -0.2, 0.9, -0.7)
    g = metric_values(spec, p)
    for i in range(1, 5):
        s = sum(el.evaluate(spec.phi_of(i, j), p) for j in range(1, 5) if j != i)
        F = el.evaluate(spec.F_exprs[i - 1], p)
        assert math.isclose(g[i - 1] * F, math.exp(2 * s), rel_tol=1e-12)


def test_phi_dependence_is_enforced():
    zero, one = el.const(0), el.const(1)
    phi = [zero] * 6
    phi[0] = el.parse("x1*x3")
    with pytest.raises(SpecError, match="phi12 depends on x3"):
        MetricSpec("bad", "binary-general", tuple(phi), (one,) * 4, one)
    with pytest.raises(SpecError, match="F2 depends on x1"):
        MetricSpec("bad", "binary-general", (zero,) * 6, (one, el.parse("x1"), one, one), one)


def test_m_required_for_case_iv_only():
    zero, one = el.const(0), el.const(1)
    with pytest.raises(SpecError):
        MetricSpec("bad", "case-iv", (zero,) * 6, (one,) * 4, one)
    with pytest.raises(SpecError):
        MetricSpec("bad", "binary-general", (zero,) * 6, (one,) * 4, one, m=1)


def test_table_row_ii_rejects_wrong_dependence():
    fs = [el.Var(k) for k in range(1, 5)]
    funcs = {"U": fs, "V": fs, "Q": [None, None, el.parse("x4"), el.Var(4)]}
    with pytest.raises(SpecError, match="Q3 depends on x4"):
        make_table1("ii", funcs, [el.parse("x1*x2")])


def test_table_row_i_layout():
    U = [el.parse(f"{k}*x{k}") for k in range(1, 5)]
    spec = make_table1("i", {"U": U}, [el.parse("x1*x2"), el.parse("x3+x4")])
    assert spec.phi_of(1, 3) == el.Add(U[0], U[2])
    assert spec.phi_of(1, 2) == el.parse("x1*x2")


@settings(max_examples=20, deadline=None)
@given(st.integers(-4, 4), st.integers(0, 10_000))
def test_table_iv_matches_case_iv(twice_m, seed):
    # U_i = x^i: table row iv is case iv on the |x^i - x^j| chart
    m = Fraction(twice_m, 2)
    one = el.const(1)
    tab = make_table1("iv", {"U": [el.Var(k) for k in range(1, 5)]}, m=m)
    ref = case_iv(m, [Poly((1,))] * 4, domain=Domain())
    for p in random_points(tab, 5, seed):
        for a, b in zip(metric_values(tab, p), metric_values(ref, p)):
            assert math.isclose(a, b, rel_tol=1e-10)
    assert tab.M == one


def test_case_iv_warns_without_ordering(caplog):
    with caplog.at_level(logging.WARNING, logger="binweyl.metric"):
        case_iv(Fraction(1, 2), [Poly((1,))] * 4, domain=Domain())
    assert "ordering" in caplog.text
    caplog.clear()
    with caplog.at_level(logging.WARNING, logger="binweyl.metric"):
        case_iv(1, [Poly((1,))] * 4, domain=Domain())
    assert caplog.text == ""


def test_lemma_a_requires_zero_sum():
    with pytest.raises(SpecError, match="L = F1 \\+ F2 \\+ F3 \\+ F4 = 0"):
        make_lemma_family("a", (1, 2, 3, 4))
    spec = make_lemma_family("a", (1, 2, 3, -6))
    assert spec.m == -1


def test_lemma_d_components():
    spec = make_lemma_family("d", (1, 0, 0, 0, 0, 0, 1))
    g = metric_values(spec, P)
    # m = 1/2: g_11 = (4-2)(4-1)(4-0) / (4^6 + 1)
    assert g[0] == Fraction(24, 4097)
    assert spec.F[0] is spec.F[3]


def test_lemma_rejects_too_many_coefficients():
    with pytest.raises(SpecError):
        make_lemma_family("b", (1, 2, 3, 4))


def test_admissible_examples():
    spec = euclidean()
    assert admissible(spec, (4.0, 2.0, 1.0, 0.0))
    bad = admissible(spec, (1.0, 1.0, 0.0, -1.0))
    assert not bad and "coordinate collision (1,2)" in bad.diagnostics
    zero_F = MetricSpec("z", "binary-general", (el.const(0),) * 6,
                        (el.parse("x1-1"), el.const(1), el.const(1), el.const(1)), el.const(1))
    res = admissible(zero_F, (1.0, 2.0, 3.0, 4.0))
    assert "degenerate metric component 1" in res.diagnostics


def test_admissible_ordering():
    spec = make_lemma_family("c", [Poly((1,))] * 4)
    assert not admissible(spec, (1.0, 2.0, 0.0, -1.0))
    assert admissible(spec, (3.0, 1.0, -1.0, -3.0))


def test_poly():
    q = Poly((1, 0, 2))
    assert q.degree == 2 and q(Fraction(3)) == 19
    assert el.evaluate(q.expr(2), (0, Fraction(3), 0, 0)) == 19
    assert q.scaled(2).coeffs == (2, 0, 4)
    assert Poly((0, 0)).degree == -1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.fractions(min_value=Fraction(1, 4), max_value=4))
def test_conformal_rescale(seed, c):
    # g_ii * M^2 does not depend on M
    base = random_binary_spec(seed)
    scaled = random_binary_spec(seed, M=el.Const(c))
    for p in random_points(base, 3, seed):
        for a, b in zip(metric_values(base, p), metric_values(scaled, p)):
            assert math.isclose(a, b * float(c) ** 2, rel_tol=1e-12)


def test_pairs_order():
    assert PAIRS == ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
