from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from binweyl import exprlang as el
from binweyl.exprlang import Add, Call, Const, Div, Mul, Neg, ParseError, Pow, Sub, Var
from binweyl.jets import DomainError, seed_point


def test_grammar_cases():
    assert el.parse("x1 + 2*x2") == Add(Var(1), Mul(Const(Fraction(2)), Var(2)))
    assert el.parse("0.5*ln(abs(x1-x2))") == Mul(
        Const(Fraction(1, 2)), Call("ln", Call("abs", Sub(Var(1), Var(2))))
    )


def test_precedence_and_associativity():
    assert el.parse("-x1^2") == Neg(Pow(Var(1), Fraction(2)))
    assert el.parse("x1 - x2 - x3") == Sub(Sub(Var(1), Var(2)), Var(3))
    assert el.parse("x1 / x2 * x3") == Mul(Div(Var(1), Var(2)), Var(3))
    assert el.parse("x1^-2") == Pow(Var(1), Fraction(-2))
    assert el.parse("x1^(-3/2)") == Pow(Var(1), Fraction(-3, 2))


def test_rational_literal_is_one_token():
    assert el.parse("1/2*x1") == Mul(Const(Fraction(1, 2)), Var(1))
    assert el.parse("x1^2/3") == Pow(Var(1), Fraction(2, 3))
    assert el.parse("x1/2") == Div(Var(1), Const(Fraction(2)))


def test_decimal_literals_are_exact():
    assert el.parse("0.1") == Const(Fraction(1, 10))
    assert el.parse("2.5e-1") == Const(Fraction(1, 4))


def test_comments_and_whitespace():
    assert el.parse("x1   # trailing comment\n + 1") == Add(Var(1), Const(Fraction(1)))


def test_unknown_identifier():
    with pytest.raises(ParseError, match="unknown identifier 'x5'"):
        el.parse("x5+1")


def test_pow_exponent_must_be_literal():
    with pytest.raises(ParseError, match="Pow exponent must be a literal"):
        el.parse("x1^x2")


def test_syntax_error_reports_byte_offset():
    with pytest.raises(ParseError) as info:
        el.parse("x1 + * x2")
    assert info.value.offset == 5
    # multibyte character before the error moves the byte offset, not the char offset
    with pytest.raises(ParseError) as info:
        el.parse("x1 + é")
    assert info.value.offset == 5


def test_unbalanced_parenthesis():
    with pytest.raises(ParseError, match="expected"):
        el.parse("(x1 + 2")


def test_dependence_examples():
    assert el.dependence(el.parse("x1*x3")) == {1, 3}
    assert el.dependence(el.parse("7")) == frozenset()
    assert el.dependence(el.parse("exp(x2)+x2")) == {2}


def test_eval_examples():
    assert el.evaluate(el.parse("x1*x2"), (2.0, 3.0, 0.0, 0.0)) == 6
    v = el.evaluate(el.parse("(x1-x2)^(-3)"), (Fraction(1, 2), Fraction(1, 3), Fraction(0), Fraction(0)))
    assert v == 216 and isinstance(v, Fraction)
    with pytest.raises(DomainError):
        el.evaluate(el.parse("ln(x1)"), seed_point((0.0, 1.0, 1.0, 1.0)))


def test_eval_errors():
    with pytest.raises(ZeroDivisionError):
        el.evaluate(el.parse("1/(x1-x2)"), (1.0, 1.0, 0.0, 0.0))
    with pytest.raises(DomainError):
        el.evaluate(el.parse("exp(x1)"), (Fraction(1),) * 4)
    with pytest.raises(DomainError):
        el.evaluate(el.parse("sqrt(x1)"), (Fraction(4),) * 4)
    with pytest.raises(DomainError):
        el.evaluate(el.parse("x1^(1/2)"), (Fraction(4),) * 4)
    with pytest.raises(DomainError):
        el.evaluate(el.parse("abs(x1)"), seed_point((0.0, 1.0, 1.0, 1.0)))
    # abs at zero is fine when no derivative is asked for
    assert el.evaluate(el.parse("abs(x1)"), (0.0, 1.0, 1.0, 1.0)) == 0


def test_fractional_power_over_floats():
    assert el.evaluate(el.parse("x1^(3/2)"), (4.0, 0, 0, 0)) == pytest.approx(8.0)


def test_is_rational_only():
    assert el.is_rational_only(el.parse("x1^2/(x2-3) + abs(x3)"))
    assert not el.is_rational_only(el.parse("exp(x1)"))
    assert not el.is_rational_only(el.parse("x1^(1/2)"))


# --- properties ------------------------------------------------------------------

consts = st.fractions(min_value=0, max_value=20, max_denominator=12).map(Const)
variables = st.integers(1, 4).map(Var)


def _extend(children):
    return st.one_of(
        st.builds(Add, children, children),
        st.builds(Sub, children, children),
        st.builds(Mul, children, children),
        st.builds(Div, children, children),
        st.builds(Neg, children),
        st.builds(Pow, children, st.integers(-3, 3).map(Fraction)),
        st.builds(Call, st.sampled_from(["abs", "exp", "sin"]), children),
    )


exprs = st.recursive(st.one_of(consts, variables), _extend, max_leaves=12)
rational_exprs = st.recursive(
    st.one_of(consts, variables),
    lambda c: st.one_of(
        st.builds(Add, c, c), st.builds(Sub, c, c), st.builds(Mul, c, c), st.builds(Neg, c),
        st.builds(Pow, c, st.integers(0, 3).map(Fraction)),
    ),
    max_leaves=10,
)
points = st.tuples(*[st.fractions(min_value=-3, max_value=3, max_denominator=7)] * 4)


@given(exprs)
def test_round_trip(e):
    assert el.parse(el.to_text(e)) == e


@given(rational_exprs, points)
def test_float_matches_rational(e, p):
    exact = el.evaluate(e, p)
    approx = el.evaluate(e, tuple(float(x) for x in p))
    assert abs(approx - float(exact)) <= 1e-9 * max(1.0, abs(float(exact)))


@settings(max_examples=50)
@given(exprs, points)
def test_dependence_covers_sensitivity(e, p):
    base = [float(x) for x in p]
    try:
        f0 = el.evaluate(e, base)
    except (ArithmeticError, OverflowError):
        assume(False)
    for k in range(4):
        q = list(base)
        q[k] += 0.37
        try:
            f1 = el.evaluate(e, q)
        except (ArithmeticError, OverflowError):
            continue
        if f1 != f0:
            assert k + 1 in el.dependence(e)
