"""Closed-form Weyl components and the algebraic quantities of the case-iv analysis.

All functions take index arguments 1..4 and work over floats or Fractions.
The phi data needed here are only first and second partial derivatives,
so logarithmic case-iv potentials stay exact: their derivatives are
rational even though their values are not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from . import exprlang as el
from .jets import Jet1, Jet2, is_exact, seed_point
from .metric import PAIRS, FField, MetricSpec, Poly, as_jet, f_expr, pair

IDX = (1, 2, 3, 4)


def _others(*excl: int) -> list[int]:
    return [k for k in IDX if k not in excl]


def _half(x):
    return Fraction(1, 2) if is_exact(x) else 0.5


@dataclass
class PhiJets:
    """Jets of the binary-metric data at one point.

    ``F`` holds the one-variable factors in the exponential form
    g_kk = Gsq_k / (M^2 F_k); ``Gsq[k-1] = exp(2 sum_l phi_kl)``.
    A phi jet's value may be None when it is not rational (case iv, exact).
    """

    phi: dict  # (i, j), i < j -> Jet2
    F: list  # four Jet2
    M: object  # value of the conformal factor
    Gsq: list  # four scalars

    def d(self, a: int, b: int, c: int):
        """d phi_ab / d x^c."""
        return self.phi[pair(a, b)].grad[c - 1]

    def dd(self, a: int, b: int, c: int, e: int):
        return self.phi[pair(a, b)].h(c - 1, e - 1)

    def d_jet(self, a: int, b: int, c: int) -> Jet1:
        """d phi_ab / d x^c carried with its own gradient."""
        return self.phi[pair(a, b)].d(c - 1)


def _log_diff_jet(m, p, i: int, j: int) -> Jet2:
    """Jet of m ln|x^i - x^j| without its (irrational) value."""
    u = p[i - 1] - p[j - 1]
    if u == 0:
        raise ZeroDivisionError(f"coordinate collision ({i},{j})")
    exact = is_exact(u)
    g1 = m / u
    g2 = m / (u * u)
    grad = [0 * g1] * 4
    grad[i - 1], grad[j - 1] = g1, -g1
    hess = [[0 * g1] * 4 for _ in range(4)]
    hess[i - 1][i - 1] = hess[j - 1][j - 1] = -g2
    hess[i - 1][j - 1] = hess[j - 1][i - 1] = g2
    value = None if exact else float(m) * math.log(abs(u))
    return Jet2.from_hessian(value, grad, hess)


def phi_jets(spec: MetricSpec, p: Sequence) -> PhiJets:
    """Binary-metric data of ``spec`` at ``p``."""
    exact = all(isinstance(x, (int, Fraction)) for x in p)
    if exact:
        p = [Fraction(x) for x in p]
    pt = seed_point(p)
    F = [as_jet(el.evaluate(f, pt)) for f in spec.F_exprs]
    M = el.evaluate(spec.M, p)
    if spec.family == "case-iv":
        m = spec.m
        phi = {(i, j): _log_diff_jet(m, p, i, j) for i, j in PAIRS}
        two_m = 2 * m
        Gsq, flips = [], []
        for k in IDX:
            diffs = [p[k - 1] - p[l - 1] for l in _others(k)]
            if two_m.denominator == 1:
                Gsq.append(math.prod(abs(u) ** int(two_m) for u in diffs))
                negative = sum(1 for u in diffs if u < 0) * int(two_m) % 2 == 1
            else:
                Gsq.append(math.prod(abs(float(u)) ** float(two_m) for u in diffs))
                negative = False
            flips.append(spec.signed_powers and negative)
        F = [-f if flip else f for f, flip in zip(F, flips)]
        return PhiJets(phi, F, M, Gsq)
    phi = {pr: as_jet(el.evaluate(e, pt)) for pr, e in zip(PAIRS, spec.phi)}
    Gsq = [math.exp(2 * sum(phi[pair(k, l)].value for l in _others(k))) for k in IDX]
    return PhiJets(phi, F, M, Gsq)


# ---------------------------------------------------------------------------


def E_ij(pj: PhiJets, i: int, j: int) -> Jet2:
    """E_ij = phi_ij - 1/2 sum_{k != i,j} phi_ik (value is None if any phi value is)."""
    _check_distinct(i, j)
    terms = [(pj.phi[pair(i, j)], 1)] + [(pj.phi[pair(i, k)], -_half(pj.d(i, j, i))) for k in _others(i, j)]
    values = [t.value for t, _ in terms]
    value = None if any(v is None for v in values) else sum(w * v for (_, w), v in zip(terms, values))
    grad = [sum(w * t.grad[a] for t, w in terms) for a in range(4)]
    hess = [[sum(w * t.h(a, b) for t, w in terms) for b in range(4)] for a in range(4)]
    return Jet2.from_hessian(value, grad, hess)


def _dE(pj, a, b, c):
    h = _half(pj.d(a, b, c))
    return pj.d(a, b, c) - h * sum(pj.d(a, k, c) for k in _others(a, b))


def _ddE(pj, a, b, c):
    h = _half(pj.d(a, b, c))
    return pj.dd(a, b, c, c) - h * sum(pj.dd(a, k, c, c) for k in _others(a, b))


def _check_distinct(*idx):
    if len(set(idx)) != len(idx) or not all(i in IDX for i in idx):
        raise ValueError(f"indices must be distinct and in 1..4, got {idx}")


def ckikj_from(D: Callable, i: int, j: int, k: int):
    """C^k_{ikj} in terms of an accessor D(a, b, c) = d phi_ab / d x^c.

    Works for any ring closed under + and *, so passing Jet1-valued
    derivatives yields the gradient of the component as well.
    """
    t = D(i, j, i) * D(j, k, j) + D(k, i, i) * D(i, j, j) - D(k, i, i) * D(k, j, j)
    s = 0
    for l in _others(i, j):
        s = s + D(i, j, i) * D(j, l, j) + D(l, i, i) * D(i, j, j) - D(l, i, i) * D(l, j, j)
    return t - s * _half(getattr(t, "value", t))


def ckikj_closed(pj: PhiJets, i: int, j: int, k: int):
    _check_distinct(i, j, k)
    return ckikj_from(pj.d, i, j, k)


def cijij_closed(pj: PhiJets, i: int, j: int, printed: bool = False):
    """C^{ij}_{ij} from the phi, F and M data.

    The last double sum runs over l != r.  ``printed=True`` keeps the
    l = r diagonal terms as well; that variant does not agree with the
    curvature engine and is kept only to demonstrate the difference.
    """
    _check_distinct(i, j)
    D, F = pj.d, pj.F
    exact = is_exact(D(i, j, i))
    half = _half(D(i, j, i))
    third = Fraction(1, 3) if exact else 1.0 / 3.0
    o = _others(i, j)

    def ginv(a):
        return 1 / pj.Gsq[a - 1] if exact else 1.0 / pj.Gsq[a - 1]

    def Fv(a):
        return F[a - 1].value

    def Fp(a):
        return F[a - 1].grad[a - 1]

    def own(a, b):
        s = _ddE(pj, a, b, a) - D(a, b, a) * sum(D(a, k, a) for k in o)
        for l in o:
            for k in o:
                if k != l:
                    s += D(a, l, a) * D(a, k, a)
        return s

    t = half * ginv(i) * _dE(pj, i, j, i) * Fp(i) + half * ginv(j) * _dE(pj, j, i, j) * Fp(j)
    t -= half * sum(ginv(k) * (_dE(pj, k, i, k) + _dE(pj, k, j, k)) * Fp(k) for k in o)
    t += ginv(i) * own(i, j) * Fv(i) + ginv(j) * own(j, i) * Fv(j)
    for k in o:
        s = _ddE(pj, k, i, k) + _ddE(pj, k, j, k) - 3 * D(i, k, k) * D(j, k, k)
        s += half * sum(
            D(k, l, k) * D(k, r, k)
            for l in _others(k)
            for r in _others(k)
            if printed or r != l
        )
        t -= ginv(k) * s * Fv(k)
    return -third * pj.M * pj.M * t


def lam(pj: PhiJets, i: int, j: int, k: int):
    """lambda_ijk = (phi_jk - phi_ik)_{,k} phi_ij,ij."""
    _check_distinct(i, j, k)
    return (pj.d(j, k, k) - pj.d(i, k, k)) * pj.dd(i, j, i, j)


def lambda_cyclic_residual(pj: PhiJets, i: int, j: int, k: int):
    a, b, c = lam(pj, i, j, k), lam(pj, j, k, i), lam(pj, k, i, j)
    return max(abs(a - b), abs(b - c))


def derivative_identity_residual(pj: PhiJets, i: int, j: int, k: int):
    """|d_k C^k_{ikj} - (lambda_kij + lambda_kji)/2|."""
    _check_distinct(i, j, k)
    dC = ckikj_from(pj.d_jet, i, j, k).grad[k - 1]
    sym = (lam(pj, k, i, j) + lam(pj, k, j, i)) * _half(dC)
    return abs(dC - sym)


# ---------------------------------------------------------------------------
# case-iv quantities; F here follows the k<l product convention:
# g_ii = prod_{k<l, i in {k,l}} (x^k - x^l)^(2m) / (M^2 F_i)


def _int_exp(e, what: str) -> int:
    e = Fraction(e)
    if e.denominator != 1:
        raise ValueError(f"{what} exponent {e} is not an integer; exact mode needs 2m integral")
    return int(e)


def _diff(p, k, l):
    u = p[k - 1] - p[l - 1]
    if u == 0:
        raise ZeroDivisionError(f"coordinate collision ({k},{l})")
    return u


def _pow(u, e):
    n = _int_exp(e, "power")
    return u.apply("pow_int", n) if isinstance(u, Jet2) else u ** n


def L_coefficient(m, p, i: int):
    """prod_{k<l; k,l != i} (x^k - x^l)^(2(m+1)); ``p`` may hold jets."""
    e = 2 * (Fraction(m) + 1)
    acc = None
    for k, l in PAIRS:
        if i in (k, l):
            continue
        f = _pow(_diff(p, k, l), e)
        acc = f if acc is None else acc * f
    return acc


def _F_at(F: FField | Callable, i: int, x):
    if isinstance(F, Poly):
        return F(x)
    if callable(F):
        return F(x)
    pt = [x] * 4
    return el.evaluate(f_expr(F, i), pt)


def _exactify(p):
    if all(isinstance(x, (int, Fraction)) for x in p):
        return [Fraction(x) for x in p]
    return [float(x) for x in p]


def L_quantity(m, F: Sequence, p: Sequence):
    """L = sum_i prod_{k<l; k,l != i} (x^k - x^l)^(2(m+1)) F_i(x^i)."""
    p = _exactify(p)
    return sum(L_coefficient(m, p, i) * _F_at(F[i - 1], i, p[i - 1]) for i in IDX)


def K_quantity(m, F: Sequence, p: Sequence):
    """L scaled by prod_{k<l} (x^k - x^l)^(-2(m+1))."""
    p = _exactify(p)
    scale = 1
    for k, l in PAIRS:
        scale *= _pow(_diff(p, k, l), -2 * (Fraction(m) + 1))
    return L_quantity(m, F, p) * scale


def bracket_weights(p):
    x1, x2, x3, x4 = p
    a = x2 * (x1 + x3 - 2 * x4) + x3 * (x4 - 2 * x1) + x1 * x4
    b = x3 * (x1 + x2 - 2 * x4) + x2 * (x4 - 2 * x1) + x1 * x4
    return a, b


def case_iv_spec_from_pair_F(m, F: Sequence[FField], M=None, ordered: bool = True) -> MetricSpec:
    """Case-iv spec whose F entries follow the k<l product convention.

    The package's case-iv spec uses prod_{j != i} (x^i - x^j)^(2m) on ordered
    charts; the two conventions differ by (-1)^((i-1) 2m) in F_i.
    """
    from .metric import Domain, case_iv

    m = Fraction(m)
    two_m = 2 * m
    Fs = []
    for i, Fi in enumerate(F, start=1):
        flip = two_m.denominator == 1 and ((i - 1) * int(two_m)) % 2 == 1
        if isinstance(Fi, Poly):
            Fs.append(Fi.scaled(-1) if flip else Fi)
        else:
            Fs.append(el.Neg(Fi) if flip else Fi)
    return case_iv(m, Fs, M=M, domain=Domain(ordered=ordered))


def bracket_sides(m, F: Sequence[FField], p: Sequence, M=None, rhs_factor: Callable | None = None):
    """Both sides of the bracket identity relating C^{12}_{12}, C^{13}_{13} and L.

    ``rhs_factor(m)`` replaces m(2m - 1) (used for mutation controls).
    """
    p = _exactify(p)
    m = Fraction(m)
    spec = case_iv_spec_from_pair_F(m, F, M=M, ordered=_is_ordered(p))
    pj = phi_jets(spec, p)
    a, b = bracket_weights(p)
    lhs = a * cijij_closed(pj, 1, 2) - b * cijij_closed(pj, 1, 3)
    factor = rhs_factor(m) if rhs_factor else m * (2 * m - 1)
    if not is_exact(p[0]):
        factor = float(factor)
    prod = 1
    for k, l in PAIRS:
        prod *= _pow(_diff(p, k, l), -2 * m - 1)
    Mv = pj.M
    rhs = Mv * Mv * _half(p[0]) * factor * prod * L_quantity(m, F, p)
    return lhs, rhs


def _is_ordered(p) -> bool:
    return all(p[k] > p[k + 1] for k in range(3))


def bracket_identity_residual(m, F, p, M=None, rhs_factor=None):
    lhs, rhs = bracket_sides(m, F, p, M=M, rhs_factor=rhs_factor)
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------


def detM_build(m, p: Sequence):
    """Coefficient matrix of F_1..F_4 in L = 0 and d_12 L = d_13 L = d_14 L = 0.

    Each F'_b is eliminated through d_b L = 0, which contains only that
    derivative.  Returns (matrix, determinant), exact over Fractions.
    """
    p = [Fraction(x) for x in p]
    _int_exp(2 * (Fraction(m) + 1), "L")
    jp = seed_point(p)
    c = [L_coefficient(m, jp, i) for i in IDX]  # jets of the coefficient functions
    rows = [[c[i].value for i in range(4)]]
    for b in (2, 3, 4):
        row = [c[i].h(0, b - 1) for i in range(4)]
        # F'_1 enters with d_b c_1, F'_b with d_1 c_b
        for a, weight in ((1, c[0].grad[b - 1]), (b, c[b - 1].grad[0])):
            pivot = c[a - 1].value
            if pivot == 0:
                raise ZeroDivisionError(f"elimination pivot for F'_{a} vanishes")
            # d_a L = sum_i d_a c_i F_i + c_a F'_a = 0
            for i in range(4):
                row[i] -= weight * c[i].grad[a - 1] / pivot
        rows.append(row)
    return rows, det(rows)


def det(rows):
    """Exact determinant by fraction-valued Gaussian elimination."""
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a)
    sign = 1
    out = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        out *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                for k in range(col, n):
                    a[r][k] -= f * a[col][k]
    return sign * out


def detM_closed(m, p: Sequence, lead=-16):
    """-16 (m+1)^3 (2m+1)^3 (x2-x3)^2 (x2-x4)^2 (x3-x4)^2 prod_{k<l} (x^k-x^l)^(2(2m+1))."""
    p = [Fraction(x) for x in p]
    m = Fraction(m)
    e = _int_exp(2 * (2 * m + 1), "det")
    out = Fraction(lead) * (m + 1) ** 3 * (2 * m + 1) ** 3
    out *= (p[1] - p[2]) ** 2 * (p[1] - p[3]) ** 2 * (p[2] - p[3]) ** 2
    for k, l in PAIRS:
        out *= _diff(p, k, l) ** e
    return out
