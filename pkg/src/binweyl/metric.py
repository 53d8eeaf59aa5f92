"""Diagonal and binary metrics on R^4.

A binary metric is fixed by six two-variable functions ``phi[i, j]``, four
one-variable functions ``F[i]`` and a conformal factor ``M``::

    g_ii = exp(2 * sum_{j != i} phi_ij) / (M^2 F_i)

The case-iv family takes ``phi_ij = m ln|x^i - x^j|``, which collapses to
``g_ii = prod_{j != i} (x^i - x^j)^(2m) / (M^2 F_i)``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence, Union

from . import exprlang as el
from .exprlang import Expr
from .jets import Jet2, seed_point

log = logging.getLogger(__name__)

PAIRS = tuple(itertools.combinations(range(1, 5), 2))  # (1,2),(1,3),...,(3,4)
FAMILIES = ("binary-general", "table1-i", "table1-ii", "table1-iii", "table1-iv", "case-iv")
# multiplier of the phi-sum in the exponent of g_ii, see module docstring
PHI_WEIGHT = 2


class SpecError(ValueError):
    """A metric description violates a structural invariant."""


def pair(i: int, j: int) -> tuple[int, int]:
    if i == j:
        raise SpecError(f"pair index needs two distinct indices, got ({i},{j})")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Poly:
    """A polynomial in one variable with exact coefficients a0, a1, ..."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        for k in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[k] != 0:
                return k
        return -1

    def expr(self, var: int) -> Expr:
        """Horner form in x<var>."""
        x = el.Var(var)
        cs = list(self.coeffs) or [Fraction(0)]
        e: Expr = el.Const(cs[-1])
        for c in reversed(cs[:-1]):
            e = el.Add(el.Mul(e, x), el.Const(c))
        return e

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + (c if isinstance(t, Fraction) else float(c))
        return acc

    def scaled(self, s) -> "Poly":
        return Poly(tuple(s * c for c in self.coeffs))


FField = Union[Expr, Poly]


def f_expr(F: FField, i: int) -> Expr:
    return F.expr(i) if isinstance(F, Poly) else F


@dataclass(frozen=True)
class Domain:
    delta: float = 1e-6
    ordered: bool = False  # x1 > x2 > x3 > x4
    boxes: tuple[tuple[Fraction, Fraction], ...] = ((Fraction(-3), Fraction(3)),) * 4


@dataclass(frozen=True)
class MetricSpec:
    name: str
    family: str
    phi: tuple[Expr, ...]  # indexed like PAIRS
    F: tuple[FField, ...]
    M: Expr
    m: Fraction | None = None
    domain: Domain = field(default_factory=Domain)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SpecError(f"unknown family {self.family!r}")
        if len(self.phi) != 6 or len(self.F) != 4:
            raise SpecError("a binary metric needs six phi entries and four F entries")
        if (self.m is None) == (self.family in ("table1-iv", "case-iv")):
            raise SpecError(f"parameter m is required exactly for table1-iv / case-iv, family {self.family}")
        if self.m is not None:
            object.__setattr__(self, "m", Fraction(self.m))
        for (i, j), e in zip(PAIRS, self.phi):
            extra = el.dependence(e) - {i, j}
            if extra:
                raise SpecError(f"phi{i}{j} depends on x{min(extra)}; it may only depend on x{i}, x{j}")
        for i, F in enumerate(self.F, start=1):
            extra = el.dependence(f_expr(F, i)) - {i}
            if extra:
                raise SpecError(f"F{i} depends on x{min(extra)}; it may only depend on x{i}")
        if self.family == "case-iv" and not self.domain.ordered and (self.m % 1) != 0:
            log.warning(
                "%s: no coordinate ordering declared; using |x^i - x^j| factors, "
                "signs may differ from the ordered-chart form", self.name,
            )

    def phi_of(self, i: int, j: int) -> Expr:
        return self.phi[PAIRS.index(pair(i, j))]

    @property
    def signed_powers(self) -> bool:
        """Case-iv factors are written as signed (x^i - x^j)^(2m) rather than |x^i - x^j|^(2m)."""
        return (
            self.family == "case-iv"
            and self.domain.ordered
            and (2 * self.m).denominator == 1
        )

    @cached_property
    def components(self) -> tuple[Expr, ...]:
        return tuple(component_expr(self, i) for i in range(1, 5))

    @cached_property
    def F_exprs(self) -> tuple[Expr, ...]:
        return tuple(f_expr(F, i) for i, F in enumerate(self.F, start=1))

    @property
    def exact_capable(self) -> bool:
        return all(el.is_rational_only(c) for c in self.components)


# ---------------------------------------------------------------------------


def component_expr(spec: MetricSpec, i: int) -> Expr:
    """Closed-form expression for the diagonal component g_ii."""
    Fi = f_expr(spec.F[i - 1], i)
    denom = el.Mul(el.Pow(spec.M, Fraction(2)), Fi)
    if spec.family == "case-iv":
        two_m = 2 * spec.m
        factors = []
        for j in range(1, 5):
            if j == i:
                continue
            diff: Expr = el.Sub(el.Var(i), el.Var(j))
            if not spec.signed_powers:
                diff = el.Call("abs", diff)
            factors.append(el.Pow(diff, two_m))
        return el.Div(el.product_of(factors), denom)
    entries = [spec.phi_of(i, j) for j in range(1, 5) if j != i]
    if all(isinstance(e, el.Const) for e in entries) and sum(e.value for e in entries) == 0:
        return el.Div(el.const(1), denom)  # exp(0) folded so the component stays exact
    s = el.sum_of(entries)
    return el.Div(el.Call("exp", el.Mul(el.const(PHI_WEIGHT), s)), denom)


def case_iv_phi(m) -> tuple[Expr, ...]:
    m = Fraction(m)
    return tuple(
        el.Mul(el.Const(m), el.Call("ln", el.Call("abs", el.Sub(el.Var(i), el.Var(j)))))
        for i, j in PAIRS
    )


def euclidean(name: str = "euclidean") -> MetricSpec:
    zero, one = el.const(0), el.const(1)
    return MetricSpec(name, "binary-general", (zero,) * 6, (one,) * 4, one)


def case_iv(m, F: Sequence[FField], M: Expr | None = None, name: str | None = None,
            domain: Domain | None = None) -> MetricSpec:
    """Metric with phi_ij = m ln|x^i - x^j| on the ordered chart x1 > x2 > x3 > x4."""
    m = Fraction(m)
    return MetricSpec(
        name or f"case-iv-m{m}",
        "case-iv",
        case_iv_phi(m),
        tuple(F),
        M if M is not None else el.const(1),
        m=m,
        domain=domain or Domain(ordered=True, boxes=_ORDERED_BOXES),
    )


_ORDERED_BOXES = tuple((Fraction(c) - Fraction(2, 5), Fraction(c) + Fraction(2, 5)) for c in (3, 1, -1, -3))

_TABLE1_ROWS = {
    # entries are for phi12, phi13, phi14, phi23, phi24, phi34:
    # ("free", k) -> free entry k; (A, a, B, b) -> A_a + B_b
    "i": (("free", 0), ("U", 1, "U", 3), ("U", 1, "U", 4), ("U", 2, "U", 3), ("U", 2, "U", 4), ("free", 1)),
    "ii": (("free", 0), ("U", 1, "U", 3), ("V", 1, "V", 4), ("U", 2, "U", 3), ("V", 2, "V", 4), ("Q", 3, "Q", 4)),
    "iii": (("U", 1, "U", 2), ("V", 1, "U", 3), ("Q", 1, "U", 4), ("V", 2, "V", 3), ("Q", 2, "V", 4), ("Q", 3, "Q", 4)),
}


def make_table1(case: str, funcs: dict[str, Sequence[Expr]], free: Sequence[Expr] = (),
                m=None, F: Sequence[FField] | None = None, M: Expr | None = None,
                name: str | None = None, domain: Domain | None = None) -> MetricSpec:
    """Assemble a metric from one row of the classification table.

    ``funcs`` maps "U", "V", "Q" to four one-variable expressions
    (entry k must depend on x^{k+1} only; unused slots may be None).
    Rows i and ii take two free entries (phi12, phi34 / phi12 only).
    Row iv takes only ``U`` and ``m``: phi_ij = m ln|U_i - U_j|.
    """
    for key, fs in funcs.items():
        for k, f in enumerate(fs, start=1):
            if f is None:
                continue
            extra = el.dependence(f) - {k}
            if extra:
                raise SpecError(f"{key}{k} depends on x{min(extra)}; it may only depend on x{k}")
    F = tuple(F) if F is not None else (el.const(1),) * 4
    M = M if M is not None else el.const(1)
    if case == "iv":
        if m is None:
            raise SpecError("table row iv needs the constant m")
        U = funcs["U"]
        m = Fraction(m)
        phi = tuple(
            el.Mul(el.Const(m), el.Call("ln", el.Call("abs", el.Sub(U[i - 1], U[j - 1]))))
            for i, j in PAIRS
        )
        return MetricSpec(name or f"table1-iv-m{m}", "table1-iv", phi, F, M, m=m, domain=domain or Domain())
    if case not in _TABLE1_ROWS:
        raise SpecError(f"unknown table row {case!r}")
    phi = []
    for entry in _TABLE1_ROWS[case]:
        if entry[0] == "free":
            phi.append(free[entry[1]])
        else:
            a, ka, b, kb = entry
            phi.append(el.Add(funcs[a][ka - 1], funcs[b][kb - 1]))
    return MetricSpec(name or f"table1-{case}", f"table1-{case}", tuple(phi), F, M, domain=domain or Domain())


LEMMA_M = {"a": Fraction(-1), "b": Fraction(-1, 2), "c": Fraction(0), "d": Fraction(1, 2)}


def make_lemma_family(case: str, params, M: Expr | None = None, name: str | None = None) -> MetricSpec:
    """The four conformally flat case-iv families.

    a: four constants summing to zero (m = -1)
    b: quadratic coefficients (a0, a1, a2), shared by all F_i (m = -1/2)
    c: four arbitrary one-variable F_i (m = 0)
    d: sextic coefficients (a0, ..., a6), shared by all F_i (m = 1/2)
    """
    if case == "a":
        consts = [Fraction(c) for c in params]
        if len(consts) != 4:
            raise SpecError("lemma family a needs four constants")
        if sum(consts) != 0:
            raise SpecError(
                f"lemma family a: constants sum to {sum(consts)}; with m = -1 the metric is "
                "conformally flat only when L = F1 + F2 + F3 + F4 = 0"
            )
        F = tuple(Poly((c,)) for c in consts)
    elif case in ("b", "d"):
        top = 2 if case == "b" else 6
        coeffs = tuple(Fraction(c) for c in params)
        if len(coeffs) > top + 1:
            raise SpecError(f"lemma family {case} takes at most {top + 1} coefficients")
        F = (Poly(coeffs),) * 4
    elif case == "c":
        F = tuple(params)
        if len(F) != 4:
            raise SpecError("lemma family c needs four functions")
    else:
        raise SpecError(f"unknown lemma case {case!r}")
    return case_iv(LEMMA_M[case], F, M=M, name=name or f"lemma-{case}")


# ---------------------------------------------------------------------------


@dataclass
class Admissibility:
    ok: bool
    diagnostics: list[str]

    def __bool__(self):
        return self.ok


def admissible(spec: MetricSpec, p: Sequence) -> Admissibility:
    """Check that ``p`` is a usable evaluation point for ``spec``."""
    diags = []
    exact = all(isinstance(x, (int, Fraction)) for x in p)
    delta = 0 if exact else spec.domain.delta
    for i, j in PAIRS:
        gap = abs(p[i - 1] - p[j - 1])
        if gap == 0 or gap < delta:
            diags.append(f"coordinate collision ({i},{j})")
    if spec.domain.ordered and not all(p[k] > p[k + 1] for k in range(3)):
        diags.append("ordering x1 > x2 > x3 > x4 violated")
    try:
        if el.evaluate(spec.M, p) == 0:
            diags.append("conformal factor M vanishes")
    except (ArithmeticError, ValueError) as exc:
        diags.append(f"conformal factor M not evaluable: {exc}")
    for i, Fi in enumerate(spec.F_exprs, start=1):
        try:
            if el.evaluate(Fi, p) == 0:
                diags.append(f"degenerate metric component {i}")
        except (ArithmeticError, ValueError) as exc:
            diags.append(f"F{i} not evaluable: {exc}")
    if not diags:
        try:
            for i, g in enumerate(spec.components, start=1):
                if el.evaluate(g, p) == 0:
                    diags.append(f"degenerate metric component {i}")
        except (ArithmeticError, ValueError) as exc:
            diags.append(f"metric not evaluable: {exc}")
    return Admissibility(not diags, diags)


def metric_values(spec: MetricSpec, p: Sequence) -> list:
    return [el.evaluate(g, p) for g in spec.components]


def metric_jets(spec: MetricSpec, p: Sequence) -> list[Jet2]:
    """Order-2 jets of g_11..g_44 at ``p``."""
    pt = seed_point(p)
    return [as_jet(el.evaluate(g, pt)) for g in spec.components]


def as_jet(v) -> Jet2:
    return v if isinstance(v, Jet2) else Jet2.const(v)
