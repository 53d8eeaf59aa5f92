"""Verdicts on metrics: signature, conformal flatness, lemma-case membership,
table-row compliance and a Petrov D/O tag."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exprlang as el
from . import formulas as fm
from .curvature import CurvatureBundle, curvature, frame_max, riemann_norm, weyl_residual
from .metric import LEMMA_M, MetricSpec, Poly, admissible, case_iv_phi, metric_values

TAU_FLAT = 1e-8
TAU_TABLE = 1e-9

TRIPLES = [t for t in itertools.permutations(range(1, 5), 3)]
# the 12 ordered (i, j, k) with i < j for C^k_{ikj}
CK_TRIPLES = [(i, j, k) for i, j, k in TRIPLES if i < j]


class NoAdmissiblePoints(ArithmeticError):
    pass


@dataclass
class Verdict:
    kind: str
    passed: bool
    max_residual: float
    samples_used: int
    tol: float
    details: str = ""


@dataclass(frozen=True)
class SamplePlan:
    samples: int = 100
    seed: int = 42
    max_tries: int = 50  # per requested sample


@dataclass(frozen=True)
class SignatureProfile:
    signs: tuple[int, ...]
    tag: str

    @property
    def pattern(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)


def sample_points(spec: MetricSpec, plan: SamplePlan) -> list[tuple[float, ...]]:
    """Admissible points drawn uniformly from the spec's boxes, in seed order."""
    rng = np.random.default_rng(plan.seed)
    lo = np.array([float(b[0]) for b in spec.domain.boxes])
    hi = np.array([float(b[1]) for b in spec.domain.boxes])
    out = []
    for _ in range(plan.samples * plan.max_tries):
        if len(out) == plan.samples:
            break
        p = tuple(float(x) for x in rng.uniform(lo, hi))
        if admissible(spec, p):
            out.append(p)
    if not out:
        raise NoAdmissiblePoints(f"{spec.name}: no admissible point found in the declared boxes")
    return out


def signature_of(values: Sequence) -> SignatureProfile:
    signs = tuple(1 if v > 0 else -1 for v in values)
    if any(v == 0 for v in values):
        raise ArithmeticError("degenerate metric component")
    neg = signs.count(-1)
    tag = {0: "Riemannian", 4: "Riemannian", 1: "Lorentzian", 3: "Lorentzian", 2: "neutral"}[neg]
    return SignatureProfile(signs, tag)


def signature(spec: MetricSpec, p: Sequence) -> SignatureProfile:
    adm = admissible(spec, p)
    if not adm:
        raise ArithmeticError("; ".join(adm.diagnostics))
    return signature_of(metric_values(spec, p))


def conformal_flatness(spec: MetricSpec, plan: SamplePlan = SamplePlan(), tol: float = TAU_FLAT) -> Verdict:
    """Pass iff the normalised Weyl residual is below ``tol`` at every sample."""
    pts = sample_points(spec, plan)
    worst = 0.0
    where = None
    for p in pts:
        r = weyl_residual(curvature(spec, p))
        if r > worst or where is None:
            worst, where = max(worst, r), p
    return Verdict(
        "conformal_flatness",
        worst <= tol,
        worst,
        len(pts),
        tol,
        f"tol={tol:g} worst_point={','.join(f'{x:.6g}' for x in where)}",
    )


# ---------------------------------------------------------------------------


def as_poly(F, i: int, max_degree: int = 6) -> Poly | None:
    """Recover a one-variable polynomial from F_i, or None if it is not one."""
    if isinstance(F, Poly):
        return F
    if not el.is_rational_only(F) or not el.dependence(F) <= {i}:
        return None
    n = max_degree + 1
    xs = [Fraction(k, 3) + Fraction(1, 7) for k in range(n + 3)]
    try:
        ys = [el.evaluate(F, [x] * 4) for x in xs]
    except ArithmeticError:
        return None
    coeffs = _interpolate(xs[:n], ys[:n])
    poly = Poly(tuple(coeffs))
    if any(poly(x) != y for x, y in zip(xs[n:], ys[n:])):
        return None
    return poly


def _interpolate(xs, ys) -> list[Fraction]:
    """Coefficients of the interpolating polynomial (Newton form, expanded)."""
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    out = [Fraction(0)] * n
    for k in range(n - 1, -1, -1):
        # out = out * (x - xs[k]) + coef[k]
        shifted = [Fraction(0)] + out[:-1]
        out = [s - xs[k] * o for s, o in zip(shifted, out)]
        out[0] += coef[k]
    return out


def _trim(p: Poly) -> tuple:
    return p.coeffs[: p.degree + 1]


def lemma_case(spec: MetricSpec) -> str:
    """Structural match against the four conformally flat case-iv families."""
    if spec.family not in ("case-iv", "table1-iv"):
        raise ValueError(f"lemma_case needs a case-iv spec, got family {spec.family}")
    if spec.family == "table1-iv" and tuple(spec.phi) != case_iv_phi(spec.m):
        return "none"
    m = spec.m
    if m == LEMMA_M["c"]:
        return "c"
    polys = [as_poly(F, i) for i, F in enumerate(spec.F, start=1)]
    if any(p is None for p in polys):
        return "none"
    if m == LEMMA_M["a"]:
        if all(p.degree <= 0 for p in polys) and sum(p(Fraction(0)) for p in polys) == 0:
            return "a"
        return "none"
    shared = len({_trim(p) for p in polys}) == 1
    signed = spec.family == "case-iv" and spec.signed_powers
    if m == LEMMA_M["b"] and shared and signed and polys[0].degree <= 2:
        return "b"
    if m == LEMMA_M["d"] and shared and signed and polys[0].degree <= 6:
        return "d"
    return "none"


def table1_check(spec: MetricSpec, plan: SamplePlan = SamplePlan(), tol: float = TAU_TABLE) -> tuple[Verdict, Verdict]:
    """Vanishing of C^k_{ikj} and the cyclic lambda condition over samples.

    Residuals are divided by max(1, largest squared first derivative of
    phi) and max(1, largest |phi_ab,c| * largest |phi_ab,ab|) respectively.
    """
    pts = sample_points(spec, plan)
    ck_worst = lam_worst = 0.0
    for p in pts:
        pj = fm.phi_jets(spec, p)
        d1 = max(abs(float(pj.d(a, b, c))) for a, b in itertools.combinations(range(1, 5), 2) for c in (a, b))
        d2 = max(abs(float(pj.dd(a, b, a, b))) for a, b in itertools.combinations(range(1, 5), 2))
        ck = max(abs(float(fm.ckikj_closed(pj, i, j, k))) for i, j, k in CK_TRIPLES)
        lr = max(abs(float(fm.lambda_cyclic_residual(pj, i, j, k))) for i, j, k in itertools.combinations(range(1, 5), 3))
        ck_worst = max(ck_worst, ck / max(1.0, d1 * d1))
        lam_worst = max(lam_worst, lr / max(1.0, d1 * d2))
    n = len(pts)
    return (
        Verdict("table1_ckikj", ck_worst <= tol, ck_worst, n, tol, f"tol={tol:g}"),
        Verdict("table1_lambda", lam_worst <= tol, lam_worst, n, tol, f"tol={tol:g}"),
    )


def petrov_tag(weyl22, sig: SignatureProfile | None = None, tol: float = 1e-9) -> tuple[str, bool]:
    """O / D / I from (C^12_12, C^13_13, C^14_14); returns (tag, advisory).

    Assumes the only surviving Weyl components are the C^{ij}_{ij}.
    """
    if isinstance(weyl22, dict):
        w = [float(weyl22[(1, k)]) for k in (2, 3, 4)]
    else:
        w = [float(x) for x in weyl22]
    advisory = sig is None or sig.tag != "Riemannian"
    scale = max(abs(x) for x in w)
    if scale <= tol:
        return "O", advisory
    if abs(sum(w)) > 10 * tol * scale:
        raise ValueError(f"trace constraint violated: sum = {sum(w):.3g}")
    equal = [abs(a - b) <= tol * scale for a, b in itertools.combinations(w, 2)]
    return ("D" if sum(equal) == 1 else "I"), advisory


# ---------------------------------------------------------------------------


@dataclass
class ScanRow:
    point: tuple[float, ...]
    signature: str | None
    weyl_residual: float | None
    riemann_residual: float | None
    skipped: str | None = None


def grid_points(spec: MetricSpec, shape: Sequence[int]) -> list[tuple[float, ...]]:
    axes = []
    for (lo, hi), n in zip(spec.domain.boxes, shape):
        lo, hi = float(lo), float(hi)
        axes.append([lo] if n == 1 else list(np.linspace(lo, hi, n)))
    return [tuple(float(x) for x in p) for p in itertools.product(*axes)]


def scan_report(spec: MetricSpec, shape: Sequence[int]) -> list[ScanRow]:
    rows = []
    for p in grid_points(spec, shape):
        adm = admissible(spec, p)
        if not adm:
            rows.append(ScanRow(p, None, None, None, skipped=adm.diagnostics[0]))
            continue
        b = curvature(spec, p)
        rows.append(
            ScanRow(
                p,
                signature_of(b.g).pattern,
                weyl_residual(b),
                frame_max(b, b.riemann),
            )
        )
    return rows


def flatness_profile(spec: MetricSpec, plan: SamplePlan = SamplePlan()) -> tuple[float, float]:
    """(max, min) of riemann_norm over the sample plan."""
    vals = [float(riemann_norm(spec, p)) for p in sample_points(spec, plan)]
    return max(vals), min(vals)


def bundle_signature(b: CurvatureBundle) -> SignatureProfile:
    return signature_of(b.g)
