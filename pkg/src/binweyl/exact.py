"""Identity testing by exact evaluation at seeded random rational points.

Every residual here is a Fraction; a case passes only when the residual is
exactly zero at every trial point.  Passing N trials is evidence, not proof:
the report carries the trial count and a coarse degree bound.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import formulas as fm
from .curvature import InadmissiblePoint, curvature
from .metric import LEMMA_M, PAIRS, Poly, case_iv, make_lemma_family

MAX_DEN = 64
RETRIES = 100

IDENTITIES = (
    "bracket",
    "detM",
    "L-lemma-a",
    "L-lemma-b",
    "flatness-elliptic",
    "lambda-cyclic-iv",
    "derivative-identity-iv",
    "weyl-lemma-b",
    "weyl-lemma-d",
)
# identities whose parameter m is fixed by the family they test
FIXED_M = {
    "L-lemma-a": LEMMA_M["a"],
    "L-lemma-b": LEMMA_M["b"],
    "flatness-elliptic": LEMMA_M["d"],
    "weyl-lemma-b": LEMMA_M["b"],
    "weyl-lemma-d": LEMMA_M["d"],
}
MUTATIONS = ("rhs-factor", "lead-minus", "lead-plus")

# quartic with roots 3, 1, -1, -3; used for the flat elliptic sub-case
ELLIPTIC_QUARTIC = Poly((9, 0, -10, 0, 1))


class CollisionError(ArithmeticError):
    """No pairwise-distinct point found within the retry budget."""


@dataclass(frozen=True)
class IdentityCase:
    name: str
    m: Fraction | None = None
    trials: int = 100
    seed: int = 42
    box: tuple[Fraction, Fraction] = (Fraction(-5), Fraction(5))
    mutation: str | None = None

    def __post_init__(self):
        if self.name not in IDENTITIES:
            raise ValueError(f"unknown identity {self.name!r}; choose from {', '.join(IDENTITIES)}")
        if self.mutation is not None and self.mutation not in MUTATIONS:
            raise ValueError(f"unknown mutation {self.mutation!r}")
        m = FIXED_M.get(self.name, self.m if self.m is not None else Fraction(1))
        if self.m is not None and self.name in FIXED_M and Fraction(self.m) != m:
            raise ValueError(f"identity {self.name} is defined for m = {m} only")
        m = Fraction(m)
        if (2 * m).denominator != 1:
            raise ValueError(f"exact mode needs 2m integral, got m = {m}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "box", (Fraction(self.box[0]), Fraction(self.box[1])))


@dataclass
class TrialRecord:
    point: tuple[Fraction, ...]
    residual: Fraction


@dataclass
class IdentityReport:
    case: IdentityCase
    passed: bool
    trials: list[TrialRecord] = field(default_factory=list)
    resampled: int = 0
    degree_bound: int = 0
    first_failure: TrialRecord | None = None

    @property
    def residual(self) -> Fraction:
        return self.first_failure.residual if self.first_failure else Fraction(0)


def random_rational_point(seed: int, index: int, box: Sequence = (-5, 5)) -> tuple[Fraction, ...]:
    """Deterministic point with denominators <= 64 and distinct coordinates.

    ``box`` is a (lo, hi) pair shared by all coordinates, or four such pairs.
    """
    boxes = _boxes(box)
    rng = random.Random(seed * 1_000_003 + index)
    for _ in range(RETRIES):
        p = []
        for lo, hi in boxes:
            d = rng.randint(1, MAX_DEN)
            a, b = -((-lo * d) // 1), (hi * d) // 1  # ceil(lo d), floor(hi d)
            if a > b:
                raise CollisionError(f"box [{lo}, {hi}] holds no rational with denominator {d}")
            p.append(Fraction(rng.randint(int(a), int(b)), d))
        if len(set(p)) == 4:
            return tuple(p)
    raise CollisionError(f"no pairwise-distinct point after {RETRIES} retries (seed {seed}, index {index})")


def _boxes(box) -> list[tuple[Fraction, Fraction]]:
    if len(box) == 2 and not isinstance(box[0], (tuple, list)):
        box = [box] * 4
    out = [(Fraction(lo), Fraction(hi)) for lo, hi in box]
    if any(lo > hi for lo, hi in out):
        raise ValueError("empty sampling box")
    return out


def _sorted_desc(p):
    return tuple(sorted(p, reverse=True))


def _random_quadratics(seed: int) -> list[Poly]:
    rng = random.Random(seed)
    out = []
    for _ in range(4):
        c = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(3)]
        if c[2] == 0:
            c[2] = Fraction(1)
        out.append(Poly(tuple(c)))
    return out


def _alternate(poly: Poly, m: Fraction) -> list[Poly]:
    """Shared polynomial rewritten in the k<l product convention of L."""
    two_m = int(2 * m)
    return [poly.scaled(-1) if ((i - 1) * two_m) % 2 else poly for i in range(1, 5)]


# per-identity evaluators: (case, point, rng-seed) -> residual ------------------


def _bracket(case: IdentityCase, p):
    F = _random_quadratics(case.seed)
    rhs = (lambda m: m * (2 * m + 1)) if case.mutation == "rhs-factor" else None
    lhs, r = fm.bracket_sides(case.m, F, p, rhs_factor=rhs)
    return lhs - r


def _detM(case: IdentityCase, p):
    lead = {None: -16, "lead-minus": -17, "lead-plus": -15, "rhs-factor": -16}[case.mutation]
    _, built = fm.detM_build(case.m, p)
    return built - fm.detM_closed(case.m, p, lead=lead)


def _L_lemma_a(case: IdentityCase, p):
    return fm.L_quantity(case.m, [Poly((c,)) for c in (1, 2, 3, -6)], p)


def _L_lemma_b(case: IdentityCase, p):
    q = _random_quadratics(case.seed)[0]
    return fm.L_quantity(case.m, _alternate(q, case.m), p)


def _flatness_elliptic(case: IdentityCase, p):
    spec = make_lemma_family("d", ELLIPTIC_QUARTIC.coeffs)
    b = curvature(spec, p)
    return max((abs(x) for x in b.riemann.ravel()), default=Fraction(0))


def _iv_spec(case: IdentityCase):
    return case_iv(case.m, [Poly((1,))] * 4)


def _lambda_cyclic(case: IdentityCase, p):
    pj = fm.phi_jets(_iv_spec(case), p)
    return max(fm.lambda_cyclic_residual(pj, *t) for t in itertools.permutations(range(1, 5), 3))


def _derivative_identity(case: IdentityCase, p):
    pj = fm.phi_jets(_iv_spec(case), p)
    return max(fm.derivative_identity_residual(pj, *t) for t in itertools.permutations(range(1, 5), 3))


def _weyl_lemma(letter: str):
    def run(case: IdentityCase, p):
        if letter == "b":
            params = _random_quadratics(case.seed)[0].coeffs
        else:
            rng = random.Random(case.seed)
            params = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(7))
        pj = fm.phi_jets(make_lemma_family(letter, params), p)
        vals = [fm.cijij_closed(pj, i, j) for i, j in PAIRS]
        vals += [fm.ckikj_closed(pj, *t) for t in itertools.permutations(range(1, 5), 3)]
        return max(abs(v) for v in vals)

    return run


_EVAL: dict[str, Callable] = {
    "bracket": _bracket,
    "detM": _detM,
    "L-lemma-a": _L_lemma_a,
    "L-lemma-b": _L_lemma_b,
    "flatness-elliptic": _flatness_elliptic,
    "lambda-cyclic-iv": _lambda_cyclic,
    "derivative-identity-iv": _derivative_identity,
    "weyl-lemma-b": _weyl_lemma("b"),
    "weyl-lemma-d": _weyl_lemma("d"),
}


def degree_bound(case: IdentityCase) -> int:
    """Coarse bound on the total degree of the cleared numerator of each residual."""
    a = abs(2 * case.m)
    return int(
        {
            "bracket": 6 * (a + 2) + 12,
            "detM": 4 * (3 * abs(2 * case.m + 2) + 2) + 6 * abs(4 * case.m + 2) + 6,
            "L-lemma-a": 3 * abs(2 * case.m + 2) + 2,
            "L-lemma-b": 3 * abs(2 * case.m + 2) + 2,
            "flatness-elliptic": 40,
            "lambda-cyclic-iv": 6,
            "derivative-identity-iv": 6,
            "weyl-lemma-b": 30,
            "weyl-lemma-d": 40,
        }[case.name]
    )


def _needs_order(case: IdentityCase) -> bool:
    # half-integer m gives signed odd powers that only make sense on x1 > x2 > x3 > x4
    return case.m.denominator != 1 or case.name in ("flatness-elliptic", "weyl-lemma-b", "weyl-lemma-d")


def run_identity(case: IdentityCase) -> IdentityReport:
    """Evaluate one identity at ``case.trials`` seeded rational points.

    Stops at the first nonzero residual.  Points where an elimination
    pivot or a metric component vanishes are replaced by the next index and counted.
    """
    ev = _EVAL[case.name]
    report = IdentityReport(case, True, degree_bound=degree_bound(case))
    index = 0
    budget = case.trials * 10
    while len(report.trials) < case.trials:
        if index >= budget:
            raise CollisionError(f"{case.name}: too many resampled points ({report.resampled})")
        p = random_rational_point(case.seed, index, case.box)
        index += 1
        if _needs_order(case):
            p = _sorted_desc(p)
        try:
            r = ev(case, p)
        except (ZeroDivisionError, InadmissiblePoint):
            report.resampled += 1
            continue
        rec = TrialRecord(p, Fraction(r))
        report.trials.append(rec)
        if rec.residual != 0:
            report.passed = False
            report.first_failure = rec
            break
    return report


def detM_values(m, trials: int = 10, seed: int = 42, box=(-5, 5)) -> list[tuple[tuple, Fraction, Fraction]]:
    """(point, built determinant, closed determinant) at seeded points."""
    out = []
    index = 0
    while len(out) < trials:
        p = random_rational_point(seed, index, box)
        index += 1
        try:
            _, built = fm.detM_build(m, p)
        except ZeroDivisionError:
            continue
        out.append((p, built, fm.detM_closed(m, p)))
    return out
