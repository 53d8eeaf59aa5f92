"""Command-line front end.

Exit codes: 0 all checks passed, 1 a check failed, 2 usage/parse/spec
error, 3 numerical domain error.

Machine output is one ``RESULT key=value ...`` line per record; floats use
17 significant digits and rationals print as p/q.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from typing import Iterable, Sequence

from . import classify as cl
from . import exact as ex
from . import specfile
from .curvature import InadmissiblePoint, curvature, riemann_norm, weyl_residual
from .jets import DomainError
from .metric import MetricSpec, SpecError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.17g}"
    if isinstance(v, (tuple, list)):
        return ",".join(fmt_coord(x) for x in v)
    if v is None:
        return "-"
    return str(v)


def fmt_coord(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def emit_report(rows: Iterable[dict], mode: str = "human") -> str:
    """Render records as machine ``RESULT`` lines or a human aligned table."""
    rows = list(rows)
    if not rows:
        return ""
    if mode == "machine":
        return "".join("RESULT " + " ".join(f"{k}={fmt(v)}" for k, v in r.items()) + "\n" for r in rows)
    keys: list[str] = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    cells = [[_human(r.get(k, "")) for k in keys] for r in rows]
    widths = [max(len(k), *(len(c[n]) for c in cells)) for n, k in enumerate(keys)]
    lines = ["  ".join(k.ljust(w) for k, w in zip(keys, widths)).rstrip()]
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


def _human(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, tuple) and v and isinstance(v[0], float):
        return ",".join(f"{x:.6g}" for x in v)
    return fmt(v)


def _point(text: str, exact: bool):
    try:
        vals = [Fraction(t.strip()) for t in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad --point {text!r}") from None
    if len(vals) != 4:
        raise UsageError("--point needs four comma-separated coordinates")
    return tuple(vals) if exact else tuple(float(v) for v in vals)


def _grid(text: str) -> list[int]:
    try:
        n = [int(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"bad --grid {text!r}") from None
    if len(n) != 4 or any(k < 1 for k in n):
        raise UsageError("--grid needs four positive integers")
    return n


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad rational {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="binweyl", description="Curvature and conformal-flatness checks for diagonal metrics on R^4.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def common(sp, spec=True):
        if spec:
            sp.add_argument("spec", help="metric file (.bwm)")
        sp.add_argument("--machine", action="store_true", help="RESULT key=value lines")
        sp.add_argument("--seed", type=int, default=42)
        sp.add_argument("--samples", type=int, default=100)
        sp.add_argument("--tol", type=float, default=cl.TAU_FLAT)

    c = sub.add_parser("curvature", help="curvature bundle at one point")
    common(c)
    c.add_argument("--point", required=True)
    c.add_argument("--exact", action="store_true", help="rational arithmetic")

    c = sub.add_parser("classify", help="signature, conformal flatness, lemma case, table checks")
    common(c)

    c = sub.add_parser("flatness", help="Riemann flatness residual over samples")
    common(c)

    c = sub.add_parser("scan", help="grid report")
    common(c)
    c.add_argument("--grid", required=True)

    c = sub.add_parser("verify", help="exact identity check")
    common(c, spec=False)
    c.add_argument("identity", choices=ex.IDENTITIES)
    c.add_argument("--m", type=_rational, default=None)
    c.add_argument("--points", type=int, default=100)
    c.add_argument("--exact", action="store_true", help="accepted for symmetry; verification is always exact")
    c.add_argument("--mutation", choices=ex.MUTATIONS, default=None, help="deliberately corrupt one coefficient")
    return p


# --- verbs ------------------------------------------------------------------


def _load(path: str) -> MetricSpec:
    return specfile.load(path)


def cmd_curvature(args, out) -> int:
    spec = _load(args.spec)
    p = _point(args.point, args.exact)
    if args.exact and not spec.exact_capable:
        raise UsageError(f"{spec.name}: metric contains transcendental or fractional-power terms; drop --exact")
    b = curvature(spec, p)
    rows = [{"spec": spec.name, "quantity": f"g{i}{i}", "value": b.g[i - 1]} for i in range(1, 5)]
    rows.append({"spec": spec.name, "quantity": "scalar", "value": b.scalar})
    rows.append({"spec": spec.name, "quantity": "riemann_norm", "value": riemann_norm(spec, p, b)})
    if not args.exact:
        rows.append({"spec": spec.name, "quantity": "weyl_residual", "value": weyl_residual(b)})
    for (i, j), v in b.weyl22.items():
        rows.append({"spec": spec.name, "quantity": f"C{i}{j}_{i}{j}", "value": v})
    out.write(emit_report(rows, _mode(args)))
    return EXIT_OK


def _verdict_row(v: cl.Verdict, spec: MetricSpec) -> dict:
    return {
        "check": v.kind,
        "spec": spec.name,
        "pass": v.passed,
        "max_residual": float(v.max_residual),
        "samples": v.samples_used,
        "tol": v.tol,
    }


def cmd_classify(args, out) -> int:
    spec = _load(args.spec)
    plan = cl.SamplePlan(args.samples, args.seed)
    pts = cl.sample_points(spec, plan)
    sig = cl.signature(spec, pts[0])
    rows = [{"check": "signature", "spec": spec.name, "point": pts[0], "signs": sig.pattern, "tag": sig.tag}]
    verdicts = [cl.conformal_flatness(spec, plan, args.tol)]
    if spec.family in ("case-iv", "table1-iv"):
        rows.append({"check": "lemma_case", "spec": spec.name, "case": cl.lemma_case(spec)})
    if spec.family != "case-iv":
        verdicts += list(cl.table1_check(spec, plan))
    rows += [_verdict_row(v, spec) for v in verdicts]
    ck = next((v for v in verdicts if v.kind == "table1_ckikj"), None)
    if spec.family == "case-iv" or (ck is not None and ck.passed):
        b = curvature(spec, pts[0])
        try:
            tag, advisory = cl.petrov_tag(b.weyl22, sig)
            rows.append({"check": "petrov", "spec": spec.name, "tag": tag, "advisory": advisory})
        except ValueError as exc:
            rows.append({"check": "petrov", "spec": spec.name, "tag": "refused", "reason": str(exc).replace(" ", "_")})
    out.write(emit_report(rows, _mode(args)))
    return EXIT_OK if all(v.passed for v in verdicts) else EXIT_FAIL


def cmd_flatness(args, out) -> int:
    spec = _load(args.spec)
    pts = cl.sample_points(spec, cl.SamplePlan(args.samples, args.seed))
    vals = [float(riemann_norm(spec, p)) for p in pts]
    worst = max(vals)
    ok = worst <= args.tol
    rows = [
        {
            "check": "flatness",
            "spec": spec.name,
            "pass": ok,
            "max_residual": worst,
            "min_residual": min(vals),
            "samples": len(pts),
            "tol": args.tol,
        }
    ]
    out.write(emit_report(rows, _mode(args)))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_scan(args, out) -> int:
    spec = _load(args.spec)
    rows = []
    for r in cl.scan_report(spec, _grid(args.grid)):
        row = {"spec": spec.name, "point": r.point}
        if r.skipped:
            row["status"] = "skip"
            row["reason"] = r.skipped.replace(" ", "_")
        else:
            row.update(status="ok", signature=r.signature, weyl_residual=r.weyl_residual,
                       riemann_residual=r.riemann_residual)
        rows.append(row)
    out.write(emit_report(rows, _mode(args)))
    return EXIT_OK


def cmd_verify(args, out) -> int:
    try:
        case = ex.IdentityCase(args.identity, args.m, trials=args.points, seed=args.seed, mutation=args.mutation)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = ex.run_identity(case)
    row = {
        "identity": case.name,
        "m": str(case.m),
        "trials": len(rep.trials),
        "status": "pass" if rep.passed else "fail",
        "resampled": rep.resampled,
        "degree_bound": rep.degree_bound,
    }
    if rep.first_failure:
        row["point"] = rep.first_failure.point
        row["residual"] = rep.first_failure.residual
    rows = [row]
    if getattr(args, "mutation", None):
        rows[0]["mutation"] = args.mutation
    out.write(emit_report(rows, _mode(args)))
    return EXIT_OK if rep.passed else EXIT_FAIL


def _mode(args) -> str:
    return "machine" if args.machine else "human"


VERBS = {
    "curvature": cmd_curvature,
    "classify": cmd_classify,
    "flatness": cmd_flatness,
    "scan": cmd_scan,
    "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s", stream=err)
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "samples", 1) < 1 or getattr(args, "points", 1) < 1:
            raise UsageError("--samples and --points must be positive")
        return VERBS[args.verb](args, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except FileNotFoundError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except SpecError as exc:
        err.write(f"spec error: {exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (cl.NoAdmissiblePoints, ex.CollisionError, InadmissiblePoint, DomainError, ArithmeticError) as exc:
        err.write(f"domain error: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
