"""Reader for ``.bwm`` metric description files.

Line-oriented, ``#`` starts a comment::

    metric "sphere-ish"
    family binary-general
    phi12 expr x1*x2
    ...
    F1 poly 1 0 2
    F2 expr exp(x2)
    M expr 1
    domain ordered
    box x1 -1 1
    delta 1e-6
"""

from __future__ import annotations

import re
import shlex
from fractions import Fraction
from pathlib import Path

from . import exprlang as el
from .metric import PAIRS, Domain, FField, MetricSpec, Poly, SpecError, case_iv_phi

PHI_KEYS = tuple(f"phi{i}{j}" for i, j in PAIRS)
F_KEYS = ("F1", "F2", "F3", "F4")
SINGLE_KEYS = ("metric", "family", "m", "M", "domain", "delta") + PHI_KEYS + F_KEYS


def _strip_comment(line: str) -> str:
    out, quoted = [], False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        elif ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out).strip()


def _expr(rest: str, where: str) -> el.Expr:
    kind, _, body = rest.partition(" ")
    if kind != "expr":
        raise SpecError(f"{where}: expected 'expr <expression>'")
    try:
        return el.parse(body)
    except el.ParseError as exc:
        raise SpecError(f"{where}: {exc}") from None


def _F(rest: str, where: str) -> FField:
    kind, _, body = rest.partition(" ")
    if kind == "poly":
        try:
            coeffs = tuple(Fraction(t) for t in body.split())
        except (ValueError, ZeroDivisionError):
            raise SpecError(f"{where}: bad polynomial coefficient list {body!r}") from None
        if not coeffs:
            raise SpecError(f"{where}: empty polynomial")
        return Poly(coeffs)
    return _expr(rest, where)


def loads(text: str, source: str = "<string>") -> MetricSpec:
    """Parse the text of a metric file into a MetricSpec."""
    seen: dict[str, object] = {}
    boxes: dict[int, tuple[Fraction, Fraction]] = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        where = f"{source}:{n}"
        if key == "box":
            parts = rest.split()
            mt = re.fullmatch(r"x([1-4])", parts[0]) if parts else None
            if len(parts) != 3 or not mt:
                raise SpecError(f"{where}: expected 'box x<k> <lo> <hi>'")
            k = int(mt.group(1))
            if k in boxes:
                raise SpecError(f"{where}: duplicate box for x{k}")
            try:
                lo, hi = Fraction(parts[1]), Fraction(parts[2])
            except (ValueError, ZeroDivisionError):
                raise SpecError(f"{where}: bad box bounds") from None
            if lo >= hi:
                raise SpecError(f"{where}: empty box for x{k}")
            boxes[k] = (lo, hi)
            continue
        if key not in SINGLE_KEYS:
            raise SpecError(f"{where}: unknown key {key!r}")
        if key in seen:
            raise SpecError(f"{where}: duplicate key {key!r}")
        if key == "metric":
            try:
                parts = shlex.split(rest)
            except ValueError:
                parts = []
            if len(parts) != 1:
                raise SpecError(f"{where}: expected metric \"<name>\"")
            seen[key] = parts[0]
        elif key == "family":
            seen[key] = rest
        elif key == "m":
            try:
                seen[key] = Fraction(rest)
            except (ValueError, ZeroDivisionError):
                raise SpecError(f"{where}: bad rational {rest!r}") from None
        elif key == "domain":
            if rest != "ordered":
                raise SpecError(f"{where}: only 'domain ordered' is supported")
            seen[key] = True
        elif key == "delta":
            try:
                seen[key] = float(rest)
            except ValueError:
                raise SpecError(f"{where}: bad delta {rest!r}") from None
        elif key in F_KEYS:
            seen[key] = _F(rest, where)
        else:
            seen[key] = _expr(rest, where)

    for key in ("metric", "family", "M") + F_KEYS:
        if key not in seen:
            raise SpecError(f"{source}: missing mandatory line {key!r}")
    family = seen["family"]
    m = seen.get("m")
    phis = [seen.get(k) for k in PHI_KEYS]
    if family in ("case-iv", "table1-iv") and all(p is None for p in phis):
        if m is None:
            raise SpecError(f"{source}: family {family} needs an 'm' line")
        phis = list(case_iv_phi(m))
    missing = [k for k, p in zip(PHI_KEYS, phis) if p is None]
    if missing:
        raise SpecError(f"{source}: missing {', '.join(missing)}")
    domain = Domain(
        delta=seen.get("delta", 1e-6),
        ordered=bool(seen.get("domain")),
        boxes=tuple(boxes.get(k, Domain().boxes[k - 1]) for k in range(1, 5)),
    )
    return MetricSpec(
        name=seen["metric"],
        family=family,
        phi=tuple(phis),
        F=tuple(seen[k] for k in F_KEYS),
        M=seen["M"],
        m=m,
        domain=domain,
    )


def load(path: str | Path) -> MetricSpec:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"spec file not found: {p}")
    return loads(p.read_text(encoding="utf-8"), source=str(p))
