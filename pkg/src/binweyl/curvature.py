"""Curvature of diagonal metrics from exact second-order jets.

Conventions::

    R^i_{jkl} = d_k G^i_{lj} - d_l G^i_{kj} + G^i_{km} G^m_{lj} - G^i_{lm} G^m_{kj}
    R_{jl}    = R^i_{jil}
    C_{ijkl}  = R_{ijkl} - 1/2 (g_ik R_jl - g_il R_jk + g_jl R_ik - g_jk R_il)
                + R/6 (g_ik g_jl - g_il g_jk)

Indices in arrays are 0-based.  All routines work over floats and over
Fractions (for metrics whose components are rational functions).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exprlang as el
from .jets import DIM, Jet1, Jet2, is_exact, seed_point
from .metric import MetricSpec, admissible, as_jet, metric_jets

R4 = range(DIM)


class InadmissiblePoint(ArithmeticError):
    pass


@dataclass
class CurvatureBundle:
    g: list  # diagonal components g_ii
    gamma: list  # gamma[i][j][k] -> Jet1 for G^i_{jk}
    riemann: np.ndarray  # R_{ijkl}
    ricci: np.ndarray
    scalar: object
    weyl: np.ndarray  # C_{ijkl}
    weyl13: np.ndarray  # C^i_{jkl}
    weyl22: dict  # (i, j) 1-based, i < j -> C^{ij}_{ij}

    def gamma_values(self) -> np.ndarray:
        return _array([[[self.gamma[i][j][k].value for k in R4] for j in R4] for i in R4])


def _array(nested) -> np.ndarray:
    a = np.array(nested, dtype=object)
    flat = a.ravel()
    if flat.size and not any(is_exact(x) for x in flat):
        return a.astype(float)
    return a


def christoffel_from_jets(gj: Sequence[Jet2]) -> list:
    """G^i_{jk} as order-1 jets from order-2 jets of the diagonal components."""
    g1 = [x.as_jet1() for x in gj]
    ginv = [x.reciprocal() for x in g1]
    dg = [[x.d(a) for a in R4] for x in gj]  # dg[i][a] = d_a g_ii
    zero = Jet1.const(0 * gj[0].value)
    gam = [[[zero] * DIM for _ in R4] for _ in R4]
    for i in R4:
        half = ginv[i] * (Fraction(1, 2) if is_exact(gj[0].value) else 0.5)
        for j in R4:
            for k in range(j, DIM):
                t = None
                if i == k:
                    t = dg[i][j]
                if i == j:
                    t = dg[i][k] if t is None else t + dg[i][k]
                if j == k:
                    t = -dg[j][i] if t is None else t - dg[j][i]
                if t is not None:
                    gam[i][j][k] = gam[i][k][j] = half * t
    return gam


def christoffel(spec: MetricSpec, p: Sequence) -> list:
    _require(spec, p)
    return christoffel_from_jets(metric_jets(spec, p))


def _require(spec, p):
    adm = admissible(spec, p)
    if not adm:
        raise InadmissiblePoint("; ".join(adm.diagnostics))


def curvature_from_jets(gj: Sequence[Jet2]) -> CurvatureBundle:
    gam = christoffel_from_jets(gj)
    g = [x.value for x in gj]
    exact = is_exact(g[0])
    ginv = [1 / Fraction(x) if exact else 1.0 / x for x in g]
    zero = 0 * g[0]

    # Riemann with first index up
    rup = [[[[zero] * DIM for _ in R4] for _ in R4] for _ in R4]
    for i in R4:
        for j in R4:
            for k in R4:
                for l in range(k + 1, DIM):
                    v = gam[i][l][j].grad[k] - gam[i][k][j].grad[l]
                    for m in R4:
                        v += gam[i][k][m].value * gam[m][l][j].value - gam[i][l][m].value * gam[m][k][j].value
                    rup[i][j][k][l] = v
                    rup[i][j][l][k] = -v
    riem = [[[[g[i] * rup[i][j][k][l] for l in R4] for k in R4] for j in R4] for i in R4]
    ric = [[sum((rup[i][j][i][l] for i in R4), zero) for l in R4] for j in R4]
    scal = sum((ginv[j] * ric[j][j] for j in R4), zero)
    sixth = Fraction(1, 6) if exact else 1.0 / 6.0
    half = Fraction(1, 2) if exact else 0.5

    def gd(a, b):
        return g[a] if a == b else zero

    weyl = [[[[zero] * DIM for _ in R4] for _ in R4] for _ in R4]
    for i in R4:
        for j in R4:
            for k in R4:
                for l in R4:
                    c = riem[i][j][k][l]
                    c -= half * (
                        gd(i, k) * ric[j][l] - gd(i, l) * ric[j][k] + gd(j, l) * ric[i][k] - gd(j, k) * ric[i][l]
                    )
                    c += scal * sixth * (gd(i, k) * gd(j, l) - gd(i, l) * gd(j, k))
                    weyl[i][j][k][l] = c
    w13 = [[[[ginv[i] * weyl[i][j][k][l] for l in R4] for k in R4] for j in R4] for i in R4]
    w22 = {
        (i + 1, j + 1): ginv[i] * ginv[j] * weyl[i][j][i][j]
        for i in R4
        for j in range(i + 1, DIM)
    }
    return CurvatureBundle(
        g=g,
        gamma=gam,
        riemann=_array(riem),
        ricci=_array(ric),
        scalar=scal,
        weyl=_array(weyl),
        weyl13=_array(w13),
        weyl22=w22,
    )


def diagonal_curvature(components: Sequence[el.Expr], p: Sequence) -> CurvatureBundle:
    """Curvature of an arbitrary diagonal metric given by four expressions."""
    pt = seed_point(p)
    jets = [as_jet(el.evaluate(c, pt)) for c in components]
    return curvature_from_jets(jets)


def curvature(spec: MetricSpec, p: Sequence) -> CurvatureBundle:
    """Full curvature bundle of ``spec`` at ``p`` (floats or Fractions)."""
    _require(spec, p)
    return curvature_from_jets(metric_jets(spec, p))


def riemann_norm(spec: MetricSpec, p: Sequence, bundle: CurvatureBundle | None = None):
    """sum R_ijkl^2 / sum g_ii^2 -- zero exactly for flat metrics."""
    b = bundle or curvature(spec, p)
    num = sum(x * x for x in b.riemann.ravel())
    den = sum(x * x for x in b.g)
    return num / den


def frame_max(bundle: CurvatureBundle, tensor: np.ndarray) -> float:
    """Largest orthonormal-frame component |T_ijkl| / sqrt|g_ii g_jj g_kk g_ll|."""
    g = np.array([abs(float(x)) for x in bundle.g])
    scale = np.sqrt(np.einsum("i,j,k,l->ijkl", g, g, g, g))
    return float(np.abs(np.asarray(tensor, dtype=float) / scale).max())


def weyl_residual(bundle: CurvatureBundle) -> float:
    """Frame Weyl magnitude relative to max(1, frame Riemann magnitude).

    Conformally flat metrics give round-off level values whatever the size
    of the metric components; the metric-component scale itself would hide
    genuine Weyl curvature when g_ii are small (m <= -1).
    """
    return frame_max(bundle, bundle.weyl) / max(1.0, frame_max(bundle, bundle.riemann))


# ---------------------------------------------------------------------------
# finite-difference oracle: metric values only, general (non-diagonal) formulas


def _metric_matrix(spec: MetricSpec, q) -> np.ndarray:
    return np.diag([float(el.evaluate(c, q)) for c in spec.components])


def _fd_gamma(spec: MetricSpec, q, h: float) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    dg = np.empty((DIM, DIM, DIM))  # dg[a, l, k] = d_a g_lk
    for a in R4:
        e = np.zeros(DIM)
        e[a] = h
        dg[a] = (_metric_matrix(spec, q + e) - _metric_matrix(spec, q - e)) / (2 * h)
    ginv = np.linalg.inv(_metric_matrix(spec, q))
    # G^i_{jk} = 1/2 g^{il} (d_j g_lk + d_k g_lj - d_l g_jk)
    t = np.einsum("jlk->ljk", dg) + np.einsum("klj->ljk", dg) - dg
    return 0.5 * np.einsum("il,ljk->ijk", ginv, t)


def fd_oracle_curvature(spec: MetricSpec, p: Sequence[float], h: float = 1e-4) -> CurvatureBundle:
    """Approximate curvature bundle built from metric values and central differences."""
    p = np.asarray([float(x) for x in p])
    g = _metric_matrix(spec, p)
    ginv = np.linalg.inv(g)
    gam = _fd_gamma(spec, p, h)
    dgam = np.empty((DIM, DIM, DIM, DIM))  # dgam[a, i, j, k] = d_a G^i_{jk}
    for a in R4:
        e = np.zeros(DIM)
        e[a] = h
        dgam[a] = (_fd_gamma(spec, p + e, h) - _fd_gamma(spec, p - e, h)) / (2 * h)
    rup = (
        np.einsum("kilj->ijkl", dgam)
        - np.einsum("likj->ijkl", dgam)
        + np.einsum("ikm,mlj->ijkl", gam, gam)
        - np.einsum("ilm,mkj->ijkl", gam, gam)
    )
    riem = np.einsum("ia,ajkl->ijkl", g, rup)
    ric = np.einsum("ijil->jl", rup)
    scal = np.einsum("jl,jl->", ginv, ric)
    weyl = (
        riem
        - 0.5
        * (
            np.einsum("ik,jl->ijkl", g, ric)
            - np.einsum("il,jk->ijkl", g, ric)
            + np.einsum("jl,ik->ijkl", g, ric)
            - np.einsum("jk,il->ijkl", g, ric)
        )
        + scal / 6.0 * (np.einsum("ik,jl->ijkl", g, g) - np.einsum("il,jk->ijkl", g, g))
    )
    w13 = np.einsum("ia,ajkl->ijkl", ginv, weyl)
    w22 = {(i + 1, j + 1): ginv[i, i] * ginv[j, j] * weyl[i, j, i, j] for i in R4 for j in range(i + 1, DIM)}
    gamma = [[[Jet1(gam[i, j, k], list(dgam[:, i, j, k])) for k in R4] for j in R4] for i in R4]
    return CurvatureBundle(
        g=list(np.diag(g)),
        gamma=gamma,
        riemann=riem,
        ricci=ric,
        scalar=float(scal),
        weyl=weyl,
        weyl13=w13,
        weyl22=w22,
    )
