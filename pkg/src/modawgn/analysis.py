"""Error probabilities: closed forms, a numerical-integration oracle, and
an exhaustive constellation search.

Closed forms are built from :func:`band_probability` (pairwise tail sums).
The oracle never touches tail functions; it labels a dense grid with the
actual decision rule, refines each label change by root finding and
integrates the wrapped density numerically over the resulting regions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq, minimize_scalar

from .channel import SymbolMap, average_power
from .decision import (
    MAP,
    DecisionRule,
    DecisionThresholds,
    DegenerateDecision,
    _is_optimal_spacing,
    tau,
    thresholds_map,
)
from .wrapped_gauss import WrappedGaussian, band_probability, density_direct

__all__ = [
    "PeReport",
    "SearchResult",
    "pe_uniform",
    "pe_ml",
    "pe_map",
    "pe_oracle",
    "pe_surface",
    "optimal_map_search",
    "tau",
]

REGIMES = ("always-zero", "upper-mid", "lower-mid", "always-one", "uniform", "ml-general")


@dataclass(frozen=True)
class PeReport:
    pe: float
    regime: str
    thresholds_used: object = None


def pe_uniform(g: WrappedGaussian) -> float:
    """Bit error probability of the optimal map under equal priors."""
    return float(band_probability(g, g.delta / 4.0, 3.0 * g.delta / 4.0))


def pe_ml(g: WrappedGaussian, smap: SymbolMap) -> float:
    """Bit error probability of the ML rule for an arbitrary map.

    Given either symbol, an error occurs when the noise offset falls in the
    half circle ``[eta, eta + delta/2)`` with ``eta = |h1 - h0| / 2``; the
    result does not depend on the prior.
    """
    if smap.h0 == smap.h1:
        raise ValueError("h0 and h1 must differ")
    eta = abs(smap.h1 - smap.h0) / 2.0
    return float(band_probability(g, eta, eta + g.delta / 2.0))


def pe_map(g: WrappedGaussian, pi0: float) -> PeReport:
    """MAP bit error probability for the optimal map ``(-delta/4, delta/4)``."""
    if not 0.0 <= pi0 <= 1.0:
        raise ValueError(f"pi0 must be in [0, 1], got {pi0!r}")
    smap = SymbolMap.optimal(g.delta)
    th = thresholds_map(g, smap, pi0)
    if isinstance(th, DegenerateDecision):
        if th.bit == 0:
            return PeReport(1.0 - pi0, "always-zero", th)
        return PeReport(pi0, "always-one", th)
    if pi0 == 0.5:
        return PeReport(pe_uniform(g), "uniform", th)
    d = g.delta
    if pi0 > 0.5:
        # the one-region is the narrow one here; measure from around h1
        l = d / 2.0 - th.half_width
        pe = ((1.0 - pi0) * band_probability(g, l, d - l)
              + pi0 * band_probability(g, d / 2.0 - l, d / 2.0 + l))
        return PeReport(float(pe), "upper-mid", th)
    l = th.half_width
    pe = ((1.0 - pi0) * band_probability(g, d / 2.0 - l, d / 2.0 + l)
          + pi0 * band_probability(g, l, d - l))
    return PeReport(float(pe), "lower-mid", th)


def _decision_fn(rule: DecisionRule, g, smap):
    w0, w1 = rule.weights()

    def score(y):
        # >= 0 decides 0
        return w0 * density_direct(g, y - smap.h0) - w1 * density_direct(g, y - smap.h1)

    return score


def decision_regions(g: WrappedGaussian, smap: SymbolMap, rule: DecisionRule,
                     n_grid: int = 100_000, xtol: float = 1e-12):
    """Partition ``[-delta/2, delta/2]`` into ``(lo, hi, bit)`` pieces for ``rule``.

    Labels come from a dense grid; every label change is refined by root
    finding to ``xtol``.
    """
    half = g.delta / 2.0
    score = _decision_fn(rule, g, smap)
    y = np.linspace(-half, half, n_grid + 1)
    s = score(y)
    zero = s >= 0
    cuts = []
    for i in np.flatnonzero(zero[:-1] != zero[1:]):
        a, b = y[i], y[i + 1]
        sa, sb = s[i], s[i + 1]
        if sa == 0.0:
            cuts.append(a)
        elif sa * sb < 0:
            cuts.append(brentq(score, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps))
        else:
            cuts.append(b)
    edges = [-half] + cuts + [half]
    pieces = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        bit = 0 if score(0.5 * (lo + hi)) >= 0 else 1
        pieces.append((lo, hi, bit))
    return pieces


def pe_oracle(g: WrappedGaussian, smap: SymbolMap, pi0: float, rule: DecisionRule,
              n_grid: int = 100_000) -> float:
    """Brute-force error probability of ``rule`` when bits have prior ``pi0``.

    ``pi0 * P(decide 1 | h0) + (1 - pi0) * P(decide 0 | h1)``, each term an
    adaptive quadrature of the wrapped density over the rule's regions.
    """
    if not 0.0 <= pi0 <= 1.0:
        raise ValueError(f"pi0 must be in [0, 1], got {pi0!r}")
    total = 0.0
    for lo, hi, bit in decision_regions(g, smap, rule, n_grid=n_grid):
        h, w = (smap.h0, pi0) if bit == 1 else (smap.h1, 1.0 - pi0)
        if w == 0.0:
            continue
        val, _ = quad(lambda t: density_direct(g, t - h), lo, hi,
                      epsabs=1e-14, epsrel=1e-12, limit=200)
        total += w * val
    return total


# Gauss-Legendre nodes for the batched surface
_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


def _integrate_batch(g, a, b, centers):
    """Integrate ``f(t - center)`` over ``[a, b]`` elementwise (composite Gauss-Legendre)."""
    panels = max(1, int(math.ceil(g.delta / (0.5 * g.sigma))))
    frac = (np.arange(panels) + 0.5 + 0.5 * _GL_X[:, None]).ravel(order="F") / panels
    wts = np.tile(_GL_W, panels) / (2.0 * panels)
    width = (b - a)[:, None]
    t = a[:, None] + width * frac[None, :]
    vals = density_direct(g, t - centers[:, None])
    return width[:, 0] * (vals @ wts)


def pe_surface(g: WrappedGaussian, pi0: float, h_grid: np.ndarray,
               n_grid: int = 4000, xtol: float = 1e-13) -> np.ndarray:
    """MAP(pi0) error probability for every pair ``(h0, h1)`` in ``h_grid x h_grid``.

    Same procedure as :func:`pe_oracle` (grid labels, refined cuts, numerical
    integration of the density) vectorised over all pairs. Entries with
    ``h0 == h1`` are ``nan``.
    """
    half = g.delta / 2.0
    h = np.asarray(h_grid, dtype=float)
    m = h.size
    y = np.linspace(-half, half, n_grid + 1)
    F = density_direct(g, y[None, :] - h[:, None])
    w0, w1 = pi0, 1.0 - pi0
    out = np.full((m, m), np.nan)
    for i in range(m):
        s = w0 * F[i][None, :] - w1 * F
        zero = s >= 0
        pair, j = np.nonzero(zero[:, :-1] != zero[:, 1:])
        lo, hi = y[j].copy(), y[j + 1].copy()
        s_lo = s[pair, j]
        h1s = h[pair]

        def score(t):
            return w0 * density_direct(g, t - h[i]) - w1 * density_direct(g, t - h1s)

        while np.max(hi - lo, initial=0.0) > xtol:
            mid = 0.5 * (lo + hi)
            same = (score(mid) >= 0) == (s_lo >= 0)
            lo = np.where(same, mid, lo)
            hi = np.where(same, hi, mid)
        cuts = 0.5 * (lo + hi)
        # every pair gets both interval ends; pieces are consecutive points of one pair
        pid = np.concatenate([np.arange(m), pair, np.arange(m)])
        pts = np.concatenate([np.full(m, -half), cuts, np.full(m, half)])
        order = np.lexsort((pts, pid))
        pid, pts = pid[order], pts[order]
        keep = pid[:-1] == pid[1:]
        a, b, p = pts[:-1][keep], pts[1:][keep], pid[:-1][keep]
        mid = 0.5 * (a + b)
        h1p = h[p]
        bit1 = (w0 * density_direct(g, mid - h[i]) - w1 * density_direct(g, mid - h1p)) < 0
        center = np.where(bit1, h[i], h1p)
        weight = np.where(bit1, w0, w1)
        contrib = weight * _integrate_batch(g, a, b, center)
        out[i] = np.bincount(p, weights=contrib, minlength=m)
    out[np.arange(m), np.arange(m)] = np.nan
    return out


@dataclass
class SearchResult:
    best: SymbolMap
    pe_min: float
    h_grid: np.ndarray
    surface: np.ndarray
    argmin: np.ndarray  # (k, 2) array of (h0, h1)
    ridge_ok: bool
    power_minimal: list = field(default_factory=list)
    power_minimal_equal_weight: list = field(default_factory=list)
    refined_gap: float = math.nan
    refined_pe: float = math.nan


def _power_minimizers(pairs, delta, pi0, tol=1e-12):
    powers = np.array([average_power(SymbolMap(a, b, delta), pi0) for a, b in pairs])
    best = powers.min()
    sel = pairs[powers <= best + tol]
    # canonical ordering: h0 < h1 first
    return sorted((SymbolMap(float(a), float(b), delta) for a, b in sel),
                  key=lambda s: (s.h0 > s.h1, s.h0))


def optimal_map_search(g: WrappedGaussian, pi0: float, grid_step: float | None = None,
                       n_grid: int = 4000, refine: bool = True) -> SearchResult:
    """Exhaustive grid search over ``(h0, h1)`` for the MAP(pi0) error minimum.

    The argmin set is every grid pair within 1e-9 of the minimum. Among
    those, the pairs of least average power ``E[x^2]`` (prior weighted) are
    reported, as are the least-power pairs under equal weighting. The best
    gap ``h1 - h0`` is then refined by golden-section search with the
    full-resolution oracle.
    """
    if grid_step is None:
        grid_step = g.delta / 200.0
    if grid_step > g.delta / 200.0 * (1 + 1e-12):
        raise ValueError("grid_step must be <= delta/200")
    n = int(round(g.delta / grid_step))
    h = -g.delta / 2.0 + grid_step * np.arange(n)
    surf = pe_surface(g, pi0, h, n_grid=n_grid)
    pe_min = float(np.nanmin(surf))
    ii, jj = np.nonzero(surf <= pe_min + 1e-9)
    pairs = np.column_stack([h[ii], h[jj]])
    gaps = np.abs(pairs[:, 1] - pairs[:, 0])
    ridge_ok = bool(np.all(np.abs(gaps - g.delta / 2.0) <= grid_step * (1 + 1e-9)))
    pmin = _power_minimizers(pairs, g.delta, pi0)
    pmin_eq = _power_minimizers(pairs, g.delta, 0.5)
    result = SearchResult(pmin[0], pe_min, h, surf, pairs, ridge_ok, pmin, pmin_eq)
    if refine:
        best = pmin_eq[0]
        gap0 = best.h1 - best.h0

        def pe_at(gap):
            h0 = -gap / 2.0
            return pe_oracle(g, SymbolMap(h0, h0 + gap, g.delta), pi0, MAP(pi0), n_grid=20_000)

        lo, hi = gap0 - grid_step, min(gap0 + grid_step, g.delta * (1 - 1e-9))
        res = minimize_scalar(pe_at, bracket=(lo, gap0, hi), method="golden",
                              options={"xtol": 1e-8})
        result.refined_gap = float(res.x)
        result.refined_pe = float(res.fun)
    return result
