"""Per-symbol MAP / ML / estimated-prior decoding and decision thresholds."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.optimize import bisect

from .channel import SymbolMap, mod_reduce
from .wrapped_gauss import WrappedGaussian, density_direct


def _check_prob(p, name):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {p!r}")


@dataclass(frozen=True)
class MAP:
    pi0: float

    def __post_init__(self):
        _check_prob(self.pi0, "pi0")

    def weights(self):
        return self.pi0, 1.0 - self.pi0


@dataclass(frozen=True)
class ML:
    def weights(self):
        return 0.5, 0.5


@dataclass(frozen=True)
class EstimatedMAP:
    pi0_hat: float

    def __post_init__(self):
        _check_prob(self.pi0_hat, "pi0_hat")

    def weights(self):
        return self.pi0_hat, 1.0 - self.pi0_hat


@dataclass(frozen=True)
class WeightedRule:
    """Decide 0 iff ``w0*f(y-h0) >= w1*f(y-h1)``; the general form of the rules above."""

    w0: float
    w1: float

    def __post_init__(self):
        if self.w0 < 0 or self.w1 < 0 or self.w0 + self.w1 <= 0:
            raise ValueError("weights must be nonnegative and not both zero")

    def weights(self):
        return self.w0, self.w1


DecisionRule = Union[MAP, ML, EstimatedMAP, WeightedRule]


def _check_fundamental(y, delta):
    y = np.asarray(y, dtype=float)
    if not np.all((y >= -delta / 2.0) & (y < delta / 2.0)):
        raise ValueError(f"received samples must lie in [-{delta / 2}, {delta / 2})")
    return y


def likelihood(g: WrappedGaussian, y_tilde, h):
    """``f_W^delta(y_tilde - h)``, the density of a received sample given symbol ``h``."""
    y = _check_fundamental(y_tilde, g.delta)
    return density_direct(g, y - h)


def decide_sequence(rule: DecisionRule, g: WrappedGaussian, smap: SymbolMap, y_tilde) -> np.ndarray:
    """Element-wise decisions as a ``uint8`` array. Ties decide 0."""
    y = _check_fundamental(y_tilde, g.delta)
    f0 = density_direct(g, y - smap.h0)
    f1 = density_direct(g, y - smap.h1)
    if isinstance(rule, ML):
        zero = f0 >= f1
    else:
        w0, w1 = rule.weights()
        zero = w0 * f0 >= w1 * f1
    return np.where(zero, 0, 1).astype(np.uint8)


def decide(rule: DecisionRule, g: WrappedGaussian, smap: SymbolMap, y_tilde: float) -> int:
    return int(decide_sequence(rule, g, smap, np.atleast_1d(y_tilde))[0])


@dataclass(frozen=True)
class DecisionThresholds:
    """Crossing points ``c1 <= c2`` and the closed arcs where the decision is 0.

    ``region_for_zero`` is a tuple of ``(lo, hi)`` intervals inside
    ``[-delta/2, delta/2]``; everything else decides 1.
    """

    c1: float
    c2: float
    region_for_zero: tuple
    delta: float
    half_width: float = math.nan

    def label(self, y):
        y = np.asarray(y, dtype=float)
        zero = np.zeros(y.shape, dtype=bool)
        for lo, hi in self.region_for_zero:
            zero |= (y >= lo) & (y <= hi)
        return np.where(zero, 0, 1).astype(np.uint8)

    def zero_length(self) -> float:
        return sum(hi - lo for lo, hi in self.region_for_zero)


@dataclass(frozen=True)
class DegenerateDecision:
    """Every received sample decodes to ``bit`` (prior overwhelms the likelihoods)."""

    bit: int
    delta: float

    @property
    def name(self) -> str:
        return "always-zero" if self.bit == 0 else "always-one"

    def label(self, y):
        return np.full(np.shape(y), self.bit, dtype=np.uint8)

    def zero_length(self) -> float:
        return self.delta if self.bit == 0 else 0.0


def _arc(start: float, length: float, delta: float):
    """Split the arc ``[start, start + length]`` into pieces inside the fundamental interval."""
    half = delta / 2.0
    s = float(mod_reduce(start, delta))
    end = s + length
    if end <= half:
        return ((s, end),)
    return ((s, half), (-half, end - delta))


def _sorted_pair(a, b, delta):
    c = sorted((float(mod_reduce(a, delta)), float(mod_reduce(b, delta))))
    return c[0], c[1]


def thresholds_uniform(smap: SymbolMap) -> DecisionThresholds:
    """Equal-prior crossing points: the midpoint and its antipode on the circle."""
    delta = smap.delta
    mid = (smap.h0 + smap.h1) / 2.0
    sgn = 1.0 if mid > 0 else -1.0
    c1, c2 = _sorted_pair(mid, mid + sgn * delta / 2.0, delta)
    # h0 is nearer the midpoint going one way round; that half circle decides 0
    if float(mod_reduce(mid - smap.h0, delta)) > 0:
        region = _arc(mid - delta / 2.0, delta / 2.0, delta)
    else:
        region = _arc(mid, delta / 2.0, delta)
    return DecisionThresholds(c1, c2, region, delta)


def _is_optimal_spacing(smap: SymbolMap) -> bool:
    gap = abs(smap.h1 - smap.h0)
    return math.isclose(gap, smap.delta / 2.0, rel_tol=1e-12, abs_tol=1e-12)


def tau(g: WrappedGaussian) -> float:
    """``f(delta/2) / f(0)``: how flat the wrapped density is."""
    return float(density_direct(g, g.delta / 2.0) / density_direct(g, 0.0))


def zero_half_width(g: WrappedGaussian, pi0: float, xtol: float = 1e-12) -> float:
    """Half-width ``l`` of the zero region around ``h0`` for the optimal-spacing map.

    Solves ``pi0 f(l) = (1 - pi0) f(l - delta/2)`` on ``[0, delta/2]``. Only
    valid for ``tau/(1+tau) <= pi0 <= 1/(1+tau)``.
    """
    half = g.delta / 2.0

    def gap(l):
        return pi0 * density_direct(g, l) - (1.0 - pi0) * density_direct(g, l - half)

    lo, hi = gap(0.0), gap(half)
    if lo < 0 or hi > 0:
        raise ValueError(f"pi0={pi0} outside the two-threshold regime (bracket {lo:.3g}, {hi:.3g})")
    if lo == 0:
        return 0.0
    if hi == 0:
        return half
    return bisect(gap, 0.0, half, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)


def thresholds_map(g: WrappedGaussian, smap: SymbolMap, pi0: float):
    """MAP decision thresholds for a map with ``|h1 - h0| = delta/2``.

    Returns a :class:`DegenerateDecision` when the prior alone decides.
    Regime boundaries fall to the two-threshold branch.
    """
    _check_prob(pi0, "pi0")
    if not math.isclose(smap.delta, g.delta):
        raise ValueError("symbol map and channel disagree on delta")
    if not _is_optimal_spacing(smap):
        raise ValueError("closed-form MAP thresholds need |h1 - h0| == delta/2")
    t = tau(g)
    if pi0 > 1.0 / (1.0 + t):
        return DegenerateDecision(0, g.delta)
    if pi0 < t / (1.0 + t):
        return DegenerateDecision(1, g.delta)
    # boundary values may sit a rounding error outside the bracket
    pi0_c = min(max(pi0, t / (1.0 + t)), 1.0 / (1.0 + t))
    try:
        l = zero_half_width(g, pi0_c)
    except ValueError:
        l = 0.0 if pi0_c < 0.5 else g.delta / 2.0
    c1, c2 = _sorted_pair(smap.h0 - l, smap.h0 + l, g.delta)
    region = _arc(smap.h0 - l, 2.0 * l, g.delta) if l > 0 else ((float(smap.h0), float(smap.h0)),)
    return DecisionThresholds(c1, c2, region, g.delta, half_width=l)
