"""Wrapped (mod-delta) zero-mean Gaussian density and band probabilities.

The wrapped density is ``f(x) = sum_k phi_sigma(x + k*delta)``. It is evaluated
either by the direct image sum or by its Fourier (theta) series, and the two
are kept in agreement. Interval probabilities are computed as convergent
pairwise sums of normal tail differences, never as a difference of two
separately truncated (divergent) tail sums.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr, ndtri

SQRT_2PI = math.sqrt(2.0 * math.pi)
Q_SATURATION = 38.0


def q_tail(x):
    """Standard normal upper tail ``P(Z > x)``.

    Accepts scalars or arrays. Beyond ``|x| > 38`` the value is saturated to
    0 or 1, which is below double resolution anyway.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("q_tail requires finite input")
    q = ndtr(-x)
    q = np.where(x > Q_SATURATION, 0.0, q)
    q = np.where(x < -Q_SATURATION, 1.0, q)
    return q[()] if q.ndim == 0 else q


def _tail_diff(u, v):
    """``Q(u) - Q(v)`` for ``u <= v`` without catastrophic cancellation."""
    # both arguments negative: use lower tails, Q(u)-Q(v) = Q(-v)-Q(-u)
    upper = ndtr(-u) - ndtr(-v)
    lower = ndtr(v) - ndtr(u)
    return np.where(v <= 0.0, lower, np.where(u >= 0.0, upper, 1.0 - ndtr(u) - ndtr(-v)))


def _direct_order(delta: float, sigma: float, eps: float) -> int:
    # for |x| <= delta/2 every omitted image sits at distance >= (K + 1/2) delta
    k = 0
    while True:
        d = (k + 0.5) * delta
        bound = 2.0 * (math.exp(-0.5 * (d / sigma) ** 2) / (sigma * SQRT_2PI)
                       + float(ndtr(-d / sigma)) / delta)
        if bound < eps:
            return k
        k += 1


def _fourier_order(delta: float, sigma: float, eps: float) -> int:
    # smallest k with (2/delta) e^{-a (k+1)^2} / (1 - e^{-a}) < eps, solved directly
    a = 2.0 * (math.pi * sigma / delta) ** 2
    ratio = -math.expm1(-a)
    log_target = math.log(2.0 / (delta * ratio * eps))
    if log_target <= a:
        return 0
    k = max(0, math.ceil(math.sqrt(log_target / a)) - 2)
    while 2.0 / delta * math.exp(-a * (k + 1) ** 2) / ratio >= eps:
        k += 1
    return k


_MAX_FOURIER_TERMS = 10**6


def _check_fourier(g) -> None:
    if g.k_fourier > _MAX_FOURIER_TERMS:
        raise ValueError(
            f"sigma/delta = {g.sigma / g.delta:.3g} needs {g.k_fourier} Fourier terms; "
            "use density_direct")


@dataclass(frozen=True)
class WrappedGaussian:
    """Gaussian noise of std ``sigma`` observed modulo ``delta``.

    ``tail_eps`` is the absolute truncation tolerance for every infinite sum;
    the truncation orders are derived from it with Gaussian tail bounds.
    """

    delta: float
    sigma: float
    tail_eps: float = 1e-13
    k_direct: int = field(init=False, repr=False, compare=False)
    k_fourier: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("delta", "sigma", "tail_eps"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
        if self.tail_eps > 1e-10:
            raise ValueError(f"tail_eps must be <= 1e-10, got {self.tail_eps}")
        object.__setattr__(self, "k_direct", _direct_order(self.delta, self.sigma, self.tail_eps))
        object.__setattr__(self, "k_fourier", _fourier_order(self.delta, self.sigma, self.tail_eps))

    @property
    def ratio(self) -> float:
        """Delta over sigma, the only parameter error rates depend on."""
        return self.delta / self.sigma

    def density(self, x):
        """Wrapped density using whichever path is cheaper for this ``sigma/delta``."""
        if self.sigma / self.delta >= 0.5:
            return density_fourier(self, x)
        return density_direct(self, x)


def _reduce_abs(x, delta):
    # |x mod delta| in [0, delta/2]; makes the image sum exactly even
    x = np.asarray(x, dtype=float)
    r = x - delta * np.floor(x / delta + 0.5)
    return np.minimum(np.abs(r), delta / 2.0)


def density_direct(g: WrappedGaussian, x):
    """Wrapped density by summing ``2K+1`` Gaussian images.

    ``x`` may be any real (scalar or array); it is reduced into the
    fundamental interval first so ``K`` only has to cover that interval.
    """
    r = _reduce_abs(x, g.delta)
    s = g.sigma
    total = np.exp(-0.5 * (r / s) ** 2)
    for k in range(1, g.k_direct + 1):
        total = total + np.exp(-0.5 * ((r + k * g.delta) / s) ** 2)
        total = total + np.exp(-0.5 * ((r - k * g.delta) / s) ** 2)
    out = total / (s * SQRT_2PI)
    return out[()] if out.ndim == 0 else out


def density_fourier(g: WrappedGaussian, x):
    """Wrapped density from its Fourier series (Poisson summation).

    ``(1/delta) * (1 + 2 * sum_k exp(-2 pi^2 sigma^2 k^2 / delta^2) cos(2 pi k x / delta))``
    """
    _check_fourier(g)
    x = np.asarray(x, dtype=float)
    a = 2.0 * (math.pi * g.sigma / g.delta) ** 2
    total = np.ones_like(x)
    for k in range(1, g.k_fourier + 1):
        total = total + 2.0 * math.exp(-a * k * k) * np.cos(2.0 * math.pi * k * x / g.delta)
    out = total / g.delta
    return out[()] if out.ndim == 0 else out


def band_probability(g: WrappedGaussian, a, b):
    """Probability that the wrapped noise lands in ``[a, b)``.

    Computed as ``sum_k [Q((a + k delta)/sigma) - Q((b + k delta)/sigma)]``
    with each pair differenced before summation. Requires ``a <= b`` and
    ``b - a <= delta``; both may be arrays.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("band limits must be finite")
    if np.any(a > b):
        raise ValueError("band requires a <= b")
    width = b - a
    if np.any(width > g.delta * (1.0 + 1e-12)):
        raise ValueError(f"band wider than one period (delta={g.delta})")
    width = np.minimum(width, g.delta)
    a, b = np.broadcast_arrays(a, b)
    # shift so a lies in the fundamental interval; the sum over k is invariant
    a0 = a - g.delta * np.floor(a / g.delta + 0.5)
    b0 = a0 + width
    # every omitted pair is bounded by a tail beyond t*sigma
    t = -float(ndtri(g.tail_eps / (8.0 * (1.0 + g.sigma / g.delta))))
    kmax = int(math.ceil((t * g.sigma + g.delta) / g.delta)) + 1
    ks = np.arange(-kmax, kmax + 1, dtype=float)
    shape = (1,) * a0.ndim + (-1,)
    u = (a0[..., None] + ks.reshape(shape) * g.delta) / g.sigma
    v = (b0[..., None] + ks.reshape(shape) * g.delta) / g.sigma
    out = np.clip(np.sum(_tail_diff(u, v), axis=-1), 0.0, 1.0)
    return out[()] if out.ndim == 0 else out


def density_excess(g: WrappedGaussian, x):
    """``f(x) - 1/delta`` from the Fourier series, without cancellation.

    When ``delta/sigma`` is small the density is flat to far below double
    resolution; its shape (level sets, monotonicity) is only visible in
    this excess. Terms are kept while they exceed ``1e-17`` of the first one.
    """
    _check_fourier(g)
    x = np.asarray(x, dtype=float)
    a = 2.0 * (math.pi * g.sigma / g.delta) ** 2
    total = np.zeros_like(x)
    k = 1
    while k == 1 or a * (k * k - 1) < 40.0:
        total = total + math.exp(-a * k * k) * np.cos(2.0 * math.pi * k * x / g.delta)
        k += 1
    out = 2.0 * total / g.delta
    return out[()] if out.ndim == 0 else out
