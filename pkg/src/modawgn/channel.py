"""Forward simulation path: bits -> symbols -> AWGN -> mod-delta reduction."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# recorded in run metadata
RNG_SCHEME = "numpy Philox4x64 keyed by SeedSequence"
GAUSSIAN_METHOD = "numpy Generator.standard_normal (ziggurat)"


def mod_reduce(x, delta):
    """Reduce ``x`` into ``[-delta/2, delta/2)``.

    Values already inside the interval are returned unchanged, so the
    operation is exactly idempotent.
    """
    if not (delta > 0 and math.isfinite(delta)):
        raise ValueError(f"delta must be positive, got {delta!r}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("mod_reduce requires finite input")
    half = delta / 2.0
    r = x - delta * np.floor(x / delta + 0.5)
    r = np.where(r >= half, r - delta, r)
    r = np.where(r < -half, r + delta, r)
    inside = (x >= -half) & (x < half)
    out = np.where(inside, x, r)
    return out[()] if out.ndim == 0 else out


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


@dataclass(frozen=True)
class SymbolMap:
    """Antipodal-style binary constellation ``{h0, h1}`` inside ``[-delta/2, delta/2)``."""

    h0: float
    h1: float
    delta: float

    def __post_init__(self):
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise ValueError(f"delta must be positive, got {self.delta!r}")
        half = self.delta / 2.0
        for name in ("h0", "h1"):
            h = getattr(self, name)
            if not (-half <= h < half):
                raise ValueError(f"{name}={h!r} outside [-{half}, {half})")
        if self.h0 == self.h1:
            raise ValueError("h0 and h1 must differ")

    @classmethod
    def optimal(cls, delta: float) -> "SymbolMap":
        """The error-optimal, power-minimal pair ``(-delta/4, +delta/4)``."""
        return cls(-delta / 4.0, delta / 4.0, delta)


@dataclass(frozen=True)
class BitSource:
    pi0: float
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.pi0 <= 1.0:
            raise ValueError(f"pi0 must be in [0, 1], got {self.pi0!r}")


@dataclass(frozen=True)
class ChannelParams:
    delta: float
    sigma: float
    seed: int

    def __post_init__(self):
        if not (self.delta > 0 and self.sigma > 0):
            raise ValueError("delta and sigma must be positive")


def generate_bits(src: BitSource, n: int) -> np.ndarray:
    """``n`` i.i.d. bits with ``P(bit == 0) = pi0``, deterministic in the seed."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    u = make_rng(src.seed).random(n)
    return (u >= src.pi0).astype(np.uint8)


def map_bits(bits, smap: SymbolMap) -> np.ndarray:
    bits = np.asarray(bits)
    if bits.size == 0:
        raise ValueError("cannot map an empty bit sequence")
    return np.where(bits == 0, smap.h0, smap.h1).astype(float)


def transmit(symbols, ch: ChannelParams) -> np.ndarray:
    """Add ``N(0, sigma^2)`` noise and reduce mod delta."""
    x = np.asarray(symbols, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("symbols must be finite")
    w = ch.sigma * make_rng(ch.seed).standard_normal(x.shape)
    return mod_reduce(x + w, ch.delta)


def average_power(smap: SymbolMap, pi0: float) -> float:
    """``E[x^2] = pi0*h0^2 + (1 - pi0)*h1^2``."""
    if not 0.0 <= pi0 <= 1.0:
        raise ValueError(f"pi0 must be in [0, 1], got {pi0!r}")
    return pi0 * smap.h0 ** 2 + (1.0 - pi0) * smap.h1 ** 2
