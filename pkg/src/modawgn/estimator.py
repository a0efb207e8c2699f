"""Prior estimation from blind ML decisions, and estimate-then-MAP decoding."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import SymbolMap
from .decision import ML, EstimatedMAP, decide_sequence
from .wrapped_gauss import WrappedGaussian

ILL_CONDITIONED = 0.5 - 1e-6


@dataclass(frozen=True)
class PriorEstimate:
    pi0_hat: float
    raw: float
    n_used: int
    pe_ml_assumed: float
    degraded: bool = False


def estimate_prior(decisions, pe_ml: float) -> PriorEstimate:
    """Method-of-moments inversion of ``E[mean(decisions)] = pi0*Pe + (1-pi0)*(1-Pe)``.

    The raw estimate is clamped to ``[0, 1]``.
    """
    d = np.asarray(decisions)
    if d.size == 0:
        raise ValueError("need at least one decision")
    if not 0.0 <= pe_ml < ILL_CONDITIONED:
        raise ValueError(f"pe_ml={pe_ml!r} too close to 1/2; the estimate is ill-conditioned")
    mean = float(np.mean(d))
    raw = (mean - (1.0 - pe_ml)) / (2.0 * pe_ml - 1.0)
    return PriorEstimate(min(max(raw, 0.0), 1.0), raw, int(d.size), pe_ml)


def two_step_decode(g: WrappedGaussian, smap: SymbolMap, y_tilde, pe_ml: float,
                    iterations: int = 1):
    """ML pass, estimate the prior, then re-decide with MAP at the estimate.

    ``iterations > 1`` re-estimates from the previous MAP pass each time
    (still using ``pe_ml`` as the assumed flip rate). If ``pe_ml`` is
    ill-conditioned, the ML decisions are returned with ``pi0_hat = 0.5``
    and ``degraded=True``.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    y = np.asarray(y_tilde, dtype=float)
    bits = decide_sequence(ML(), g, smap, y)
    try:
        est = estimate_prior(bits, pe_ml)
    except ValueError:
        if y.size == 0:
            raise
        return bits, PriorEstimate(0.5, 0.5, int(y.size), pe_ml, degraded=True)
    for it in range(iterations):
        if it:
            est = estimate_prior(bits, pe_ml)
        bits = decide_sequence(EstimatedMAP(est.pi0_hat), g, smap, y)
    return bits, est
