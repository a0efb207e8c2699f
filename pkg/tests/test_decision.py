import math

import numpy as np
import pytest
from scipy.optimize import brentq

from modawgn import (
    MAP,
    ML,
    DegenerateDecision,
    EstimatedMAP,
    SymbolMap,
    WeightedRule,
    WrappedGaussian,
    decide,
    decide_sequence,
    likelihood,
    mod_reduce,
    tau,
    thresholds_map,
    thresholds_uniform,
)

from conftest import direct_sum

L_07 = 1.5930491791370603923  # mpmath root of 0.7 f(l) = 0.3 f(l - 2.5)
TAU5 = 0.087873212302064489527


def test_rule_validation():
    with pytest.raises(ValueError):
        MAP(1.2)
    with pytest.raises(ValueError):
        EstimatedMAP(-0.1)
    with pytest.raises(ValueError):
        WeightedRule(0.0, 0.0)


def test_likelihood_mode(g5):
    y = np.linspace(-2.5, 2.49, 500)
    assert likelihood(g5, 0.3, 0.3) == pytest.approx(direct_sum(0.0, 5.0, 1.0), abs=1e-15)
    assert np.all(likelihood(g5, y, 0.3) <= likelihood(g5, 0.3, 0.3))


def test_likelihood_value(g5):
    # the wrapped density at offset 1.25, images included
    assert likelihood(g5, 0.0, -1.25) == pytest.approx(direct_sum(1.25, 5.0, 1.0), abs=1e-15)


@pytest.mark.parametrize("y, h", [(0.0, -1.25), (2.4, -2.0), (-2.5, 1.0), (1.1, 1.2)])
def test_likelihood_even_about_symbol(g5, y, h):
    mirrored = mod_reduce(2 * h - y, 5.0)
    assert abs(likelihood(g5, y, h) - likelihood(g5, mirrored, h)) <= 1e-12


def test_likelihood_rejects_unreduced(g5):
    with pytest.raises(ValueError):
        likelihood(g5, 2.5, 0.0)


def test_ml_example(g5, opt5):
    assert decide(ML(), g5, opt5, -1.0) == 0


def test_map_strong_prior_example(g5, opt5):
    y = 1.25
    w0 = 0.99 * direct_sum(y + 1.25, 5.0, 1.0)
    w1 = 0.01 * direct_sum(y - 1.25, 5.0, 1.0)
    assert w0 >= w1
    assert decide(MAP(0.99), g5, opt5, y) == 0


@pytest.mark.parametrize("smap", [SymbolMap(-1.25, 1.25, 5.0), SymbolMap(-1.0, 1.0, 5.0), SymbolMap(0.5, -2.0, 5.0)])
def test_map_half_equals_ml(g5, smap):
    y = np.linspace(-2.5, 2.5, 10_000, endpoint=False)
    assert np.array_equal(decide_sequence(MAP(0.5), g5, smap, y), decide_sequence(ML(), g5, smap, y))


def test_tie_decides_zero(g5, opt5):
    # the optimal map is symmetric about 0, so y=0 is an exact tie
    assert likelihood(g5, 0.0, opt5.h0) == likelihood(g5, 0.0, opt5.h1)
    assert decide(ML(), g5, opt5, 0.0) == 0
    assert decide(MAP(0.5), g5, opt5, 0.0) == 0
    assert decide(ML(), g5, opt5, -2.5) == 0


def test_decide_sequence_noiseless(g5, opt5):
    assert np.all(decide_sequence(ML(), g5, opt5, np.full(100, opt5.h0)) == 0)
    assert np.all(decide_sequence(MAP(0.2), g5, opt5, np.full(100, opt5.h1)) == 1)


def test_decide_sequence_preserves_length(g5, opt5):
    y = np.linspace(-2.5, 2.4, 37)
    assert decide_sequence(EstimatedMAP(0.3), g5, opt5, y).shape == (37,)


def test_decide_rejects_unreduced(g5, opt5):
    with pytest.raises(ValueError):
        decide_sequence(ML(), g5, opt5, [0.0, 3.0])


@pytest.mark.parametrize("h0, h1, expected", [
    (-1.25, 1.25, (-2.5, 0.0)),
    (-1.0, 1.0, (-2.5, 0.0)),
    (0.5, 1.5, (-1.5, 1.0)),
])
def test_thresholds_uniform_examples(h0, h1, expected):
    th = thresholds_uniform(SymbolMap(h0, h1, 5.0))
    assert (th.c1, th.c2) == pytest.approx(expected, abs=1e-12)


def test_thresholds_uniform_regions_match_decisions(g5):
    rng = np.random.default_rng(4)
    y = np.linspace(-2.5, 2.5, 4001, endpoint=False)
    for _ in range(50):
        h0, h1 = rng.uniform(-2.5, 2.5, 2)
        smap = SymbolMap(h0, h1, 5.0)
        th = thresholds_uniform(smap)
        away = np.min(np.abs(y[:, None] - np.array([th.c1, th.c2, -2.5, 2.5])[None, :]), axis=1) > 1e-9
        assert np.array_equal(th.label(y)[away], decide_sequence(ML(), g5, smap, y)[away])
        assert th.zero_length() == pytest.approx(2.5)


def test_tau(g5):
    assert tau(g5) == pytest.approx(direct_sum(2.5, 5, 1) / direct_sum(0.0, 5, 1), rel=1e-14)
    assert tau(g5) == pytest.approx(TAU5, rel=1e-13)
    assert 1 / (1 + tau(g5)) == pytest.approx(0.9192, abs=1e-4)


def test_thresholds_map_uniform_prior(g5, opt5):
    th = thresholds_map(g5, opt5, 0.5)
    assert th.half_width == pytest.approx(1.25, abs=1e-12)
    assert (th.c1, th.c2) == pytest.approx((-2.5, 0.0), abs=1e-12)


def test_thresholds_map_bisection_against_oracle(g5, opt5):
    def gap(l):
        return 0.7 * direct_sum(l, 5, 1) - 0.3 * direct_sum(l - 2.5, 5, 1)

    ref = brentq(gap, 0.0, 2.5, xtol=1e-15)
    th = thresholds_map(g5, opt5, 0.7)
    assert th.half_width == pytest.approx(ref, abs=1e-11)
    assert th.half_width == pytest.approx(L_07, abs=1e-11)
    assert th.half_width == pytest.approx(1.594, abs=2e-3)
    assert abs(gap(th.half_width)) < 1e-12


def test_thresholds_map_degenerate(g5, opt5):
    th = thresholds_map(g5, opt5, 0.95)
    assert isinstance(th, DegenerateDecision) and th.bit == 0 and th.name == "always-zero"
    th = thresholds_map(g5, opt5, 0.05)
    assert isinstance(th, DegenerateDecision) and th.bit == 1


def test_thresholds_map_boundary_is_nondegenerate(g5, opt5):
    t = tau(g5)
    upper = thresholds_map(g5, opt5, 1 / (1 + t))
    lower = thresholds_map(g5, opt5, t / (1 + t))
    assert not isinstance(upper, DegenerateDecision)
    assert not isinstance(lower, DegenerateDecision)
    assert upper.half_width == pytest.approx(2.5, abs=1e-9)
    assert lower.half_width == pytest.approx(0.0, abs=1e-9)


def test_thresholds_map_rejects_other_spacing(g5):
    with pytest.raises(ValueError):
        thresholds_map(g5, SymbolMap(-1.0, 1.0, 5.0), 0.3)


def test_thresholds_map_mirrored_map(g5):
    th = thresholds_map(g5, SymbolMap(1.25, -1.25, 5.0), 0.7)
    y = np.linspace(-2.5, 2.5, 2001, endpoint=False)
    away = np.min(np.abs(y[:, None] - np.array([th.c1, th.c2])[None, :]), axis=1) > 1e-9
    assert np.array_equal(th.label(y)[away], decide_sequence(MAP(0.7), g5, SymbolMap(1.25, -1.25, 5.0), y)[away])


@pytest.mark.parametrize("pi0", [0.05, 0.1, 0.2, 0.35, 0.5, 0.65, 0.7, 0.85, 0.9, 0.95])
def test_region_likelihood_agreement(g5, opt5, pi0):
    th = thresholds_map(g5, opt5, pi0)
    y = np.linspace(-2.5, 2.5, 10_000, endpoint=False)
    cuts = [] if isinstance(th, DegenerateDecision) else [th.c1, th.c2]
    mask = np.ones_like(y, dtype=bool)
    for c in cuts:
        mask &= np.abs(y - c) > 1e-9
    assert np.array_equal(th.label(y)[mask], decide_sequence(MAP(pi0), g5, opt5, y)[mask])


def test_random_inputs_agree_with_regions(g5, opt5):
    y = mod_reduce(np.random.default_rng(9).normal(0, 3, 10_000), 5.0)
    for pi0 in (0.3, 0.8):
        th = thresholds_map(g5, opt5, pi0)
        assert np.array_equal(th.label(y), decide_sequence(MAP(pi0), g5, opt5, y))


def test_zero_region_grows_with_prior(g5, opt5):
    lengths = [thresholds_map(g5, opt5, p).zero_length() for p in np.linspace(0, 1, 201)]
    assert np.all(np.diff(lengths) >= -1e-12)
    assert lengths[0] == 0.0 and lengths[-1] == 5.0


@pytest.mark.parametrize("ratio", [1.0, 3.0, 8.0])
def test_crossings_equalize_likelihoods(ratio):
    g = WrappedGaussian(ratio, 1.0)
    rng = np.random.default_rng(int(ratio))
    for _ in range(100):
        h0, h1 = rng.uniform(-ratio / 2, ratio / 2, 2)
        th = thresholds_uniform(SymbolMap(h0, h1, ratio))
        for c in (th.c1, th.c2):
            assert abs(likelihood(g, c, h0) - likelihood(g, c, h1)) <= 1e-10


def test_thresholds_reduced_and_sorted():
    th = thresholds_uniform(SymbolMap(2.0, 2.4, 5.0))
    assert -2.5 <= th.c1 <= th.c2 < 2.5
    assert math.isclose(th.c2 - th.c1, 2.5)
