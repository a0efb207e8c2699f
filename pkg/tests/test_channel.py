import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from modawgn import (
    ML,
    BitSource,
    ChannelParams,
    SymbolMap,
    WrappedGaussian,
    average_power,
    decide_sequence,
    generate_bits,
    map_bits,
    mod_reduce,
    transmit,
)

from conftest import integrate_density


@pytest.mark.parametrize("x, delta, expected", [(0.7, 1.0, -0.3), (-0.5, 1.0, -0.5), (1.5, 1.0, -0.5)])
def test_mod_reduce_examples(x, delta, expected):
    assert mod_reduce(x, delta) == pytest.approx(expected, abs=1e-12)


def test_mod_reduce_left_boundary_fixed():
    assert mod_reduce(-0.5, 1.0) == -0.5
    assert mod_reduce(-2.5, 5.0) == -2.5


@pytest.mark.parametrize("bad", [float("nan"), float("inf")])
def test_mod_reduce_rejects_nonfinite(bad):
    with pytest.raises(ValueError):
        mod_reduce(bad, 1.0)


def test_mod_reduce_rejects_bad_delta():
    with pytest.raises(ValueError):
        mod_reduce(0.1, 0.0)


@settings(max_examples=500, deadline=None)
@given(x=st.floats(-1e6, 1e6), delta=st.floats(1e-3, 1e3))
def test_mod_reduce_range_and_idempotence(x, delta):
    r = mod_reduce(x, delta)
    assert -delta / 2 <= r < delta / 2
    assert mod_reduce(r, delta) == r
    k = (x - r) / delta
    assert abs(k - round(k)) <= 1e-9 * max(1.0, abs(k))


@settings(max_examples=300, deadline=None)
@given(x=st.floats(-100, 100), k=st.integers(-1000, 1000), delta=st.sampled_from([0.5, 1.0, 5.0]))
def test_mod_reduce_shift_invariance(x, k, delta):
    a, b = mod_reduce(x + k * delta, delta), mod_reduce(x, delta)
    # equal up to wrapping at the seam
    d = abs(a - b)
    assert min(d, delta - d) <= 1e-9


def test_symbol_map_validation():
    with pytest.raises(ValueError):
        SymbolMap(0.0, 2.5, 5.0)  # delta/2 is outside the half-open interval
    with pytest.raises(ValueError):
        SymbolMap(1.0, 1.0, 5.0)
    with pytest.raises(ValueError):
        SymbolMap(0.0, 1.0, -1.0)
    SymbolMap(-2.5, 2.4, 5.0)


def test_optimal_map():
    m = SymbolMap.optimal(5.0)
    assert (m.h0, m.h1) == (-1.25, 1.25)


def test_bit_source_validation():
    with pytest.raises(ValueError):
        BitSource(1.5, 0)


@pytest.mark.parametrize("pi0, expected", [(1.0, 0), (0.0, 1)])
def test_degenerate_priors(pi0, expected):
    bits = generate_bits(BitSource(pi0, 7), 1000)
    assert np.all(bits == expected)


def test_generate_bits_fraction():
    bits = generate_bits(BitSource(0.5, 123), 10**6)
    assert abs(np.mean(bits == 0) - 0.5) <= 0.002


def test_generate_bits_deterministic():
    a = generate_bits(BitSource(0.3, 99), 1000)
    b = generate_bits(BitSource(0.3, 99), 1000)
    c = generate_bits(BitSource(0.3, 100), 1000)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_generate_bits_rejects_empty():
    with pytest.raises(ValueError):
        generate_bits(BitSource(0.5, 0), 0)


def test_map_bits():
    m = SymbolMap(-1.25, 1.25, 5.0)
    assert map_bits([0, 1, 0], m).tolist() == [-1.25, 1.25, -1.25]
    assert np.all(map_bits(np.zeros(5, dtype=int), m) == -1.25)
    with pytest.raises(ValueError):
        map_bits([], m)


def test_transmit_noiseless():
    x = np.linspace(-2.5, 2.49, 50)
    y = transmit(x, ChannelParams(5.0, 1e-12, 3))
    assert np.max(np.abs(y - x)) <= 1e-9


def test_transmit_range_and_determinism():
    x = np.full(10_000, 2.4)
    ch = ChannelParams(5.0, 3.0, 11)
    y = transmit(x, ch)
    assert np.all((y >= -2.5) & (y < 2.5))
    assert np.array_equal(y, transmit(x, ch))


def test_transmit_rejects_nonfinite():
    with pytest.raises(ValueError):
        transmit([0.0, np.nan], ChannelParams(5.0, 1.0, 0))


def test_transmit_histogram_matches_wrapped_density():
    h0, n, bins = -1.25, 10**6, 50
    y = transmit(np.full(n, h0), ChannelParams(5.0, 1.0, 2024))
    offset = mod_reduce(y - h0, 5.0)
    edges = np.linspace(-2.5, 2.5, bins + 1)
    observed, _ = np.histogram(offset, edges)
    expected = np.array([integrate_density(a, b, 5.0, 1.0) for a, b in zip(edges[:-1], edges[1:])]) * n
    chi2 = np.sum((observed - expected) ** 2 / expected)
    p = stats.chi2.sf(chi2, bins - 1)
    assert p > 1e-3


def test_shift_by_delta_keeps_error_count():
    g = WrappedGaussian(5.0, 1.0)
    m = SymbolMap.optimal(5.0)
    bits = generate_bits(BitSource(0.4, 5), 10**4)
    ch = ChannelParams(5.0, 1.0, 6)
    base = transmit(map_bits(bits, m), ch)
    shifted = transmit(map_bits(bits, m) + 5.0, ch)
    shifted_map = SymbolMap(float(mod_reduce(m.h0 + 5.0, 5.0)), float(mod_reduce(m.h1 + 5.0, 5.0)), 5.0)
    e0 = np.count_nonzero(decide_sequence(ML(), g, m, base) != bits)
    e1 = np.count_nonzero(decide_sequence(ML(), g, shifted_map, shifted) != bits)
    assert e0 == e1
    assert e0 > 0


@pytest.mark.parametrize("h0, h1, pi0, expected", [(-1.25, 1.25, 0.5, 1.5625), (-1.0, 1.0, 0.3, 1.0), (0.0, 2.0, 0.25, 3.0)])
def test_average_power(h0, h1, pi0, expected):
    assert average_power(SymbolMap(h0, h1, 5.0), pi0) == pytest.approx(expected)


def test_optimal_power_is_delta_sq_over_16():
    assert average_power(SymbolMap.optimal(5.0), 0.5) == pytest.approx(25 / 16)
