"""Quick invariant sweep used by ``modawgn self-check``."""
from __future__ import annotations

import numpy as np

from .analysis import pe_map, pe_oracle, pe_uniform
from .channel import SymbolMap, mod_reduce
from .decision import MAP, likelihood, thresholds_uniform
from .estimator import estimate_prior
from .wrapped_gauss import (
    WrappedGaussian,
    band_probability,
    density_direct,
    density_excess,
    density_fourier,
)


def _sign_changes(v):
    s = np.sign(v)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def check_periodicity():
    g = WrappedGaussian(5.0, 1.0)
    x = np.linspace(-7, 7, 2001)
    err = max(np.max(np.abs(density_direct(g, x) - density_direct(g, x + k * g.delta))) for k in range(-3, 4))
    return err <= 1e-12, f"max deviation {err:.2e}"


def check_evenness():
    g = WrappedGaussian(5.0, 1.0)
    x = np.linspace(-7, 7, 2001)
    err = np.max(np.abs(density_direct(g, x) - density_direct(g, -x)))
    return err <= 1e-12, f"max deviation {err:.2e}"


def check_normalization():
    g = WrappedGaussian(5.0, 1.0)
    a = np.linspace(-6, 6, 101)
    err = np.max(np.abs(band_probability(g, a, a + g.delta) - 1.0))
    return err <= 1e-10, f"max deviation {err:.2e}"


def check_two_paths():
    worst = 0.0
    for r in (0.5, 1.0, 3.0, 5.0, 10.0):
        g = WrappedGaussian(r, 1.0)
        x = np.linspace(-r / 2, r / 2, 10_000, endpoint=False)
        worst = max(worst, np.max(np.abs(density_direct(g, x) - density_fourier(g, x))))
    return worst <= 1e-9, f"max |direct - fourier| {worst:.2e}"


def check_level_sets():
    rng = np.random.default_rng(1)
    worst = 0
    for r in (0.5, 1.0, 5.0):
        g = WrappedGaussian(r, 1.0)
        x = np.linspace(-r / 2, r / 2, 100_000, endpoint=False)
        # levels relative to 1/delta; the raw density is flat to rounding at small ratios
        f = density_excess(g, x)
        for z in rng.uniform(f.min(), f.max(), 100):
            worst = max(worst, _sign_changes(f - z))
    return worst <= 2, f"max sign changes {worst}"


def check_crossings():
    rng = np.random.default_rng(2)
    g = WrappedGaussian(5.0, 1.0)
    worst = 0.0
    for _ in range(200):
        h0, h1 = rng.uniform(-2.5, 2.5, 2)
        th = thresholds_uniform(SymbolMap(h0, h1, 5.0))
        for c in (th.c1, th.c2):
            worst = max(worst, abs(likelihood(g, c, h0) - likelihood(g, c, h1)))
    return worst <= 1e-10, f"max likelihood gap {worst:.2e}"


def check_map_formula():
    worst = 0.0
    for r in (1.0, 3.0, 5.0):
        g = WrappedGaussian(r, 1.0)
        smap = SymbolMap.optimal(r)
        for p in (0.05, 0.3, 0.5, 0.7, 0.95):
            worst = max(worst, abs(pe_map(g, p).pe - pe_oracle(g, smap, p, MAP(p), n_grid=20_000)))
    return worst <= 1e-7, f"max |closed form - oracle| {worst:.2e}"


def check_map_symmetry_and_dominance():
    g = WrappedGaussian(5.0, 1.0)
    ps = np.linspace(0.0, 1.0, 41)
    sym = max(abs(pe_map(g, p).pe - pe_map(g, 1 - p).pe) for p in ps)
    dom = max(pe_map(g, p).pe - pe_uniform(g) for p in ps)
    return sym <= 1e-10 and dom <= 1e-12, f"symmetry {sym:.2e}, dominance excess {dom:.2e}"


def check_mod_reduce():
    x = np.linspace(-100, 100, 10_001)
    r = mod_reduce(x, 3.0)
    ok = np.all((r >= -1.5) & (r < 1.5)) and np.array_equal(mod_reduce(r, 3.0), r)
    return bool(ok), "range and idempotence"


def check_estimator():
    pe = 0.21112
    p_b = 0.2 * pe + 0.8 * (1 - pe)
    est = estimate_prior(np.r_[np.ones(int(round(p_b * 1e5))), np.zeros(100_000 - int(round(p_b * 1e5)))], pe)
    return abs(est.pi0_hat - 0.2) <= 1e-4, f"round trip pi0_hat={est.pi0_hat:.5f}"


CHECKS = {
    "density periodicity": check_periodicity,
    "density evenness": check_evenness,
    "band normalization": check_normalization,
    "direct vs fourier": check_two_paths,
    "level-set cardinality": check_level_sets,
    "uniform-prior crossings": check_crossings,
    "MAP closed form vs oracle": check_map_formula,
    "MAP symmetry and dominance": check_map_symmetry_and_dominance,
    "mod reduction": check_mod_reduce,
    "prior estimator round trip": check_estimator,
}


def run():
    results = []
    for name, fn in CHECKS.items():
        ok, detail = fn()
        results.append((name, bool(ok), detail))
    return results
