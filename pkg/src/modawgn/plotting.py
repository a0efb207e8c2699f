"""SVG figures: error rate vs prior, prior estimates, analytic MAP curves."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .harness import RULES, summarize  # noqa: E402

plt.rcParams["svg.hashsalt"] = "modawgn"
_META = {"Date": None, "Creator": None}
_COLORS = {"map": "tab:red", "ml": "tab:blue", "estimated": "tab:green"}
_LABELS = {"map": "MAP (known prior)", "ml": "ML", "estimated": "MAP (estimated prior)"}


def _save(fig, path):
    path = Path(path)
    try:
        fig.savefig(path, format="svg", metadata=_META)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    finally:
        plt.close(fig)
    return path


def _band(ax, x, mean, std, color, label):
    x, mean, std = map(np.asarray, (x, mean, std))
    ax.plot(x, mean, "o-", color=color, label=label, ms=3)
    ax.fill_between(x, mean - std, mean + std, color=color, alpha=0.2, lw=0)


def emit_svg(records, analytic, path):
    """Mean +/- std error rate per rule vs pi0 with analytic overlays.

    A second panel with the prior estimates is added when the estimated
    rule is present.
    """
    if not records:
        raise ValueError("no records to plot")
    cells = summarize(records)
    rules = [r for r in RULES if any(k[1] == r for k in cells)]
    has_hat = "estimated" in rules
    fig, axes = plt.subplots(1, 2 if has_hat else 1, figsize=(10 if has_hat else 5.5, 4), squeeze=False)
    ax = axes[0, 0]
    for rule in rules:
        cs = [c for k, c in cells.items() if k[1] == rule]
        _band(ax, [c.pi0 for c in cs], [c.mean_ber for c in cs], [c.std_ber for c in cs],
              _COLORS[rule], _LABELS[rule])
    if analytic:
        p = [row["pi0"] for row in analytic]
        ax.plot(p, [row["pe_map"] for row in analytic], "k--", lw=1, label="MAP analytic")
        ax.plot(p, [row["pe_ml"] for row in analytic], "k:", lw=1, label="ML analytic")
    ax.set_xlabel(r"$\pi_0$")
    ax.set_ylabel("error rate")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    if has_hat:
        ax = axes[0, 1]
        cs = [c for k, c in cells.items() if k[1] == "estimated"]
        _band(ax, [c.pi0 for c in cs], [c.mean_pi0_hat for c in cs], [c.std_pi0_hat for c in cs],
              _COLORS["estimated"], r"$\hat\pi_0$")
        x = [c.pi0 for c in cs]
        ax.plot(x, x, "k--", lw=1, label=r"$\pi_0$")
        ax.set_xlabel(r"$\pi_0$")
        ax.set_ylabel(r"estimated $\hat\pi_0$")
        ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
    fig.tight_layout()
    return _save(fig, path)


def plot_prior_estimates(series: dict, path):
    """``series`` maps a label (e.g. ``"N=200"``) to the records of one sweep."""
    if not series or not any(series.values()):
        raise ValueError("no records to plot")
    fig, ax = plt.subplots(figsize=(5.5, 4))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for i, (label, records) in enumerate(series.items()):
        cs = [c for k, c in summarize(records).items() if k[1] == "estimated"]
        _band(ax, [c.pi0 for c in cs], [c.mean_pi0_hat for c in cs], [c.std_pi0_hat for c in cs],
              colors[i % len(colors)], label)
    lim = ax.get_xlim()
    ax.plot(lim, lim, "k--", lw=1, label=r"$\pi_0$")
    ax.set_xlabel(r"$\pi_0$")
    ax.set_ylabel(r"$\hat\pi_0$")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return _save(fig, path)


def plot_analytic(analytic, path):
    """MAP error probability vs pi0, one curve per delta/sigma."""
    if not analytic:
        raise ValueError("no analytic rows to plot")
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for ratio in sorted({row["delta_over_sigma"] for row in analytic}):
        rows = [row for row in analytic if row["delta_over_sigma"] == ratio]
        ax.plot([r["pi0"] for r in rows], [r["pe_map"] for r in rows], label=rf"$\Delta/\sigma={ratio:g}$")
    ax.set_xlabel(r"$\pi_0$")
    ax.set_ylabel(r"$P_e$ (MAP)")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return _save(fig, path)
