"""Seeded Monte Carlo sweeps and CSV output.

Each trial draws its own stream from a 64-bit seed derived from
``(master_seed, pi0, rule, trial_index)``, so a trial's result does not depend
on which other trials run alongside it, or on how many worker processes are used.
"""
from __future__ import annotations

import csv
import json
import math
import os
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import pe_map, pe_ml
from .channel import (
    GAUSSIAN_METHOD,
    RNG_SCHEME,
    BitSource,
    ChannelParams,
    SymbolMap,
    generate_bits,
    map_bits,
    transmit,
)
from .decision import MAP, ML, decide_sequence
from .estimator import two_step_decode
from .wrapped_gauss import WrappedGaussian

RULES = ("map", "ml", "estimated")
EMITS = ("csv", "svg", "analytic")
CSV_HEADER = ("pi0", "rule", "trial", "ber", "pi0_hat", "seed")
ANALYTIC_HEADER = ("pi0", "delta_over_sigma", "pe_map", "pe_ml")
MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class ExperimentConfig:
    delta: float = 5.0
    sigma: float = 1.0
    pi0_list: tuple = (0.5,)
    n_bits: int = 1000
    repeats: int = 50
    rules: tuple = RULES
    master_seed: int = 0
    output_path: str | None = None
    emit: tuple = ("csv",)
    workers: int = 1
    iterations: int = 1

    def __post_init__(self):
        object.__setattr__(self, "pi0_list", tuple(float(p) for p in self.pi0_list))
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "emit", tuple(self.emit))
        if not (self.delta > 0 and self.sigma > 0):
            raise ValueError("delta and sigma must be positive")
        if self.n_bits < 1 or self.repeats < 1:
            raise ValueError("n_bits and repeats must be >= 1")
        if not self.pi0_list:
            raise ValueError("pi0_list must not be empty")
        for p in self.pi0_list:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"pi0 values must be in [0, 1], got {p}")
        bad = set(self.rules) - set(RULES)
        if bad or not self.rules:
            raise ValueError(f"rules must be a nonempty subset of {RULES}, got {self.rules}")
        bad = set(self.emit) - set(EMITS)
        if bad:
            raise ValueError(f"emit must be a subset of {EMITS}, got {self.emit}")
        if not 0 <= self.master_seed <= MASK64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        if self.workers < 1 or self.iterations < 1:
            raise ValueError("workers and iterations must be >= 1")

    @property
    def channel(self) -> WrappedGaussian:
        return WrappedGaussian(self.delta, self.sigma)


@dataclass(frozen=True)
class TrialRecord:
    pi0: float
    rule: str
    trial_index: int
    ber: float
    pi0_hat: float | None
    seed_used: int


def _stream_seed(*words: int) -> int:
    ss = np.random.SeedSequence([int(w) & MASK64 for w in words])
    return int(ss.generate_state(1, np.uint64)[0])


def _pi0_key(pi0: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(pi0)))[0]


def trial_seed(master_seed: int, pi0: float, rule: str, trial_index: int) -> int:
    """Stable 64-bit seed of one trial."""
    return _stream_seed(master_seed, _pi0_key(pi0), RULES.index(rule), trial_index)


def run_trial(cfg: ExperimentConfig, pi0: float, rule: str, trial_index: int) -> TrialRecord:
    """Simulate one block of ``cfg.n_bits`` bits through the channel and decode it with ``rule``."""
    if rule not in RULES:
        raise ValueError(f"unknown rule {rule!r}")
    seed = trial_seed(cfg.master_seed, pi0, rule, trial_index)
    g = cfg.channel
    smap = SymbolMap.optimal(cfg.delta)
    bits = generate_bits(BitSource(pi0, _stream_seed(seed, 0)), cfg.n_bits)
    y = transmit(map_bits(bits, smap), ChannelParams(cfg.delta, cfg.sigma, _stream_seed(seed, 1)))
    pi0_hat = None
    if rule == "map":
        decoded = decide_sequence(MAP(pi0), g, smap, y)
    elif rule == "ml":
        decoded = decide_sequence(ML(), g, smap, y)
    else:
        decoded, est = two_step_decode(g, smap, y, pe_ml(g, smap), iterations=cfg.iterations)
        pi0_hat = est.pi0_hat
    ber = float(np.count_nonzero(decoded != bits)) / cfg.n_bits
    return TrialRecord(float(pi0), rule, int(trial_index), ber, pi0_hat, seed)


def _run_job(args):
    return run_trial(*args)


def _sort_key(r: TrialRecord):
    return (r.pi0, RULES.index(r.rule), r.trial_index)


def check_writable(path) -> Path:
    """Fail fast if ``path`` cannot be written."""
    p = Path(path)
    if p.is_dir():
        raise OSError(f"output path {p} is a directory")
    parent = p.parent if str(p.parent) else Path(".")
    if not parent.is_dir():
        raise OSError(f"output directory {parent} does not exist")
    if not os.access(parent, os.W_OK) or (p.exists() and not os.access(p, os.W_OK)):
        raise OSError(f"output path {p} is not writable")
    return p


def run_sweep(cfg: ExperimentConfig, workers: int | None = None) -> list[TrialRecord]:
    """Every ``(pi0, rule, trial)`` combination, sorted by ``(pi0, rule, trial)``."""
    if cfg.output_path is not None:
        check_writable(cfg.output_path)
    jobs = [(cfg, p, r, t) for p in cfg.pi0_list for r in cfg.rules for t in range(cfg.repeats)]
    workers = cfg.workers if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, len(jobs) // (4 * workers))
            records = list(pool.map(_run_job, jobs, chunksize=chunk))
    else:
        records = [_run_job(j) for j in jobs]
    return sorted(records, key=_sort_key)


def analytic_curves(delta: float, sigma: float, pi0s) -> list[dict]:
    """Closed-form MAP and ML error probabilities of the optimal map over ``pi0s``."""
    g = WrappedGaussian(delta, sigma)
    ml = pe_ml(g, SymbolMap.optimal(delta))
    return [
        {"pi0": float(p), "delta_over_sigma": g.ratio, "pe_map": pe_map(g, float(p)).pe, "pe_ml": ml}
        for p in pi0s
    ]


@dataclass
class CellSummary:
    pi0: float
    rule: str
    n_trials: int
    mean_ber: float
    std_ber: float
    mean_pi0_hat: float = math.nan
    std_pi0_hat: float = math.nan
    bers: list = field(default_factory=list, repr=False)


def summarize(records) -> dict:
    """Per ``(pi0, rule)`` mean and standard deviation of BER and of the prior estimate."""
    cells: dict = {}
    for r in records:
        cells.setdefault((r.pi0, r.rule), []).append(r)
    out = {}
    for key in sorted(cells, key=lambda k: (k[0], RULES.index(k[1]))):
        rs = cells[key]
        bers = np.array([r.ber for r in rs])
        s = CellSummary(key[0], key[1], len(rs), float(bers.mean()),
                        float(bers.std(ddof=1)) if len(rs) > 1 else 0.0, bers=list(bers))
        hats = np.array([r.pi0_hat for r in rs if r.pi0_hat is not None])
        if hats.size:
            s.mean_pi0_hat = float(hats.mean())
            s.std_pi0_hat = float(hats.std(ddof=1)) if hats.size > 1 else 0.0
        out[key] = s
    return out


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.12g}"


def output_paths(path) -> dict:
    p = Path(path)
    stem = p.with_suffix("") if p.suffix.lower() in (".csv", ".svg") else p
    return {
        "csv": stem.with_name(stem.name + ".csv"),
        "analytic": stem.with_name(stem.name + "_analytic.csv"),
        "svg": stem.with_name(stem.name + ".svg"),
        "meta": stem.with_name(stem.name + "_meta.json"),
    }


def _write_rows(path: Path, header, rows):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def emit_csv(records, analytic, path) -> list[Path]:
    """Write trial records (and the analytic companion file, if given)."""
    if not records:
        raise ValueError("no records to write")
    paths = output_paths(path)
    rows = [(_fmt(r.pi0), r.rule, r.trial_index, _fmt(r.ber), _fmt(r.pi0_hat), r.seed_used)
            for r in records]
    written = [_write_rows(paths["csv"], CSV_HEADER, rows)]
    if analytic:
        written.append(emit_analytic_csv(analytic, paths["analytic"]))
    return written


def emit_analytic_csv(analytic, path) -> Path:
    rows = [tuple(_fmt(row[k]) for k in ANALYTIC_HEADER) for row in analytic]
    return _write_rows(Path(path), ANALYTIC_HEADER, rows)


def emit_metadata(cfg: ExperimentConfig, path) -> Path:
    meta = {
        "config": asdict(cfg),
        "rng": RNG_SCHEME,
        "gaussian_sampler": GAUSSIAN_METHOD,
        "seed_derivation": "SeedSequence([master_seed, float64 bits of pi0, rule index, trial])",
        "constellation": "(-delta/4, +delta/4)",
        "version": __version__,
    }
    path = Path(path)
    try:
        path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def run_experiment(cfg: ExperimentConfig) -> tuple[list[TrialRecord], list[Path]]:
    """Sweep and write every requested artifact next to ``cfg.output_path``."""
    if cfg.output_path is None:
        raise ValueError("output_path is required")
    records = run_sweep(cfg)
    paths = output_paths(cfg.output_path)
    analytic = analytic_curves(cfg.delta, cfg.sigma, cfg.pi0_list) if "analytic" in cfg.emit else None
    written = []
    if "csv" in cfg.emit:
        written += emit_csv(records, None, paths["csv"])
    if analytic:
        written.append(emit_analytic_csv(analytic, paths["analytic"]))
    if "svg" in cfg.emit:
        from .plotting import emit_svg

        curves = analytic or analytic_curves(cfg.delta, cfg.sigma, cfg.pi0_list)
        written.append(emit_svg(records, curves, paths["svg"]))
    written.append(emit_metadata(cfg, paths["meta"]))
    return records, written
