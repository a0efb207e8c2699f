"""Command-line entry point.

    modawgn simulate --delta 5 --sigma 1 --pi0 0.05:0.5:0.05 --n-bits 1000 \
        --repeats 50 --rules map,ml,estimated --seed 1 --out runs/rule_comparison --emit csv,svg,analytic
    modawgn analytic --delta 5 --sigma 1 --pi0-grid 0:1:0.01
    modawgn search-optimal --delta 5 --sigma 1 --pi0 0.5 --grid-step 0.025
    modawgn self-check
    modawgn preset rule-comparison --out runs/

Any subcommand accepts ``--config FILE`` with flat ``key=value`` lines
(keys are flag names without dashes); flags given on the command line win.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .analysis import optimal_map_search, pe_map, pe_uniform
from .harness import (
    ExperimentConfig,
    analytic_curves,
    check_writable,
    emit_analytic_csv,
    output_paths,
    run_experiment,
)
from .wrapped_gauss import WrappedGaussian


def parse_grid(text: str) -> list[float]:
    """``"0.1,0.2"`` or an inclusive range ``"start:stop:step"``."""
    text = text.strip()
    if ":" in text:
        parts = [float(t) for t in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
            raise ValueError(f"bad range {text!r}; expected start:stop:step")
        start, stop, step = parts
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(n)]
    vals = [float(t) for t in text.split(",") if t.strip()]
    if not vals:
        raise ValueError("empty list")
    return vals


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def read_config(path) -> dict:
    """Flat ``key=value`` file; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip().lstrip("-").replace("-", "_")] = v.strip()
    return out


def _merge(args, defaults: dict) -> dict:
    merged = dict(defaults)
    if getattr(args, "config", None):
        merged.update(read_config(args.config))
    for k, v in vars(args).items():
        if v is not None and k not in ("config", "command", "func"):
            merged[k] = v
    return merged


def cmd_simulate(args) -> int:
    o = _merge(args, {"delta": "5", "sigma": "1", "pi0": "0.5", "n_bits": "1000", "repeats": "50",
                      "rules": "map,ml,estimated", "seed": "0", "emit": "csv", "workers": "1",
                      "iterations": "1"})
    if "out" not in o:
        raise ValueError("--out is required")
    cfg = ExperimentConfig(
        delta=float(o["delta"]), sigma=float(o["sigma"]), pi0_list=tuple(parse_grid(str(o["pi0"]))),
        n_bits=int(o["n_bits"]), repeats=int(o["repeats"]), rules=tuple(_csv_list(str(o["rules"]))),
        master_seed=int(o["seed"]), output_path=str(o["out"]), emit=tuple(_csv_list(str(o["emit"]))),
        workers=int(o["workers"]), iterations=int(o["iterations"]),
    )
    records, written = run_experiment(cfg)
    print(f"{len(records)} trials; wrote " + ", ".join(str(p) for p in written))
    return 0


def cmd_analytic(args) -> int:
    o = _merge(args, {"delta": "5", "sigma": "1", "pi0_grid": "0:1:0.05", "emit": "csv"})
    deltas = parse_grid(str(o["delta"]))
    sigma = float(o["sigma"])
    pi0s = parse_grid(str(o["pi0_grid"]))
    rows = [row for d in deltas for row in analytic_curves(d, sigma, pi0s)]
    if "out" in o:
        paths = output_paths(check_writable(str(o["out"])))
        written = [emit_analytic_csv(rows, paths["analytic"])]
        if "svg" in _csv_list(str(o["emit"])):
            from .plotting import plot_analytic

            written.append(plot_analytic(rows, paths["svg"]))
        print("wrote " + ", ".join(str(p) for p in written))
    else:
        print("pi0,delta_over_sigma,pe_map,pe_ml")
        for row in rows:
            print(f"{row['pi0']:.12g},{row['delta_over_sigma']:.12g},{row['pe_map']:.12g},{row['pe_ml']:.12g}")
    return 0


def cmd_search(args) -> int:
    o = _merge(args, {"delta": "5", "sigma": "1", "pi0": "0.5"})
    g = WrappedGaussian(float(o["delta"]), float(o["sigma"]))
    step = float(o["grid_step"]) if "grid_step" in o else g.delta / 200.0
    pi0 = float(o["pi0"])
    res = optimal_map_search(g, pi0, step)
    closed = pe_map(g, pi0).pe
    print(f"grid {len(res.h_grid)}x{len(res.h_grid)}, step {step:g}")
    print(f"min Pe on grid      {res.pe_min:.12g}  (closed form at +/-delta/4: {closed:.12g})")
    print(f"argmin pairs        {len(res.argmin)}; all on |h1-h0| = delta/2: {res.ridge_ok}")
    print(f"refined gap h1-h0   {res.refined_gap:.9g}  (delta/2 = {g.delta / 2:g}), Pe {res.refined_pe:.12g}")
    fmt = ", ".join
    print("least E[x^2] (prior-weighted): " + fmt(f"({m.h0:g}, {m.h1:g})" for m in res.power_minimal))
    print("least E[x^2] (equal weights):  " + fmt(f"({m.h0:g}, {m.h1:g})" for m in res.power_minimal_equal_weight))
    return 0 if res.ridge_ok else 1


def cmd_self_check(args) -> int:
    from .selfcheck import run

    failed = 0
    for name, ok, detail in run():
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        failed += not ok
    return 1 if failed else 0


PRESET_GRID = tuple(round(0.05 * i, 2) for i in range(1, 11))


def cmd_preset(args) -> int:
    """Shipped sweeps with sigma fixed at 1. The grids are chosen for readability."""
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seed = args.seed or 0
    workers = args.workers or 1
    if args.name == "error-curves":
        rows = [row for r in (1, 2, 3, 5, 8) for row in analytic_curves(float(r), 1.0, parse_grid("0:1:0.01"))]
        from .plotting import plot_analytic

        emit_analytic_csv(rows, out / "error_curves.csv")
        plot_analytic(rows, out / "error_curves.svg")
    elif args.name == "prior-estimates":
        from .harness import emit_csv, run_sweep
        from .plotting import plot_prior_estimates

        series = {}
        for n in (200, 1000):
            cfg = ExperimentConfig(5.0, 1.0, PRESET_GRID, n, 50, ("estimated",), seed,
                                   str(out / f"prior_estimates_N{n}.csv"), ("csv",), workers)
            series[f"N={n}"] = run_sweep(cfg)
            emit_csv(series[f"N={n}"], None, cfg.output_path)
        plot_prior_estimates(series, out / "prior_estimates.svg")
    elif args.name == "rule-comparison":
        cfg = ExperimentConfig(5.0, 1.0, PRESET_GRID, 1000, 50, ("map", "ml", "estimated"), seed,
                               str(out / "rule_comparison.csv"), ("csv", "svg", "analytic"), workers)
        run_experiment(cfg)
    print(f"preset {args.name} written to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="modawgn", description="Binary signaling over a mod-delta AWGN channel")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="seeded Monte Carlo sweep")
    s.add_argument("--config")
    s.add_argument("--delta")
    s.add_argument("--sigma")
    s.add_argument("--pi0", help="list a,b,c or range start:stop:step")
    s.add_argument("--n-bits", dest="n_bits")
    s.add_argument("--repeats")
    s.add_argument("--rules", help="subset of map,ml,estimated")
    s.add_argument("--seed")
    s.add_argument("--out")
    s.add_argument("--emit", help="subset of csv,svg,analytic")
    s.add_argument("--workers")
    s.add_argument("--iterations", help="estimate-then-MAP passes (default 1)")
    s.set_defaults(func=cmd_simulate)

    a = sub.add_parser("analytic", help="closed-form error probabilities")
    a.add_argument("--config")
    a.add_argument("--delta", help="one value or a list")
    a.add_argument("--sigma")
    a.add_argument("--pi0-grid", dest="pi0_grid")
    a.add_argument("--out")
    a.add_argument("--emit", help="csv and/or svg")
    a.set_defaults(func=cmd_analytic)

    o = sub.add_parser("search-optimal", help="grid search for the error-optimal constellation")
    o.add_argument("--config")
    o.add_argument("--delta")
    o.add_argument("--sigma")
    o.add_argument("--pi0")
    o.add_argument("--grid-step", dest="grid_step")
    o.set_defaults(func=cmd_search)

    c = sub.add_parser("self-check", help="run the invariant checks")
    c.set_defaults(func=cmd_self_check)

    r = sub.add_parser("preset", help="shipped experiment sweeps")
    r.add_argument("name", choices=("error-curves", "prior-estimates", "rule-comparison"))
    r.add_argument("--out", required=True)
    r.add_argument("--seed", type=int)
    r.add_argument("--workers", type=int)
    r.set_defaults(func=cmd_preset)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"modawgn {args.command}: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
