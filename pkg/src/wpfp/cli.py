"""Batch front end: ``wpfp --config run.cfg [--set key=value ...]``.

Exit status is 0 when every check passes, 2 when a check fails (the failing
rows go to ``failures.csv``) and 1 for usage, configuration or parameter
errors.  Every output file starts with the resolved configuration as
``# key = value`` comment lines.
"""

import argparse
import csv
import math
import sys
import warnings
from pathlib import Path

from . import config, suites
from .errors import ConfigError, InvalidParameter, NonContraction, ResolutionWarning
from .evolve import EvolveConfig, l2_law, run, weighted_monitors
from .params import ParameterSet, require_admissible
from .phase_state import PhaseGrid, gaussian_state, indicator_state, write_snapshot

MODES = ("linear", "nonlinear", "verify-kernel", "verify-theta", "verify-dispersive",
         "verify-all")

DEFAULTS = {
    "mode": "linear",
    "alpha": "1", "beta": "1", "gamma": "0", "sigma": "1", "hbar": "1", "dim": "1",
    "Nx": "128", "Nv": "128", "Lx": "8", "Lv": "8",
    "dt": "0.01", "t_end": "1", "picard_tol": "1e-12", "picard_max": "25",
    "monitor_cadence": "1", "max_halvings": "8",
    "initial": "gaussian", "x0": "0", "v0": "0", "sx": "1", "sv": "1", "mass": "1",
    "box_x": "1", "box_v": "1",
    "snapshot_every": "0",
    "l2_slack": "1e-3", "ceiling": "10",
    "seed": "0", "cases": "0",
    "out": "wpfp_out",
}

PARAM_KEYS = ("alpha", "beta", "gamma", "sigma", "hbar", "dim")
ESTIMATE_HEADER = suites.ESTIMATE_FIELDS


def resolve(path, overrides, seed=None, out=None):
    """Defaults, then the file, then ``--set`` overrides, then explicit flags."""
    merged = dict(DEFAULTS)
    merged.update(config.read_file(path))
    for item in overrides:
        key, value = config.parse_override(item)
        merged[key] = value
    if seed is not None:
        merged["seed"] = str(seed)
    if out is not None:
        merged["out"] = out
    unknown = sorted(set(merged) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    if merged["mode"] not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {merged['mode']!r}")
    if merged["initial"] not in ("gaussian", "indicator"):
        raise ConfigError(f"initial must be gaussian or indicator, got {merged['initial']!r}")
    return merged


def header_lines(cfg):
    return [f"{key} = {cfg[key]}" for key in sorted(cfg)]


def _write_rows(path, cfg, columns, rows):
    with open(path, "w", newline="") as fh:
        for line in header_lines(cfg):
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)


def _params(cfg):
    return ParameterSet.from_mapping({k: cfg[k] for k in PARAM_KEYS})


def _initial(cfg):
    grid = PhaseGrid(1, config.to_int("Nx", cfg["Nx"]), config.to_int("Nv", cfg["Nv"]),
                     config.to_float("Lx", cfg["Lx"]), config.to_float("Lv", cfg["Lv"]))
    f = {k: config.to_float(k, cfg[k]) for k in ("x0", "v0", "sx", "sv", "mass", "box_x", "box_v")}
    if cfg["initial"] == "gaussian":
        return gaussian_state(grid, f["x0"], f["v0"], f["sx"], f["sv"], f["mass"])
    return indicator_state(grid, (f["x0"] - f["box_x"], f["x0"] + f["box_x"]),
                           (f["v0"] - f["box_v"], f["v0"] + f["box_v"]))


def _evolve_config(cfg, nonlinear):
    try:
        return EvolveConfig(
            dt=config.to_float("dt", cfg["dt"]), t_end=config.to_float("t_end", cfg["t_end"]),
            picard_tol=config.to_float("picard_tol", cfg["picard_tol"]),
            picard_max=config.to_int("picard_max", cfg["picard_max"]),
            monitor_cadence=config.to_int("monitor_cadence", cfg["monitor_cadence"]),
            nonlinear=nonlinear, max_halvings=config.to_int("max_halvings", cfg["max_halvings"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def run_evolution(cfg, out_dir, log):
    p = _params(cfg)
    if p.dim != 1:
        raise ConfigError("phase-space runs are one-dimensional; set dim = 1")
    try:
        w0 = _initial(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    ecfg = _evolve_config(cfg, cfg["mode"] == "nonlinear")
    every = config.to_int("snapshot_every", cfg["snapshot_every"])
    total = ecfg.steps

    def on_sample(state, step):
        if step == 0 or step == total or (every > 0 and step % every == 0):
            write_snapshot(state, out_dir / f"snapshot_{step:06d}.bin")

    estimates = []
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ResolutionWarning)
            _, series = run(w0, p, ecfg, on_sample)
    except NonContraction as exc:
        if exc.series is not None:
            exc.series.write_csv(out_dir / "diagnostics.csv", header_lines(cfg))
        estimates.append(suites.Estimate("evolve", "Picard convergence", 1.0, 0.0, 0.0, "le"))
        log(f"Picard iteration failed: {exc}")
        return estimates
    series.write_csv(out_dir / "diagnostics.csv", header_lines(cfg))
    slack = config.to_float("l2_slack", cfg["l2_slack"])
    estimates.append(suites.Estimate("evolve", "L2 law log-excess", l2_law(series, p), 0.0,
                                     math.log1p(slack), "le"))
    ceiling = config.to_float("ceiling", cfg["ceiling"])
    mon = weighted_monitors(series, p, ceiling=ceiling)
    for name, ratio in mon.ceiling_ratio.items():
        estimates.append(suites.Estimate("evolve", f"max {name} / initial", ratio, ceiling,
                                         0.0, "le"))
    return estimates


def print_table(rows, log):
    width = max((len(r.name) for r in rows), default=10)
    log(f"{'suite':<11} {'estimate':<{width}} {'measured':>14} {'target':>10} {'tol':>9}  result")
    for r in rows:
        log(f"{r.suite:<11} {r.name:<{width}} {r.measured:>14.6g} {r.target:>10.4g} "
            f"{r.tolerance:>9.3g}  {'pass' if r.passed else 'FAIL'}")


def build_parser():
    ap = argparse.ArgumentParser(prog="wpfp", description=__doc__.splitlines()[0])
    ap.add_argument("--config", required=True, help="flat key = value run configuration")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override a config entry (repeatable)")
    ap.add_argument("--out", help="output directory (overrides the config)")
    ap.add_argument("--seed", type=int, help="seed for randomized cases")
    ap.add_argument("--quiet", action="store_true", help="suppress the summary table")
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1

    def log(msg):
        if not args.quiet:
            print(msg)

    try:
        cfg = resolve(args.config, args.set, args.seed, args.out)
        require_admissible(_params(cfg))
        out_dir = Path(cfg["out"])
        out_dir.mkdir(parents=True, exist_ok=True)
        seed = config.to_int("seed", cfg["seed"])
        cases = config.to_int("cases", cfg["cases"]) or None
        if cfg["mode"] in ("linear", "nonlinear"):
            rows = run_evolution(cfg, out_dir, log)
        else:
            rows = suites.run_suites(cfg["mode"], seed, cases)
    except (ConfigError, InvalidParameter) as exc:
        print(f"wpfp: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"wpfp: error: {exc}", file=sys.stderr)
        return 1
    _write_rows(out_dir / "estimates.csv", cfg, ESTIMATE_HEADER, [r.row() for r in rows])
    failed = [r for r in rows if not r.passed]
    _write_rows(out_dir / "failures.csv", cfg, ESTIMATE_HEADER, [r.row() for r in failed])
    print_table(rows, log)
    if failed:
        print(f"wpfp: {len(failed)} check(s) failed; see {out_dir / 'failures.csv'}",
              file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
