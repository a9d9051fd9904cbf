"""``analyze`` command-line front end.

Exit codes: 0 success, 2 configuration error, 3 solver failure, 4 validation
mismatch beyond tolerance under ``--strict``.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import sys

from .config import ExperimentConfig, load_config, strategy_names
from .exceptions import DimensionTooLarge, InvalidConfig, InvalidParams, ReducibleChain, SingularSystem
from .generator import build_full_generator, build_subsystem_generator
from .measures import analyze
from .simulator import MEASURES, SimConfig, run_simulation, validate_against_analysis
from .tables import (
    HEADER_NOTES, N_VALUES, panel_params, reproduce_table, sweep_buffers, write_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_MISMATCH = 4
DEFAULT_TOL = 0.02


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="experiment config file")
    common.add_argument("--table", type=int, choices=(2, 3, 4), help="published table to use")
    common.add_argument("--panel", choices=("top", "bottom"),
                        help="table panel (default top; validate checks both when omitted)")
    common.add_argument("--strategy", choices=("sp", "op", "both"), type=str.lower,
                        help="polling strategy (default: config value or both)")
    common.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    common.add_argument("--strict", action="store_true", help="exit 4 on mismatches beyond --tol")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="validation tolerance")
    common.add_argument("--seed", type=int, help="simulation seed")
    common.add_argument("--reps", type=int, help="simulation replications")
    common.add_argument("--horizon", type=float, help="simulation horizon")

    p = argparse.ArgumentParser(prog="analyze", description="Tandem polling network analyzer.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="solve the chains and write a CSV table")
    sub.add_parser("simulate", parents=[common], help="simulate and write interval estimates")
    sub.add_parser("sweep", parents=[common], help="buffer sweep with saturation detection")
    sub.add_parser("validate", parents=[common], help="compare with published tables or simulation")
    sub.add_parser("run", parents=[common], help="execute the mode named in --config")
    dump = sub.add_parser("dump-generator", parents=[common], help="write a generator edge list")
    dump.add_argument("--product", type=int, choices=(1, 2), default=1)
    dump.add_argument("--full", action="store_true", help="dump the undecomposed chain")
    return p


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _experiment(args) -> ExperimentConfig:
    """Resolve ``--config`` / ``--table`` plus overriding flags into one config."""
    if args.config is not None:
        cfg = load_config(args.config)
    elif args.table is not None:
        params = panel_params(args.table, args.panel or "top", N_VALUES[0])
        cfg = ExperimentConfig(params, "both", tuple((n, n) for n in N_VALUES))
    else:
        raise InvalidConfig("give --config or --table", "config")
    changes = {}
    if args.strategy is not None:
        changes["strategy"] = args.strategy
    if args.out is not None:
        changes["out"] = args.out
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.reps is not None:
        changes["replications"] = args.reps
    if args.horizon is not None:
        changes["horizon"] = args.horizon
    if changes:
        cfg = ExperimentConfig(**{**cfg.__dict__, **changes})
    return cfg


def _solve(cfg: ExperimentConfig) -> int:
    result = sweep_buffers(cfg.params, cfg.strategies, cfg.buffer_sweep)
    with _output(cfg.out) as fh:
        write_csv(result.rows, fh)
    return EXIT_OK


def _sweep(cfg: ExperimentConfig) -> int:
    result = sweep_buffers(cfg.params, cfg.strategies, cfg.buffer_sweep)
    with _output(cfg.out) as fh:
        write_csv(result.rows, fh)
    report = sys.stderr if cfg.out is None else sys.stdout
    if len(cfg.buffer_sweep) < 2:
        print("saturation: sweep too short for a verdict", file=report)
    elif not result.saturation:
        print("saturation: none detected", file=report)
    for s in result.saturation:
        print(
            f"saturation: {s.strategy.value} product {s.product} th_{s.product}2 = {s.throughput:.6f}"
            f" at n = {s.n} (arrival rate {s.arrival_rate:g})",
            file=report,
        )
    return EXIT_OK


def _sim_configs(cfg: ExperimentConfig):
    for n1, n2 in cfg.buffer_sweep:
        params = cfg.params.with_buffers(n1, n2)
        for strategy in cfg.strategies:
            yield SimConfig(params, strategy, cfg.horizon, cfg.warmup, cfg.replications, cfg.seed)


def _simulate(cfg: ExperimentConfig, compare: bool, strict: bool, tol: float) -> int:
    header = ["strategy", "n1", "n2", "measure", "mean", "half_width"]
    if compare:
        header += ["analytic", "inside"]
    mismatches = 0
    with _output(cfg.out) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for sc in _sim_configs(cfg):
            est = run_simulation(sc)
            lead = [sc.strategy.value, sc.params.n1, sc.params.n2]
            if not compare:
                for name in MEASURES:
                    iv = est[name]
                    writer.writerow(lead + [name, f"{iv.mean:.15g}", f"{iv.half_width:.15g}"])
                continue
            rows, _ = validate_against_analysis(sc, analyze(sc.params, sc.strategy), est)
            for c in rows:
                writer.writerow(lead + [c.measure, f"{c.simulated.mean:.15g}",
                                        f"{c.simulated.half_width:.15g}",
                                        f"{c.analytic:.15g}", int(c.inside)])
                if not c.inside and not c.deviation <= tol:
                    mismatches += 1
    if compare:
        print(f"simulation mismatches beyond tol {tol}: {mismatches}", file=sys.stderr)
    return EXIT_MISMATCH if strict and mismatches else EXIT_OK


def _validate_tables(args) -> int:
    panels = [args.panel] if args.panel else ["top", "bottom"]
    total_bad = 0
    with _output(args.out) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["table", "panel", "strategy", "n", "column", "field",
                         "published", "computed", "deviation", "status"])
        for panel in panels:
            rep = reproduce_table(args.table, panel)
            for d in rep.diffs:
                if d.typo is not None:
                    status = "typo"
                elif d.deviation <= args.tol:
                    status = "ok"
                else:
                    status = "MISMATCH"
                    total_bad += 1
                writer.writerow([d.table, d.panel, d.strategy, d.n, d.column, d.field,
                                 f"{d.published:.2f}", f"{d.computed:.6f}", f"{d.deviation:.6f}", status])
            note = HEADER_NOTES.get((args.table, panel))
            if note:
                print(f"note: table {args.table} {panel} header: {note}", file=sys.stderr)
    print(f"table {args.table}: {total_bad} cell(s) beyond tol {args.tol}", file=sys.stderr)
    return EXIT_MISMATCH if args.strict and total_bad else EXIT_OK


def _dump(args) -> int:
    cfg = _experiment(args)
    strategies = strategy_names(args.strategy or cfg.strategy)
    if len(strategies) != 1:
        raise InvalidConfig("dump-generator needs a single strategy (sp or op)", "strategy")
    n1, n2 = cfg.buffer_sweep[0]
    params = cfg.params.with_buffers(n1, n2)
    if args.full:
        gen = build_full_generator(params, strategies[0])
    else:
        gen = build_subsystem_generator(params, strategies[0], args.product)
    with _output(cfg.out) as fh:
        gen.write_edge_list(fh)
    return EXIT_OK


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "dump-generator":
        return _dump(args)
    if cmd == "validate" and args.config is None:
        if args.table is None:
            raise InvalidConfig("give --table or --config", "table")
        return _validate_tables(args)
    cfg = _experiment(args)
    if cmd == "solve":
        return _solve(cfg)
    if cmd == "sweep":
        return _sweep(cfg)
    if cmd == "simulate":
        return _simulate(cfg, False, args.strict, args.tol)
    if cmd == "validate":
        return _simulate(cfg, True, args.strict, args.tol)
    # run: follow the config's mode
    if cfg.mode == "solve":
        return _sweep(cfg)
    return _simulate(cfg, cfg.mode == "both", args.strict, args.tol)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (InvalidConfig, InvalidParams) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DimensionTooLarge, ReducibleChain, SingularSystem) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
