"""Batch command-line front end.

Every subcommand prints a reproducibility header (the fully resolved
parameter set) before any results, then a structured key = value report
with stable key order, then a short human summary.  Exit codes: 0 for
success or a passing verdict, 1 for a failing statistical verdict when
gating is enabled, 2 for usage errors, 3 for I/O or format errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .bitseq import BitSequence, load_bits, parse_bits, save_bits
from .bounds import (
    alon_bound,
    check_ftu_bounds,
    check_transition_deviation,
    schmidt_bound,
    transition_deviation_bound,
    xor_accumulation_estimate,
)
from .errors import RingTrngError
from .ingest import counters_to_bits, differential_bits, read_counters, write_counters
from .markov import conditional_entropy, fit_transition, max_deviation, sqrtn_band_check
from .maurer import MaurerParams, maurer_test
from .measures import correlation2_fast, correlation_exact
from .rosim import PRESETS, EroConfig, simulate
from .sweep import (
    DEFAULT_BASE_SEED,
    DEFAULT_C2_LAGS,
    JOINT_C2_THRESHOLD,
    JOINT_Z_THRESHOLD,
    build_grid,
    compute_metrics,
    default_grid,
    emit_csv,
    emit_scatter,
    run_sweep,
    summarize,
    total_combinations,
)

ENV_SEED = "RINGTRNG_SEED"


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(ENV_SEED)
    if raw is None:
        return 0
    try:
        return int(raw, 0)
    except ValueError:
        raise UsageError(f"{ENV_SEED} must be an integer, got {raw!r}")


def _print_block(title: str, items: dict) -> None:
    print(f"# {title}")
    for key, value in items.items():
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = format(value, ".12g")
        print(f"{key} = {value}")


def _header(command: str, params: dict) -> None:
    _print_block(f"ringtrng {__version__} :: {command}", params)
    print()


def _load_input(path: str, fmt: str) -> BitSequence:
    if fmt == "packed" or fmt == "text":
        return load_bits(path)
    if fmt == "counters":
        return counters_to_bits(read_counters(path))
    # auto: packed magic, else bit text, else counter text
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == b"RTL1":
        return load_bits(path)
    body = open(path, "r").read()
    stripped = set(body) - set(" \t\n\r\x0b\x0c")
    if stripped <= {"0", "1"}:
        return parse_bits(body)
    return counters_to_bits(read_counters(path))


def _resolve_config(args, *, need_fref: bool = True) -> EroConfig:
    if args.preset:
        if args.preset not in PRESETS:
            raise UsageError(
                f"unknown preset {args.preset!r}; choices: {', '.join(sorted(PRESETS))}"
            )
        cfg = PRESETS[args.preset]
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        else:
            cfg = replace(cfg, seed=_default_seed())
        if args.depth is not None:
            cfg = replace(cfg, xor_depth=args.depth)
        return cfg
    if args.f1 is None or args.f2 is None:
        raise UsageError("need --preset or both --f1 and --f2")
    extraction = args.extraction or "counter"
    if args.fref is None:
        if need_fref:
            raise UsageError(f"--fref is required in {extraction} mode")
        raise UsageError("--fref is required")
    try:
        return EroConfig(
            f1=args.f1,
            f2=args.f2,
            fref=args.fref,
            jitter_rel=args.jitter if args.jitter is not None else 0.05,
            extraction=extraction,
            xor_depth=args.depth or 1,
            seed=args.seed if args.seed is not None else _default_seed(),
        )
    except ValueError as exc:
        raise UsageError(str(exc))


def _add_config_flags(parser) -> None:
    parser.add_argument("--preset", help="named configuration preset")
    parser.add_argument("--f1", type=float, help="oscillator 1 frequency in Hz")
    parser.add_argument("--f2", type=float, help="oscillator 2 frequency in Hz")
    parser.add_argument("--fref", type=float, help="reference clock frequency in Hz")
    parser.add_argument("--jitter", type=float, help="per-period jitter fraction")
    parser.add_argument(
        "--extraction", choices=("counter", "sampling", "ideal"), help="extraction mode"
    )
    parser.add_argument("--depth", type=int, help="XOR accumulation depth")
    parser.add_argument("--seed", type=int, help=f"seed (default from ${ENV_SEED} or 0)")


def _cfg_dict(cfg: EroConfig, n_bits: int) -> dict:
    return {
        "config.f1_hz": cfg.f1,
        "config.f2_hz": cfg.f2,
        "config.fref_hz": cfg.fref,
        "config.jitter_rel": cfg.jitter_rel,
        "config.extraction": cfg.extraction,
        "config.xor_depth": cfg.xor_depth,
        "config.seed": cfg.seed,
        "config.n_bits": n_bits,
    }


def _cmd_generate(args) -> int:
    cfg = _resolve_config(args)
    n_bits = args.bits
    _header("generate", _cfg_dict(cfg, n_bits))
    out = simulate(cfg, n_bits)
    save_bits(out.bits, args.output, fmt=args.format)
    report = {
        "output.path": args.output,
        "output.format": args.format,
        "output.n_bits": len(out.bits),
        "output.ones_fraction": float(np.mean(out.bits.to_array())),
    }
    if args.counters_out:
        if out.counters1 is None:
            raise UsageError("--counters-out needs counter extraction at depth 1")
        for idx, counters in ((1, out.counters1), (2, out.counters2)):
            path = f"{args.counters_out}{idx}.txt"
            write_counters(counters, path)
            report[f"output.counters{idx}"] = path
    _print_block("result", report)
    return 0


def _metrics_report(metrics: dict) -> dict:
    joint = metrics["pass_z"] and metrics["pass_c2"]
    return {
        "c2.value": metrics["c2_offpeak"],
        "c2.lag": metrics["c2_lag"],
        "maurer.block_length": metrics["maurer_b"],
        "maurer.init_blocks": metrics["maurer_q"],
        "maurer.test_blocks": metrics["maurer_l"],
        "maurer.f_tu": metrics["maurer_ftu"],
        "maurer.z": metrics["maurer_z"],
        "markov.memory": metrics["markov_k"],
        "markov.max_deviation": metrics["markov_maxdev"],
        "runs.mean": metrics["run_mean"],
        "runs.sd": metrics["run_sd"],
        "bound.schmidt_k2": metrics["schmidt_bound_k2"],
        "verdict.pass_c2": metrics["pass_c2"],
        "verdict.pass_z": metrics["pass_z"],
        "verdict.joint": joint,
    }


def _cmd_analyze(args) -> int:
    bits = _load_input(args.input, args.format)
    _header(
        "analyze",
        {
            "input.path": args.input,
            "input.n_bits": len(bits),
            "params.c2_lags": args.c2_lags,
            "params.maurer_b": args.maurer_b,
            "params.maurer_q": args.maurer_q,
            "params.markov_k": args.markov_k,
            "params.z_threshold": args.z_threshold,
            "params.gate": not args.no_gate,
        },
    )
    metrics = compute_metrics(
        bits,
        c2_lags=args.c2_lags,
        markov_k=args.markov_k,
        maurer_block=args.maurer_b,
        maurer_init=args.maurer_q,
        z_threshold=args.z_threshold,
    )
    report = _metrics_report(metrics)
    _print_block("report", report)
    joint = report["verdict.joint"]
    print()
    print(
        f"verdict: C2 = {metrics['c2_offpeak']:.6g} "
        f"({'<' if metrics['pass_c2'] else '>='} {JOINT_C2_THRESHOLD}), "
        f"Z = {metrics['maurer_z']:.4g} "
        f"(|Z| {'<' if metrics['pass_z'] else '>='} {JOINT_Z_THRESHOLD}) -> "
        f"{'PASS' if joint else 'FAIL'}"
    )
    if args.no_gate:
        return 0
    return 0 if joint else 1


def _cmd_maurer(args) -> int:
    bits = _load_input(args.input, args.format)
    if args.test_blocks:
        params = MaurerParams(args.block_length, args.init_blocks, args.test_blocks)
    else:
        params = MaurerParams.for_length(len(bits), args.block_length, args.init_blocks)
    _header(
        "maurer",
        {
            "input.path": args.input,
            "input.n_bits": len(bits),
            "params.block_length": params.block_length,
            "params.init_blocks": params.init_blocks,
            "params.test_blocks": params.test_blocks,
            "params.z_threshold": args.z_threshold,
        },
    )
    report = maurer_test(bits, params, z_threshold=args.z_threshold)
    _print_block(
        "report",
        {
            "maurer.f_tu": report.f_tu,
            "maurer.expected": report.expected,
            "maurer.variance": report.variance,
            "maurer.z": report.z,
            "maurer.fallback_blocks": report.fallback_blocks,
            "maurer.pass": report.passed,
        },
    )
    return 0 if report.passed else 1


def _cmd_correlation(args) -> int:
    bits = _load_input(args.input, args.format)
    _header(
        "correlation",
        {
            "input.path": args.input,
            "input.n_bits": len(bits),
            "params.order": args.order,
            "params.exact": args.exact,
            "params.max_lag": args.max_lag,
            "params.min_window": args.min_window,
        },
    )
    if args.exact or args.order != 2:
        rep = correlation_exact(
            bits,
            args.order,
            max_lag=args.max_lag,
            min_window=args.min_window,
            budget=args.budget,
            force=args.force,
        )
    else:
        rep = correlation2_fast(bits, max_lag=args.max_lag)
    _print_block(
        "report",
        {
            "correlation.order": rep.order,
            "correlation.value": rep.value,
            "correlation.lags": ",".join(str(d) for d in rep.lags),
            "correlation.window": rep.window,
            "correlation.mode": rep.mode,
        },
    )
    return 0


def _cmd_markov(args) -> int:
    bits = _load_input(args.input, args.format)
    _header(
        "markov",
        {
            "input.path": args.input,
            "input.n_bits": len(bits),
            "params.memory": args.memory,
            "params.smoothing": args.smoothing,
        },
    )
    table = fit_transition(bits, args.memory)
    band = sqrtn_band_check(table, len(bits))
    _print_block(
        "report",
        {
            "markov.memory": args.memory,
            "markov.max_deviation": max_deviation(table),
            "markov.entropy_bits_per_bit": conditional_entropy(table, smoothing=args.smoothing),
            "markov.band_half_width": band.half_width,
            "markov.band_ok": band.ok,
            "markov.band_offenders": len(band.offenders),
            "markov.coverage": float(np.count_nonzero(table.observed)) / table.observed.size,
        },
    )
    return 0 if band.ok else 1


def _cmd_bounds(args) -> int:
    if args.bounds_cmd == "eval":
        _header("bounds eval", {"params.k": args.k, "params.n": args.n})
        report = {
            "bound.schmidt": schmidt_bound(args.k, args.n),
            "bound.alon": alon_bound(args.k, args.n),
        }
        if args.ck is not None:
            report["bound.transition_deviation"] = transition_deviation_bound(args.k, args.ck)
            if args.xor_n:
                report["bound.xor_estimate"] = xor_accumulation_estimate(args.ck, args.xor_n)
        _print_block("report", report)
        return 0
    bits = _load_input(args.input, args.format)
    if args.bounds_cmd == "check-t1":
        _header(
            "bounds check-t1",
            {"input.path": args.input, "input.n_bits": len(bits), "params.k": args.k},
        )
        result = check_transition_deviation(bits, args.k, budget=args.budget, force=args.force)
    else:
        params = MaurerParams(args.block_length, args.init_blocks, args.test_blocks)
        _header(
            "bounds check-t2",
            {
                "input.path": args.input,
                "input.n_bits": len(bits),
                "params.block_length": params.block_length,
                "params.init_blocks": params.init_blocks,
                "params.test_blocks": params.test_blocks,
            },
        )
        result = check_ftu_bounds(bits, params, budget=args.budget, force=args.force)
    _print_block(
        "report",
        {
            "check.name": result.bound_name,
            "check.correlation": result.correlation,
            "check.bound": str(result.bound_value),
            "check.measured": result.measured_value,
            "check.precondition_ok": result.precondition_ok,
            "check.satisfied": str(result.satisfied),
            "check.witness": result.witness or "",
        },
    )
    return 0 if result.satisfied is not False else 1


def _cmd_sweep(args) -> int:
    if args.seed is not None:
        seed = args.seed
    elif os.environ.get(ENV_SEED) is not None:
        seed = _default_seed()
    else:
        seed = DEFAULT_BASE_SEED
    if args.preset == "sweep-paper" or args.preset is None:
        grid = default_grid(base_seed=seed, n_bits=args.bits, replicates=args.replicates)
    else:
        raise UsageError(f"unknown sweep preset {args.preset!r}")
    configs = build_grid(grid)
    _header(
        "sweep",
        {
            "grid.configs": len(configs),
            "grid.skipped": total_combinations(grid) - len(configs),
            "grid.n_bits": grid.n_bits,
            "grid.replicates": grid.replicates,
            "grid.base_seed": grid.base_seed,
            "params.c2_lags": args.c2_lags,
            "params.workers": args.workers,
        },
    )
    records = run_sweep(
        configs,
        n_bits=grid.n_bits,
        replicates=grid.replicates,
        c2_lags=args.c2_lags,
        workers=args.workers,
    )
    emit_csv(records, args.out_csv)
    report: dict = {"output.csv": args.out_csv}
    if args.out_svg:
        emit_scatter(records, args.out_svg)
        report["output.svg"] = args.out_svg
    summary = summarize(records)
    for key, value in summary.items():
        report[f"summary.{key}"] = str(value)
    _print_block("report", report)
    return 0


def _cmd_ingest(args) -> int:
    _header(
        "ingest",
        {
            "input.a": args.input,
            "input.b": args.second or "",
            "output.path": args.output,
            "output.format": args.to,
        },
    )
    if args.second:
        bits = differential_bits(read_counters(args.input), read_counters(args.second))
    else:
        bits = _load_input(args.input, args.format)
    save_bits(bits, args.output, fmt="packed" if args.to == "bits-packed" else "text")
    _print_block("result", {"output.n_bits": len(bits)})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringtrng",
        description="Simulation and statistical validation for ring-oscillator TRNGs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="simulate a configuration and write its bits")
    _add_config_flags(p)
    p.add_argument("--bits", type=int, default=100_000)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--format", choices=("text", "packed"), default="text")
    p.add_argument("--counters-out", help="path prefix for raw counter traces")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("analyze", help="full metric bundle plus joint verdict")
    p.add_argument("input")
    p.add_argument("--format", choices=("auto", "text", "packed", "counters"), default="auto")
    p.add_argument("--c2-lags", type=int, default=DEFAULT_C2_LAGS)
    p.add_argument("--maurer-b", type=int, default=7)
    p.add_argument("--maurer-q", type=int, default=1280)
    p.add_argument("--markov-k", type=int, default=8)
    p.add_argument("--z-threshold", type=float, default=2.0)
    p.add_argument("--no-gate", action="store_true", help="always exit 0 on success")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("maurer", help="universal statistical test")
    p.add_argument("input")
    p.add_argument("--format", choices=("auto", "text", "packed", "counters"), default="auto")
    p.add_argument("--block-length", "-b", type=int, default=7)
    p.add_argument("--init-blocks", "-q", type=int, default=1280)
    p.add_argument("--test-blocks", "-l", type=int, default=0)
    p.add_argument("--z-threshold", type=float, default=2.0)
    p.set_defaults(func=_cmd_maurer)

    p = sub.add_parser("correlation", help="order-k correlation measure")
    p.add_argument("input")
    p.add_argument("--format", choices=("auto", "text", "packed", "counters"), default="auto")
    p.add_argument("--order", "-k", type=int, default=2)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--max-lag", type=int)
    p.add_argument("--min-window", type=int)
    p.add_argument("--budget", type=float, default=1e9)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=_cmd_correlation)

    p = sub.add_parser("markov", help="memory-k transition table statistics")
    p.add_argument("input")
    p.add_argument("--format", choices=("auto", "text", "packed", "counters"), default="auto")
    p.add_argument("--memory", "-k", type=int, default=8)
    p.add_argument("--smoothing", action="store_true")
    p.set_defaults(func=_cmd_markov)

    p = sub.add_parser("bounds", help="bound evaluation and empirical checks")
    bsub = p.add_subparsers(dest="bounds_cmd", required=True)
    pe = bsub.add_parser("eval")
    pe.add_argument("--k", type=int, required=True)
    pe.add_argument("--n", type=int, required=True)
    pe.add_argument("--ck", type=float)
    pe.add_argument("--xor-n", type=int)
    pe.set_defaults(func=_cmd_bounds)
    for name in ("check-t1", "check-t2"):
        pc = bsub.add_parser(name)
        pc.add_argument("input")
        pc.add_argument("--format", choices=("auto", "text", "packed", "counters"), default="auto")
        pc.add_argument("--budget", type=float, default=1e9)
        pc.add_argument("--force", action="store_true")
        if name == "check-t1":
            pc.add_argument("--k", type=int, default=2)
        else:
            pc.add_argument("--block-length", "-b", type=int, default=2)
            pc.add_argument("--init-blocks", "-q", type=int, default=64)
            pc.add_argument("--test-blocks", "-l", type=int, default=512)
        pc.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("sweep", help="parameter-grid experiment")
    p.add_argument("--preset", default="sweep-paper")
    p.add_argument("--bits", type=int, default=100_000)
    p.add_argument("--replicates", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("--c2-lags", type=int, default=DEFAULT_C2_LAGS)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-svg")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("ingest", help="convert counter or bit files")
    p.add_argument("input")
    p.add_argument("--second", help="second counter trace for differential extraction")
    p.add_argument("--format", choices=("auto", "text", "packed", "counters"), default="auto")
    p.add_argument("--to", choices=("bits-text", "bits-packed"), default="bits-text")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_ingest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (OSError, RingTrngError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
