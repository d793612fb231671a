"""Parameter-grid experiment harness.

Runs a grid of oscillator configurations, computes the full metric set per
run (short-range off-peak correlation, universal-test Z, memory-8
transition deviation, run statistics, the generic correlation bound) and
correlates the universal-test score with the off-peak correlation across
the grid.  Output is a fixed-schema CSV plus a standalone SVG scatter.

Verdict conventions: a record jointly passes when its off-peak C2 is below
0.01 and |Z| < 2.  The verdict pipeline scans DEFAULT_C2_LAGS lags, a
short health-test style range: the max over tens of thousands of lags of
a finite-sample autocorrelation sits above 0.01 for any source at
N = 10^5, so a wide scan would make the pass region unreachable.
``correlation2_fast`` keeps its own wide default when called directly.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from statistics import NormalDist

import numpy as np

from .bitseq import BitSequence, runs
from .bounds import schmidt_bound
from .errors import DegenerateInputError, EmptyGridError, RingTrngError
from .markov import fit_transition, max_deviation
from .maurer import MaurerParams, maurer_test
from .measures import correlation2_fast
from .rosim import EroConfig, simulate
from .seeds import mix64

#: lags scanned by the verdict pipeline's off-peak C2
DEFAULT_C2_LAGS = 10

#: joint pass region
JOINT_C2_THRESHOLD = 0.01
JOINT_Z_THRESHOLD = 2.0

DEFAULT_BASE_SEED = 0x2E17

CSV_HEADER = [
    "config_id", "extraction", "f1_hz", "f2_hz", "fref_hz", "jitter_rel",
    "xor_depth", "replicate", "n_bits", "c2_offpeak", "c2_lag", "maurer_b",
    "maurer_q", "maurer_l", "maurer_ftu", "maurer_z", "markov_k",
    "markov_maxdev", "run_mean", "run_sd", "schmidt_bound_k2", "pass_z",
    "pass_c2", "failure_reason",
]


@dataclass(frozen=True)
class SweepGrid:
    f1_values: tuple[float, ...]
    f2_ratios: tuple[float, ...]
    fref_values: tuple[float, ...]
    xor_depths: tuple[int, ...] = (1, 2, 4, 8, 16)
    extractions: tuple[str, ...] = ("counter",)
    jitter_rels: tuple[float, ...] = (0.05,)
    n_bits: int = 100_000
    base_seed: int = DEFAULT_BASE_SEED
    replicates: int = 1


def default_grid(base_seed: int = DEFAULT_BASE_SEED, n_bits: int = 100_000,
                 replicates: int = 1) -> SweepGrid:
    """The stock ERO grid: 35 valid frequency combinations x 5 depths."""
    return SweepGrid(
        f1_values=(100e6, 150e6, 200e6, 250e6),
        f2_ratios=(0.7, 0.9, 1.1, 1.4),
        fref_values=(50e6, 100e6, 150e6),
        base_seed=base_seed,
        n_bits=n_bits,
        replicates=replicates,
    )


def total_combinations(grid: SweepGrid) -> int:
    return (
        len(grid.f1_values) * len(grid.f2_ratios) * len(grid.fref_values)
        * len(grid.jitter_rels) * len(grid.extractions) * len(grid.xor_depths)
    )


def build_grid(grid: SweepGrid) -> list[EroConfig]:
    """Enumerate valid configs in fixed lexicographic field order.

    Combinations violating a config invariant (counter mode with the
    reference at or above the slower oscillator) are skipped; the tally of
    skipped combinations is total_combinations(grid) - len(result).
    Per-config seeds derive from (base_seed, position in this list).
    """
    configs: list[EroConfig] = []
    for f1 in grid.f1_values:
        for ratio in grid.f2_ratios:
            for fref in grid.fref_values:
                for jitter in grid.jitter_rels:
                    for extraction in grid.extractions:
                        for depth in grid.xor_depths:
                            f2 = f1 * ratio
                            if extraction == "counter" and fref >= min(f1, f2):
                                continue
                            configs.append(
                                EroConfig(
                                    f1=f1, f2=f2, fref=fref, jitter_rel=jitter,
                                    extraction=extraction, xor_depth=depth,
                                    seed=mix64(grid.base_seed, len(configs)),
                                )
                            )
    if not configs:
        raise EmptyGridError("every grid combination violates a config invariant")
    return configs


@dataclass(frozen=True)
class SweepRecord:
    config_id: int
    extraction: str
    f1_hz: float
    f2_hz: float
    fref_hz: float
    jitter_rel: float
    xor_depth: int
    replicate: int
    n_bits: int
    c2_offpeak: float
    c2_lag: int
    maurer_b: int
    maurer_q: int
    maurer_l: int
    maurer_ftu: float
    maurer_z: float
    markov_k: int
    markov_maxdev: float
    run_mean: float
    run_sd: float
    schmidt_bound_k2: float
    pass_z: bool
    pass_c2: bool
    failure_reason: str = ""


def compute_metrics(
    bits: BitSequence,
    *,
    c2_lags: int = DEFAULT_C2_LAGS,
    markov_k: int = 8,
    maurer_block: int = 7,
    maurer_init: int = 1280,
    z_threshold: float = JOINT_Z_THRESHOLD,
) -> dict:
    """The shared metric bundle behind sweep records and CLI reports."""
    n = len(bits)
    c2 = correlation2_fast(bits, max_lag=min(c2_lags, n - 1))
    report = maurer_test(bits, MaurerParams.for_length(n, maurer_block, maurer_init),
                         z_threshold=z_threshold)
    table = fit_transition(bits, markov_k)
    stats = runs(bits)
    return {
        "n_bits": n,
        "c2_offpeak": c2.value,
        "c2_lag": c2.lags[0],
        "maurer_b": report.params.block_length,
        "maurer_q": report.params.init_blocks,
        "maurer_l": report.params.test_blocks,
        "maurer_ftu": report.f_tu,
        "maurer_z": report.z,
        "markov_k": markov_k,
        "markov_maxdev": max_deviation(table),
        "run_mean": stats.mean,
        "run_sd": stats.sd,
        "schmidt_bound_k2": schmidt_bound(2, n),
        "pass_z": abs(report.z) < z_threshold,
        "pass_c2": c2.value < JOINT_C2_THRESHOLD,
    }


def _record_for(config_id: int, cfg: EroConfig, replicate: int, n_bits: int,
                c2_lags: int, markov_k: int, maurer_block: int,
                maurer_init: int) -> SweepRecord:
    base = dict(
        config_id=config_id, extraction=cfg.extraction, f1_hz=cfg.f1, f2_hz=cfg.f2,
        fref_hz=cfg.fref, jitter_rel=cfg.jitter_rel, xor_depth=cfg.xor_depth,
        replicate=replicate, n_bits=n_bits,
    )
    run_cfg = replace(cfg, seed=mix64(cfg.seed, replicate))
    try:
        out = simulate(run_cfg, n_bits)
        metrics = compute_metrics(
            out.bits, c2_lags=c2_lags, markov_k=markov_k,
            maurer_block=maurer_block, maurer_init=maurer_init,
        )
        metrics.pop("n_bits")
        return SweepRecord(**base, **metrics)
    except RingTrngError as exc:
        nan = float("nan")
        return SweepRecord(
            **base, c2_offpeak=nan, c2_lag=-1, maurer_b=maurer_block,
            maurer_q=maurer_init, maurer_l=-1, maurer_ftu=nan, maurer_z=nan,
            markov_k=markov_k, markov_maxdev=nan, run_mean=nan, run_sd=nan,
            schmidt_bound_k2=schmidt_bound(2, n_bits), pass_z=False,
            pass_c2=False, failure_reason=str(exc),
        )


def run_sweep(
    configs: list[EroConfig],
    n_bits: int = 100_000,
    replicates: int = 1,
    *,
    c2_lags: int = DEFAULT_C2_LAGS,
    markov_k: int = 8,
    maurer_block: int = 7,
    maurer_init: int = 1280,
    workers: int = 1,
) -> list[SweepRecord]:
    """One record per (config, replicate); failures stay inline.

    Replicate seeds derive from (config seed, replicate index), so results
    are independent of execution order; records come back sorted by
    (config_id, replicate).
    """
    if not configs:
        raise EmptyGridError("no configurations to sweep")
    jobs = [
        (ci, cfg, rep)
        for ci, cfg in enumerate(configs)
        for rep in range(replicates)
    ]

    def one(job):
        ci, cfg, rep = job
        return _record_for(ci, cfg, rep, n_bits, c2_lags, markov_k,
                           maurer_block, maurer_init)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, jobs))
    else:
        records = [one(job) for job in jobs]
    records.sort(key=lambda r: (r.config_id, r.replicate))
    return records


def pearson(xs, ys) -> float:
    """Sample Pearson correlation coefficient."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.size != y.size:
        raise ValueError("input lengths differ")
    if x.size < 3:
        raise ValueError("need at least 3 points")
    dx = x - x.mean()
    dy = y - y.mean()
    vx = float(dx @ dx)
    vy = float(dy @ dy)
    if vx == 0.0 or vy == 0.0:
        raise DegenerateInputError("zero variance input")
    r = float(dx @ dy) / math.sqrt(vx * vy)
    return min(1.0, max(-1.0, r))


def fisher_ci(r: float, n: int, level: float = 0.95) -> tuple[float, float]:
    """Fisher z-transform confidence interval for a correlation."""
    if not abs(r) < 1.0:
        raise DegenerateInputError("|r| must be < 1")
    if n < 4:
        raise ValueError("need at least 4 samples")
    z = NormalDist().inv_cdf(0.5 + level / 2.0)
    half = z / math.sqrt(n - 3)
    center = math.atanh(r)
    return math.tanh(center - half), math.tanh(center + half)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def emit_csv(records: list[SweepRecord], path) -> None:
    """Fixed-header CSV; floats carry 12 significant digits."""
    if not records:
        raise EmptyGridError("no records to emit")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow([_fmt(getattr(rec, field)) for field in CSV_HEADER])
    Path(path).write_text(buf.getvalue())


def summarize(records: list[SweepRecord]) -> dict:
    """Correlation of the universal-test score with off-peak C2.

    Emits every axis variant (signed and absolute Z, raw and log C2) since
    the headline number's convention is a judgment call; the absolute-Z
    versus raw-C2 pairing is the one reported first.
    """
    ok = [r for r in records if not r.failure_reason and math.isfinite(r.c2_offpeak)]
    c2 = np.array([r.c2_offpeak for r in ok])
    z = np.array([r.maurer_z for r in ok])
    absz = np.abs(z)
    logc2 = np.log10(np.maximum(c2, 1e-12))
    out = {
        "n_records": len(records),
        "n_usable": len(ok),
        "n_joint_pass": sum(1 for r in ok if r.pass_z and r.pass_c2),
    }
    if len(ok) >= 4 and c2.std() > 0:
        r_main = pearson(absz, c2)
        lo, hi = fisher_ci(r_main, len(ok))
        out["pearson_absz_c2"] = r_main
        out["pearson_absz_c2_ci95"] = (lo, hi)
        out["pearson_z_c2"] = pearson(z, c2)
        out["pearson_absz_logc2"] = pearson(absz, logc2)
        out["pearson_z_logc2"] = pearson(z, logc2)
    return out


# --- scatter --------------------------------------------------------------

_DEPTH_COLORS = {
    1: "#1f77b4", 2: "#ff7f0e", 4: "#2ca02c", 8: "#d62728", 16: "#9467bd",
}


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = np.linspace(lo, hi, n)
    return [float(v) for v in raw]


def emit_scatter(records: list[SweepRecord], path) -> None:
    """Standalone SVG scatter: off-peak C2 (x) vs universal-test Z (y).

    Point color encodes XOR depth; the dashed line marks the generic
    order-2 correlation bound at the sweep's bit length.
    """
    if not records:
        raise EmptyGridError("no records to plot")
    ok = [r for r in records if not r.failure_reason and math.isfinite(r.c2_offpeak)]
    width, height = 720, 520
    left, right, top, bottom = 80, 30, 30, 60
    plot_w = width - left - right
    plot_h = height - top - bottom

    xs = [r.c2_offpeak for r in ok] or [0.0]
    ys = [r.maurer_z for r in ok] or [0.0]
    bound = schmidt_bound(2, records[0].n_bits)
    x_lo, x_hi = 0.0, max(max(xs), bound) * 1.05
    y_lo, y_hi = min(min(ys), -1.0), max(max(ys), 1.0)
    y_pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    def px(x):
        return left + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return top + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="black" stroke-width="1"/>',
    ]
    for xv in _ticks(x_lo, x_hi):
        parts.append(
            f'<line x1="{px(xv):.2f}" y1="{top + plot_h}" x2="{px(xv):.2f}" '
            f'y2="{top + plot_h + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{px(xv):.2f}" y="{top + plot_h + 20}" font-size="11" '
            f'text-anchor="middle">{xv:.3g}</text>'
        )
    for yv in _ticks(y_lo, y_hi):
        parts.append(
            f'<line x1="{left - 5}" y1="{py(yv):.2f}" x2="{left}" '
            f'y2="{py(yv):.2f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{left - 8}" y="{py(yv):.2f}" font-size="11" '
            f'text-anchor="end" dominant-baseline="middle">{yv:.3g}</text>'
        )
    parts.append(
        f'<text x="{left + plot_w / 2}" y="{height - 15}" font-size="13" '
        'text-anchor="middle">off-peak C2</text>'
    )
    parts.append(
        f'<text x="20" y="{top + plot_h / 2}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 20 {top + plot_h / 2})">universal-test Z</text>'
    )
    bx = px(bound)
    parts.append(
        f'<line x1="{bx:.2f}" y1="{top}" x2="{bx:.2f}" y2="{top + plot_h}" '
        'stroke="gray" stroke-width="1" stroke-dasharray="6 4"/>'
    )
    parts.append(
        f'<text x="{bx + 4:.2f}" y="{top + 14}" font-size="10" fill="gray">'
        f'bound {bound:.3g}</text>'
    )
    for rec in ok:
        color = _DEPTH_COLORS.get(rec.xor_depth, "#7f7f7f")
        parts.append(
            f'<circle cx="{px(rec.c2_offpeak):.2f}" cy="{py(rec.maurer_z):.2f}" '
            f'r="3.5" fill="{color}" fill-opacity="0.75"/>'
        )
    legend_y = top + 10
    for depth, color in _DEPTH_COLORS.items():
        parts.append(
            f'<circle cx="{left + plot_w - 70}" cy="{legend_y}" r="4" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{left + plot_w - 60}" y="{legend_y + 4}" font-size="11">'
            f'n={depth}</text>'
        )
        legend_y += 16
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")
