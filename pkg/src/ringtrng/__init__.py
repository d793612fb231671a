"""Simulation and statistical validation toolkit for ring-oscillator TRNGs."""

__version__ = "0.1.0"

from .bitseq import (
    BitSequence,
    RunStats,
    load_bits,
    parse_bits,
    runs,
    save_bits,
    signed,
    xor_sequences,
)
from .bounds import (
    BoundCheckResult,
    alon_bound,
    check_ftu_bounds,
    check_transition_deviation,
    ftu_bounds_from_correlation,
    schmidt_bound,
    transition_deviation_bound,
    xor_accumulation_estimate,
)
from .ingest import CounterTrace, counters_to_bits, differential_bits, read_counters, write_counters
from .markov import (
    TransitionTable,
    conditional_entropy,
    fit_transition,
    max_deviation,
    sqrtn_band_check,
)
from .maurer import (
    MaurerParams,
    MaurerReport,
    block_indices,
    expected_ftu,
    ftu,
    maurer_test,
    var_single,
    variance_ftu,
)
from .measures import (
    CorrelationReport,
    NormalityReport,
    PatternCounts,
    allan_variance,
    bitmatch_autocorr,
    correlation2_fast,
    correlation_exact,
    normality_measure,
    pattern_counts,
)
from .rosim import (
    PRESETS,
    EroConfig,
    SimOutput,
    oscillator_edges,
    simulate,
    simulate_accumulated,
    simulate_counter,
    simulate_ideal,
    simulate_sampling,
)
from .seeds import mix64
from .sweep import (
    SweepGrid,
    SweepRecord,
    build_grid,
    default_grid,
    emit_csv,
    emit_scatter,
    fisher_ci,
    pearson,
    run_sweep,
    summarize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
