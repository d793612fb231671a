"""Theoretical bound evaluators and empirical bound checkers.

Two generic high-probability bounds on the order-k correlation of a random
N-bit sequence:

    alon_bound:     5 * sqrt(k ln N / N)
    schmidt_bound:      sqrt(2 k ln N / N)

plus two structural results tying the measured correlation to other
statistics of the same sequence:

  * a cap on how far any memory-k transition probability can sit from 1/2,
    valid when 2^(k-2) * C_k < 1;
  * a two-sided sandwich on the universal-test statistic in terms of C_k
    (all logarithms base 2, with the Maurer window M = (Q + L) * b).

Checkers never assert-crash on a violated bound: they return a structured
result with a witness so property suites can distinguish implementation
bugs from statement-level issues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bitseq import BitSequence
from .errors import PreconditionFailedError, TooShortError
from .markov import fit_transition, max_deviation, worst_transition
from .maurer import MaurerParams, ftu
from .measures import correlation_exact, default_min_window

_EPS = 1e-12


@dataclass(frozen=True)
class BoundCheckResult:
    """Outcome of comparing a measured statistic against a bound."""

    bound_name: str
    bound_value: float | tuple[float, float] | None
    measured_value: float
    precondition_ok: bool
    satisfied: bool | None
    witness: str | None
    correlation: float | None = None


def schmidt_bound(k: int, n: int) -> float:
    """sqrt(2 k ln N / N); the tighter generic bound."""
    if k < 2 or n < 2:
        raise ValueError("need k >= 2 and N >= 2")
    return math.sqrt(2.0 * k * math.log(n) / n)


def alon_bound(k: int, n: int) -> float:
    """5 sqrt(k ln N / N); looser than schmidt_bound by exactly 5/sqrt(2)."""
    if k < 2 or n < 2:
        raise ValueError("need k >= 2 and N >= 2")
    return 5.0 * math.sqrt(k * math.log(n) / n)


def transition_deviation_bound(k: int, ck: float) -> float:
    """Cap on |p(bit | context) - 1/2| for a memory-k chain, given C_k.

    Defined only when 2^(k-2) * C_k < 1.
    """
    if ck < 0:
        raise PreconditionFailedError("C_k >= 0")
    x = 2.0 ** (k - 2) * ck
    if x >= 1.0:
        raise PreconditionFailedError(f"2^(k-2) * C_k < 1 (got {x:.6g})")
    return x / (1.0 - x)


def xor_accumulation_estimate(ck: float, n: int) -> float:
    """Heuristic correlation of the XOR of n independent streams: C_k^n."""
    if not 0.0 <= ck <= 1.0:
        raise ValueError("C_k must lie in [0, 1]")
    if n < 1:
        raise ValueError("accumulation depth must be >= 1")
    return ck ** n


def ftu_bounds_from_correlation(
    k: int, ck: float, test_blocks: int, window_bits: int
) -> tuple[float, float]:
    """Two-sided bounds on the universal-test statistic from C_k.

    Requires C_k < 2^-k (upper log domain), C_k < 1/2, and
    L (1 - 2 C_k) / (M (2^-k + C_k)) > 1 (lower log nonnegative), where
    L = test_blocks and M = window_bits.
    """
    if ck < 0:
        raise PreconditionFailedError("C_k >= 0")
    if ck >= 0.5:
        raise PreconditionFailedError(f"C_k < 1/2 (got {ck:.6g})")
    pk = 2.0 ** -k
    if ck >= pk:
        raise PreconditionFailedError(f"C_k < 2^-k = {pk:.6g} (got {ck:.6g})")
    l = float(test_blocks)
    m = float(window_bits)
    denom = m * (pk + ck)
    ratio = l * (1.0 - 2.0 * ck) / denom
    if ratio <= 1.0:
        raise PreconditionFailedError(
            f"L(1 - 2 C_k) / (M (2^-k + C_k)) > 1 (got {ratio:.6g})"
        )
    lower = (2.0 ** k - 2.0 ** (k + 1) * ck) / denom * math.log2(ratio)
    upper = 2.0 ** k * (math.log2(l / m) - math.log2(pk - ck))
    return lower, upper


def _exact_correlation_budgeted(
    seq: BitSequence,
    k: int,
    min_window: int | None,
    max_lag: int | None,
    budget: float,
    force: bool,
) -> tuple[float, int, int]:
    n = len(seq)
    if min_window is None:
        min_window = default_min_window(n)
    if max_lag is None:
        max_lag = max(k - 1, n - min_window)
    rep = correlation_exact(
        seq, k, max_lag=max_lag, min_window=min_window, budget=budget, force=force
    )
    return rep.value, min_window, max_lag


def check_transition_deviation(
    seq: BitSequence,
    k: int,
    *,
    min_window: int | None = None,
    max_lag: int | None = None,
    budget: float = 1e9,
    force: bool = False,
) -> BoundCheckResult:
    """Compare the fitted memory-k deviation against its correlation cap.

    The correlation is the exhaustive maximum over the feasible lag/window
    space above the window floor; the transition table is fitted on the
    whole sequence.  On violation the offending context is reported.
    """
    name = "transition-deviation"
    ck, _, _ = _exact_correlation_budgeted(seq, k, min_window, max_lag, budget, force)
    table = fit_transition(seq, k)
    dev = max_deviation(table)
    x = 2.0 ** (k - 2) * ck
    if x >= 1.0:
        return BoundCheckResult(
            bound_name=name,
            bound_value=None,
            measured_value=dev,
            precondition_ok=False,
            satisfied=None,
            witness=None,
            correlation=ck,
        )
    bound = x / (1.0 - x)
    ok = dev <= bound * (1.0 + _EPS) + _EPS
    witness = None
    if not ok:
        ctx, bit, prob = worst_transition(table)
        witness = (
            f"context {ctx:0{max(k - 1, 1)}b} -> bit {bit}: p = {prob:.6f}, "
            f"|p - 1/2| = {dev:.6f} > bound {bound:.6f} (C_{k} = {ck:.6f})"
        )
    return BoundCheckResult(
        bound_name=name,
        bound_value=bound,
        measured_value=dev,
        precondition_ok=True,
        satisfied=ok,
        witness=witness,
        correlation=ck,
    )


def check_ftu_bounds(
    seq: BitSequence,
    params: MaurerParams,
    *,
    min_window: int | None = None,
    max_lag: int | None = None,
    budget: float = 1e9,
    force: bool = False,
) -> BoundCheckResult:
    """Verify lower <= f_TU <= upper on the test's own window of bits.

    The correlation order equals the block length, so this needs
    block_length >= 2.
    """
    name = "ftu-sandwich"
    b = params.block_length
    if b < 2:
        raise ValueError("the sandwich needs block_length >= 2")
    m_bits = params.required_bits
    if len(seq) < m_bits:
        raise TooShortError(f"need {m_bits} bits, got {len(seq)}")
    sub = seq.prefix(m_bits)
    ck, _, _ = _exact_correlation_budgeted(sub, b, min_window, max_lag, budget, force)
    value = ftu(sub, params)
    try:
        lower, upper = ftu_bounds_from_correlation(b, ck, params.test_blocks, m_bits)
    except PreconditionFailedError:
        return BoundCheckResult(
            bound_name=name,
            bound_value=None,
            measured_value=value,
            precondition_ok=False,
            satisfied=None,
            witness=None,
            correlation=ck,
        )
    ok = lower - _EPS <= value <= upper + _EPS
    witness = None
    if not ok:
        witness = (
            f"f_TU = {value:.6f} outside [{lower:.6f}, {upper:.6f}] "
            f"(C_{b} = {ck:.6f}, L = {params.test_blocks}, M = {m_bits})"
        )
    return BoundCheckResult(
        bound_name=name,
        bound_value=(lower, upper),
        measured_value=value,
        precondition_ok=True,
        satisfied=ok,
        witness=witness,
        correlation=ck,
    )
