"""Correlation and normality measures on bit sequences.

The k-th order correlation measure of a +/-1 sequence e_1..e_N is the
maximum over lag vectors D = (d_1 < ... < d_{k-1}) and window lengths M of

    (1/M) | sum_{n=1..M} e_n * e_{n+d_1} * ... * e_{n+d_{k-1}} |

with non-cyclic indexing, i.e. M + d_{k-1} <= N.  Normalizing by M makes
the raw maximum over all M >= 1 degenerate (a single-term window always
scores 1), so searches take a window floor; the default floor is
``default_min_window``.  The floor is an explicit parameter everywhere so
small exhaustive oracles can widen the search at will.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .bitseq import BitSequence, signed
from .errors import (
    BudgetExceededError,
    TooShortError,
    WindowExceedsSequenceError,
    WindowTooSmallError,
)


@dataclass(frozen=True)
class CorrelationReport:
    """Maximizing correlation value together with where it was attained."""

    order: int
    value: float
    lags: tuple[int, ...]
    window: int
    mode: str


@dataclass(frozen=True)
class PatternCounts:
    k: int
    window: int
    counts: np.ndarray


@dataclass(frozen=True)
class NormalityReport:
    k: int
    value: float
    pattern: int
    window: int


def default_min_window(n: int) -> int:
    """Window floor for correlation / normality searches."""
    return min(n, max((n + 1) // 2, 16))


def default_max_lag(n: int) -> int:
    """Lag ceiling for the fast autocorrelation scan."""
    return max(1, n // 2)


def _window_values(bits: np.ndarray, k: int, count: int) -> np.ndarray:
    """Integer value of each length-k window, first bit most significant."""
    vals = np.zeros(count, dtype=np.int64)
    for j in range(k):
        vals = (vals << 1) | bits[j : j + count]
    return vals


def pattern_counts(seq: BitSequence, window: int, k: int) -> PatternCounts:
    """Occurrences of every k-bit pattern among the first `window` bits.

    A pattern starting at position n (1-based) lies inside the window when
    n <= window - k + 1, so the counts always sum to window - k + 1.
    """
    n = len(seq)
    if k < 1:
        raise ValueError("pattern order k must be >= 1")
    if window < k:
        raise WindowTooSmallError(f"window {window} shorter than pattern order {k}")
    if window > n:
        raise WindowExceedsSequenceError(f"window {window} exceeds sequence length {n}")
    bits = seq.to_array().astype(np.int64)
    vals = _window_values(bits, k, window - k + 1)
    counts = np.bincount(vals, minlength=1 << k).astype(np.int64)
    return PatternCounts(k=k, window=window, counts=counts)


def normality_measure(seq: BitSequence, k: int, min_window: int | None = None) -> NormalityReport:
    """Worst deviation of k-pattern frequencies from 2^-k over prefixes.

    Maximizes |counts(S, M, k)[V] / M - 2^-k| over V and M in
    [min_window, N].  Ties keep the smallest window, then the smallest
    pattern value, so reports are deterministic.
    """
    n = len(seq)
    if k < 1:
        raise ValueError("pattern order k must be >= 1")
    if min_window is None:
        min_window = default_min_window(n)
    if min_window < k:
        raise WindowTooSmallError(f"min_window {min_window} shorter than pattern order {k}")
    if min_window > n:
        raise WindowExceedsSequenceError(f"min_window {min_window} exceeds sequence length {n}")

    bits = seq.to_array().astype(np.int64)
    total = n - k + 1
    vals = _window_values(bits, k, total)
    size = 1 << k
    target = 1.0 / size

    counts = np.bincount(vals[: min_window - k + 1], minlength=size).astype(np.int64)
    # histogram of counts lets the min/max count track in O(1) per step
    hist = np.bincount(counts, minlength=total + 2).astype(np.int64)
    lo = int(counts.min())
    hi = int(counts.max())

    best = -1.0
    best_v = 0
    best_m = min_window
    for m in range(min_window, n + 1):
        if m > min_window:
            v = int(vals[m - k])
            c = int(counts[v])
            counts[v] = c + 1
            hist[c] -= 1
            hist[c + 1] += 1
            if c + 1 > hi:
                hi = c + 1
            if c == lo and hist[c] == 0:
                while hist[lo] == 0:
                    lo += 1
        dev_hi = hi / m - target
        dev_lo = target - lo / m
        dev = dev_hi if dev_hi >= dev_lo else dev_lo
        if dev > best:
            best = dev
            best_m = m
            wanted = hi if dev_hi >= dev_lo else lo
            best_v = int(np.flatnonzero(counts == wanted)[0])
    return NormalityReport(k=k, value=float(best), pattern=best_v, window=best_m)


def correlation_exact(
    seq: BitSequence,
    k: int,
    max_lag: int | None = None,
    min_window: int | None = None,
    *,
    windows: str = "all",
    budget: float = 1e9,
    force: bool = False,
) -> CorrelationReport:
    """Exhaustive k-th order correlation maximum.

    Enumerates every strictly increasing lag vector with d_{k-1} <= max_lag
    and every window M in [min_window, N - d_{k-1}] (or only the maximal
    window per lag vector when ``windows="maximal"``).  Cost grows as
    N * C(max_lag, k-1); anything above ``budget`` elementary products is
    refused unless forced.

    Ties resolve to the lexicographically smallest (lags, window).
    """
    n = len(seq)
    if k < 2:
        raise ValueError("correlation order k must be >= 2")
    if max_lag is None:
        max_lag = default_max_lag(n)
    if not 1 <= max_lag <= n - 1:
        raise ValueError(f"max_lag {max_lag} outside [1, {n - 1}]")
    if min_window is None:
        min_window = default_min_window(n)
    if min_window < 1:
        raise ValueError("min_window must be >= 1")
    if windows not in ("all", "maximal"):
        raise ValueError(f"unknown window mode {windows!r}")

    n_vectors = comb(max_lag, k - 1)
    if n_vectors == 0:
        raise WindowTooSmallError(f"max_lag {max_lag} cannot host {k - 1} distinct lags")
    cost = float(n_vectors) * n
    if cost > budget and not force:
        raise BudgetExceededError(cost, budget)

    e = signed(seq).astype(np.int64)
    best = -1.0
    best_d: tuple[int, ...] | None = None
    best_m = 0
    for lag_vec in itertools.combinations(range(1, max_lag + 1), k - 1):
        d_max = lag_vec[-1]
        m_hi = n - d_max
        if m_hi < min_window:
            continue
        prod = e[:m_hi].copy()
        for d in lag_vec:
            prod *= e[d : d + m_hi]
        sums = np.cumsum(prod)
        if windows == "maximal":
            val = abs(int(sums[-1])) / m_hi
            m_at = m_hi
        else:
            seg = np.abs(sums[min_window - 1 :]) / np.arange(min_window, m_hi + 1)
            j = int(np.argmax(seg))
            val = float(seg[j])
            m_at = min_window + j
        if val > best:
            best = val
            best_d = lag_vec
            best_m = m_at
    if best_d is None:
        raise WindowTooSmallError(
            f"no lag vector admits a window of at least {min_window} bits"
        )
    return CorrelationReport(order=k, value=float(best), lags=best_d, window=best_m, mode="exact")


def correlation2_fast(seq: BitSequence, max_lag: int | None = None) -> CorrelationReport:
    """Order-2 correlation over maximal windows via FFT autocorrelation.

    For each lag t <= max_lag this evaluates the full-overlap window only:
    a(t) = |sum_{n<=N-t} e_n e_{n+t}| / (N - t).  The lag sums are integers,
    so the FFT output is rounded back to exact integer values; results are
    bit-for-bit identical to a direct summation.
    """
    n = len(seq)
    if max_lag is None:
        max_lag = default_max_lag(n)
    if not 1 <= max_lag <= n - 1:
        raise ValueError(f"max_lag {max_lag} outside [1, {n - 1}]")
    e = 1.0 - 2.0 * seq.to_array().astype(np.float64)
    nfft = 1 << int(2 * n - 1).bit_length()
    spec = np.fft.rfft(e, nfft)
    acf = np.fft.irfft(spec * spec.conj(), nfft)[: max_lag + 1]
    sums = np.rint(acf[1:]).astype(np.int64)
    denom = n - np.arange(1, max_lag + 1, dtype=np.int64)
    vals = np.abs(sums) / denom
    idx = int(np.argmax(vals))
    tau = idx + 1
    return CorrelationReport(
        order=2, value=float(vals[idx]), lags=(tau,), window=n - tau, mode="acf-fast"
    )


def bitmatch_autocorr(seq: BitSequence, lag: int) -> float:
    """Bit-match autocorrelation 2 * P(s_n = s_{n+lag}) - 1 at one lag."""
    n = len(seq)
    if not 1 <= lag <= n - 1:
        raise ValueError(f"lag {lag} outside [1, {n - 1}]")
    arr = seq.to_array()
    matches = int(np.count_nonzero(arr[: n - lag] == arr[lag:]))
    return 2.0 * matches / (n - lag) - 1.0


def allan_variance(series) -> float:
    """Two-sample variance of successive values of a real series."""
    arr = np.asarray(series, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 2:
        raise TooShortError("Allan variance needs at least two samples")
    d = np.diff(arr)
    return float((d @ d) / (2.0 * (arr.size - 1)))
