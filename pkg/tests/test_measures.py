import itertools

import numpy as np
import pytest

from ringtrng import (
    BitSequence,
    allan_variance,
    bitmatch_autocorr,
    correlation2_fast,
    correlation_exact,
    normality_measure,
    parse_bits,
    pattern_counts,
    signed,
)
from ringtrng.errors import (
    BudgetExceededError,
    TooShortError,
    WindowExceedsSequenceError,
    WindowTooSmallError,
)
from ringtrng.measures import default_max_lag, default_min_window

from conftest import all_sequences, random_seq


# --- independent oracles ---------------------------------------------------


def brute_pattern_counts(bits, window, k):
    counts = [0] * (1 << k)
    for start in range(window - k + 1):
        value = 0
        for j in range(k):
            value = (value << 1) | bits[start + j]
        counts[value] += 1
    return counts


def brute_normality(bits, k, min_window):
    best = -1.0
    for m in range(min_window, len(bits) + 1):
        counts = brute_pattern_counts(bits, m, k)
        for value in counts:
            best = max(best, abs(value / m - 2.0 ** -k))
    return best


def brute_correlation(bits, k, max_lag, min_window, maximal_only=False):
    e = [1 - 2 * b for b in bits]
    n = len(e)
    best = -1.0
    for lag_vec in itertools.combinations(range(1, max_lag + 1), k - 1):
        m_hi = n - lag_vec[-1]
        if m_hi < min_window:
            continue
        windows = [m_hi] if maximal_only else range(min_window, m_hi + 1)
        for m in windows:
            total = 0
            for idx in range(m):
                term = e[idx]
                for d in lag_vec:
                    term *= e[idx + d]
                total += term
            best = max(best, abs(total) / m)
    return best


# --- pattern counts --------------------------------------------------------


def test_pattern_counts_hand_cases():
    pc = pattern_counts(parse_bits("0101"), 4, 2)
    assert pc.counts[0b01] == 2
    assert pc.counts[0b10] == 1
    assert pc.counts[0b00] == 0
    assert pc.counts[0b11] == 0

    pc = pattern_counts(parse_bits("00000000"), 8, 3)
    assert pc.counts[0] == 6
    assert pc.counts[1:].sum() == 0

    pc = pattern_counts(parse_bits("01101001"), 8, 2)
    assert list(pc.counts) == [1, 3, 2, 1]


def test_pattern_counts_against_oracle(rng):
    for _ in range(30):
        n = int(rng.integers(4, 40))
        seq = random_seq(rng, n)
        bits = seq.to_array().tolist()
        k = int(rng.integers(1, 5))
        window = int(rng.integers(k, n + 1))
        pc = pattern_counts(seq, window, k)
        assert list(pc.counts) == brute_pattern_counts(bits, window, k)
        assert pc.counts.sum() == window - k + 1


def test_pattern_counts_errors():
    seq = parse_bits("0101")
    with pytest.raises(WindowTooSmallError):
        pattern_counts(seq, 1, 2)
    with pytest.raises(WindowExceedsSequenceError):
        pattern_counts(seq, 5, 2)


# --- normality measure -----------------------------------------------------


def test_normality_all_zero_order1():
    seq = parse_bits("0" * 20)
    rep = normality_measure(seq, 1, min_window=20)
    assert rep.value == pytest.approx(0.5)
    assert rep.pattern == 0


def test_normality_alternating():
    # windows of the full 16-bit prefix: pattern 01 appears 8 times in 15
    rep = normality_measure(parse_bits("0101" * 4), 2, min_window=16)
    assert rep.value == pytest.approx(8 / 16 - 0.25)
    assert rep.pattern == 0b01
    assert rep.window == 16


def test_normality_against_oracle(rng):
    for _ in range(25):
        n = int(rng.integers(6, 36))
        seq = random_seq(rng, n)
        k = int(rng.integers(1, 4))
        min_window = int(rng.integers(k, n + 1))
        rep = normality_measure(seq, k, min_window=min_window)
        oracle = brute_normality(list(seq.to_array()), k, min_window)
        assert rep.value == pytest.approx(oracle, abs=1e-12)
        assert rep.value <= 1.0 - 2.0 ** -k + 1e-12


def test_normality_random_full_window(rng):
    # at the full-sequence window random sources sit close to 2^-k
    hits = 0
    for _ in range(100):
        seq = random_seq(rng, 100_000)
        rep = normality_measure(seq, 2, min_window=100_000)
        hits += rep.value < 0.01
    assert hits >= 95


# --- exact correlation -----------------------------------------------------


def test_correlation_exact_antiperiodic_prefix():
    # e_{n+4} = -e_n holds on this prefix, so lag 4 scores 1 at window 4
    seq = parse_bits("01101001")
    rep = correlation_exact(seq, 2, max_lag=4, min_window=4)
    assert rep.value == 1.0
    assert rep.lags == (4,)
    assert rep.window == 4


def test_correlation_exact_all_zero():
    for k in (2, 3):
        rep = correlation_exact(parse_bits("0" * 12), k, max_lag=5, min_window=3)
        assert rep.value == 1.0


def test_correlation_exact_against_oracle(rng):
    for _ in range(20):
        n = int(rng.integers(6, 17))
        seq = random_seq(rng, n)
        bits = seq.to_array().tolist()
        for k in (2, 3):
            max_lag = int(rng.integers(k - 1, n - 1))
            min_window = int(rng.integers(1, max(2, n // 2)))
            try:
                rep = correlation_exact(seq, k, max_lag=max_lag, min_window=min_window)
            except WindowTooSmallError:
                assert brute_correlation(bits, k, max_lag, min_window) == -1.0
                continue
            oracle = brute_correlation(bits, k, max_lag, min_window)
            assert rep.value == pytest.approx(oracle, abs=1e-12)
            assert 0.0 <= rep.value <= 1.0
            assert rep.window + rep.lags[-1] <= n
            assert all(a < b for a, b in zip(rep.lags, rep.lags[1:]))


def test_correlation_exact_budget():
    seq = parse_bits("01" * 64)
    with pytest.raises(BudgetExceededError):
        correlation_exact(seq, 6, max_lag=60, min_window=2, budget=1e6)


def test_correlation_tie_break_prefers_smallest_lags():
    # both lags reach the same value; the report must pick the smaller one
    seq = parse_bits("0101")
    rep = correlation_exact(seq, 2, max_lag=3, min_window=1)
    assert rep.value == 1.0
    assert rep.lags == (1,)
    assert rep.window == 1


# --- fast order-2 correlation ----------------------------------------------


def test_correlation2_fast_alternating():
    rep = correlation2_fast(parse_bits("01" * 32), max_lag=32)
    assert rep.value == 1.0
    assert rep.lags == (1,)


def test_correlation2_fast_equals_maximal_window_oracle(rng):
    for _ in range(60):
        n = int(rng.integers(4, 65))
        seq = random_seq(rng, n)
        e = signed(seq).astype(np.int64)
        max_lag = n - 1
        rep = correlation2_fast(seq, max_lag=max_lag)
        vals = [abs(int(np.dot(e[: n - t], e[t:]))) / (n - t) for t in range(1, max_lag + 1)]
        best = max(vals)
        assert rep.value == best  # exact float equality via integer rounding
        assert rep.lags[0] == 1 + vals.index(best)


def test_correlation2_fast_never_exceeds_exact(rng):
    # the fast scan searches a subset (maximal windows only) of the exact space
    for _ in range(20):
        n = int(rng.integers(8, 40))
        seq = random_seq(rng, n)
        fast = correlation2_fast(seq, max_lag=n - 1)
        exact = correlation_exact(seq, 2, max_lag=n - 1, min_window=1)
        assert fast.value <= exact.value + 1e-12


def test_correlation2_fast_reversal_symmetric(rng):
    for _ in range(10):
        seq = random_seq(rng, 256)
        rev = BitSequence.from_array(seq.to_array()[::-1])
        a = correlation2_fast(seq, max_lag=128)
        b = correlation2_fast(rev, max_lag=128)
        assert a.value == b.value


def test_defaults():
    assert default_min_window(100_000) == 50_000
    assert default_min_window(10) == 10
    assert default_max_lag(100_000) == 50_000


# --- bit-match autocorrelation ---------------------------------------------


def test_bitmatch_hand_cases():
    assert bitmatch_autocorr(parse_bits("0000"), 2) == 1.0
    assert bitmatch_autocorr(parse_bits("010101"), 1) == -1.0


def test_bitmatch_equals_signed_lag_sum():
    for n in range(2, 13):
        for seq in all_sequences(n):
            e = signed(seq).astype(int)
            for lag in range(1, n):
                expected = float(np.dot(e[: n - lag], e[lag:])) / (n - lag)
                assert bitmatch_autocorr(seq, lag) == pytest.approx(expected, abs=1e-12)


# --- Allan variance ---------------------------------------------------------


def test_allan_variance_cases():
    assert allan_variance([5.0] * 10) == 0.0
    assert allan_variance([0.0, 1.0] * 8) == pytest.approx(0.5)
    with pytest.raises(TooShortError):
        allan_variance([1.0])
