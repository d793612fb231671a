import math

import numpy as np
import pytest

from ringtrng import (
    BitSequence,
    alon_bound,
    check_ftu_bounds,
    check_transition_deviation,
    ftu_bounds_from_correlation,
    parse_bits,
    schmidt_bound,
    transition_deviation_bound,
    xor_accumulation_estimate,
)
from ringtrng.errors import PreconditionFailedError
from ringtrng.maurer import MaurerParams

from conftest import random_seq


def test_schmidt_values():
    assert schmidt_bound(2, 100_000) == pytest.approx(0.0215, abs=5e-4)
    assert schmidt_bound(8, 1_000_000) == pytest.approx(
        math.sqrt(16 * math.log(1e6) / 1e6), abs=1e-12
    )
    assert schmidt_bound(8, 1_000_000) == pytest.approx(0.01487, abs=2e-5)
    # decreasing in N for fixed k
    values = [schmidt_bound(2, n) for n in (10, 100, 10_000, 1_000_000)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_alon_values():
    assert alon_bound(2, 100_000) == pytest.approx(0.0759, abs=5e-4)
    assert alon_bound(2, 100) == pytest.approx(5 * math.sqrt(2 * math.log(100) / 100), abs=1e-12)
    assert alon_bound(2, 100) > 1.0  # vacuous at tiny N


def test_bound_ratio_constant():
    for k in (2, 3, 8):
        for n in (100, 10_000, 10 ** 6):
            assert alon_bound(k, n) / schmidt_bound(k, n) == pytest.approx(
                5 / math.sqrt(2), abs=1e-12
            )


def test_transition_deviation_bound_values():
    assert transition_deviation_bound(2, 0.0) == 0.0
    assert transition_deviation_bound(2, 0.1) == pytest.approx(0.1 / 0.9, abs=1e-12)
    assert transition_deviation_bound(8, 0.01) == pytest.approx(0.64 / 0.36, abs=1e-12)


def test_transition_deviation_bound_domain():
    with pytest.raises(PreconditionFailedError):
        transition_deviation_bound(8, 1 / 64)
    with pytest.raises(PreconditionFailedError):
        transition_deviation_bound(2, -0.1)
    # strictly increasing on its domain
    grid = np.linspace(0.0, 0.9, 40)
    values = [transition_deviation_bound(2, c) for c in grid]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_xor_accumulation_estimate():
    assert xor_accumulation_estimate(0.37, 1) == 0.37
    assert xor_accumulation_estimate(0.5, 4) == 0.0625
    assert xor_accumulation_estimate(1.0, 100) == 1.0
    with pytest.raises(ValueError):
        xor_accumulation_estimate(1.5, 2)


def test_ftu_bounds_ideal_point():
    k, l, m = 2, 1000, 2000
    lower, upper = ftu_bounds_from_correlation(k, 0.0, l, m)
    assert lower == pytest.approx((2 ** k / (m * 2.0 ** -k)) * math.log2(l * 2 ** k / m))
    assert upper == pytest.approx(2 ** k * (math.log2(l / m) + k))
    assert lower <= upper


def test_ftu_bounds_finite_case():
    lower, upper = ftu_bounds_from_correlation(2, 0.05, 1000, 2000)
    assert math.isfinite(lower) and math.isfinite(upper)
    assert lower <= upper


def test_ftu_bounds_preconditions():
    with pytest.raises(PreconditionFailedError):
        ftu_bounds_from_correlation(2, 0.25, 1000, 2000)  # C >= 2^-k
    with pytest.raises(PreconditionFailedError):
        ftu_bounds_from_correlation(2, 0.6, 1000, 2000)  # C >= 1/2
    with pytest.raises(PreconditionFailedError):
        ftu_bounds_from_correlation(2, 0.2, 10, 7168)  # ratio below 1


def test_ftu_bounds_order_on_grid():
    violations = []
    for k in (2, 3, 4):
        for ck in (0.0, 0.01, 0.02, 0.05):
            for l in (256, 1024, 8192):
                for m in (512, 4096, 16384):
                    try:
                        lower, upper = ftu_bounds_from_correlation(k, ck, l, m)
                    except PreconditionFailedError:
                        continue
                    if lower > upper:
                        violations.append((k, ck, l, m, lower, upper))
    assert violations == []


def test_check_transition_deviation_all_zero_precondition_fails():
    result = check_transition_deviation(parse_bits("0" * 64), 2)
    assert not result.precondition_ok
    assert result.satisfied is None
    assert result.correlation == 1.0


def test_check_transition_deviation_random_holds(rng):
    for _ in range(5):
        seq = random_seq(rng, 4096)
        result = check_transition_deviation(seq, 2)
        assert result.precondition_ok
        assert result.satisfied


def test_check_transition_deviation_biased_holds(rng):
    seq = BitSequence.from_array((rng.random(4096) < 0.9).astype(np.uint8))
    result = check_transition_deviation(seq, 2)
    assert result.precondition_ok
    assert result.satisfied


def test_check_reports_witness_when_bound_fails():
    # with an aggressive window floor the correlation of this sequence is 0
    # while its transition table is fully deterministic; the checker must
    # surface the offending context instead of hiding it
    seq = parse_bits("100")
    result = check_transition_deviation(seq, 2, min_window=2, max_lag=1)
    assert result.precondition_ok
    assert result.satisfied is False
    assert "context" in result.witness
    assert result.measured_value == 0.5


def test_check_ftu_bounds_random(rng):
    params = MaurerParams(2, 64, 512)
    held = 0
    for _ in range(20):
        seq = random_seq(rng, params.required_bits)
        result = check_ftu_bounds(seq, params, max_lag=10)
        if result.precondition_ok:
            held += 1
            assert result.satisfied
            lower, upper = result.bound_value
            assert lower <= result.measured_value <= upper
    assert held > 0


def test_check_ftu_bounds_all_zero_precondition_fails():
    params = MaurerParams(2, 8, 32)
    result = check_ftu_bounds(parse_bits("0" * params.required_bits), params)
    assert not result.precondition_ok
