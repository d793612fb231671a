import math

import numpy as np
import pytest

from ringtrng import (
    BitSequence,
    block_indices,
    expected_ftu,
    ftu,
    maurer_test,
    parse_bits,
    var_single,
    variance_ftu,
)
from ringtrng.errors import TooShortError
from ringtrng.maurer import MaurerParams, coron_factor

from conftest import random_seq


def series_oracle(b, power, terms=4_000_000):
    """Plain chunk-free summation of the spacing moment, for cross-checking."""
    p = 2.0 ** -b
    i = np.arange(1, terms + 1, dtype=np.float64)
    return float(np.sum(p * (1.0 - p) ** (i - 1.0) * np.log2(i) ** power))


@pytest.mark.parametrize(
    "text,b,expected",
    [
        ("000101", 2, [0, 1, 1]),
        ("1111", 2, [3, 3]),
        ("01101001", 3, [3, 2]),  # trailing 2 bits dropped
    ],
)
def test_block_indices(text, b, expected):
    assert list(block_indices(parse_bits(text), b)) == expected


def test_block_indices_too_short():
    with pytest.raises(TooShortError):
        block_indices(parse_bits("01"), 3)


def test_ftu_hand_simulated_recurrence():
    # blocks 00 01 00 01 00 01 with Q=2: every test block repeats 2 back
    seq = parse_bits("000100010001")
    value = ftu(seq, MaurerParams(2, 2, 4))
    assert value == pytest.approx(1.0)


def test_ftu_all_zero_is_zero():
    seq = parse_bits("0" * 600)
    assert ftu(seq, MaurerParams(2, 10, 50)) == 0.0


def test_ftu_random_matches_reference_mean(rng):
    seq = random_seq(rng, 7 * (1280 + 10_000))
    value = ftu(seq, MaurerParams(7, 1280, 10_000))
    assert abs(value - expected_ftu(7)) < 0.06


def test_ftu_range_property(rng):
    for _ in range(10):
        params = MaurerParams(3, 12, 40)
        seq = random_seq(rng, params.required_bits)
        value = ftu(seq, params)
        assert 0.0 <= value <= math.log2(params.init_blocks + params.test_blocks)


def test_ftu_invariant_under_block_relabeling(rng):
    b = 3
    params = MaurerParams(b, 30, 200)
    seq = random_seq(rng, params.required_bits)
    blocks = block_indices(seq, b)
    perm = rng.permutation(1 << b)
    relabeled_bits = []
    for v in perm[blocks]:
        relabeled_bits.extend((int(v) >> (b - 1 - j)) & 1 for j in range(b))
    relabeled = BitSequence.from_bits(relabeled_bits)
    assert ftu(relabeled, params) == pytest.approx(ftu(seq, params), abs=1e-12)


def test_expected_ftu_values():
    assert expected_ftu(1) == pytest.approx(series_oracle(1, 1), abs=1e-9)
    assert expected_ftu(1) == pytest.approx(0.7326, abs=1e-3)
    assert expected_ftu(7) == pytest.approx(6.1962507, abs=1e-4)


def test_expected_ftu_monotone_in_block_length():
    values = [expected_ftu(b) for b in range(1, 17)]
    assert all(values[i + 1] > values[i] for i in range(15))


def test_var_single_value():
    assert var_single(7) == pytest.approx(3.125, abs=0.01)
    oracle = series_oracle(7, 2) - series_oracle(7, 1) ** 2
    assert var_single(7) == pytest.approx(oracle, abs=1e-7)


def test_coron_factor_limit():
    # as L grows the correction tends to 0.7 - 0.8/b
    assert coron_factor(10 ** 30, 7) == pytest.approx(0.7 - 0.8 / 7, abs=1e-9)
    assert variance_ftu(7, 10_000) > 0.0


def test_maurer_all_zero_fails_hard():
    seq = parse_bits("0" * (7 * 2280))
    report = maurer_test(seq, MaurerParams(7, 1280, 1000))
    assert report.f_tu == 0.0
    assert report.z < -2.0
    assert not report.passed


def test_maurer_random_pass_rate(rng):
    passed = 0
    for _ in range(100):
        seq = random_seq(rng, 100_000)
        passed += maurer_test(seq).passed
    assert passed >= 90


def test_maurer_fallback_counted():
    # Q=1 leaves three of the four 2-bit patterns unseen at test time
    seq = parse_bits("00011011")
    report = maurer_test(seq, MaurerParams(2, 1, 3), z_threshold=2.0)
    assert report.fallback_blocks == 3


def test_params_validation():
    with pytest.raises(ValueError):
        MaurerParams(0, 10, 10)
    with pytest.raises(ValueError):
        MaurerParams(17, 10, 10)
    with pytest.raises(TooShortError):
        MaurerParams.for_length(100, 7, 1280)
    params = MaurerParams.for_length(100_000)
    assert params.test_blocks == 100_000 // 7 - 1280
