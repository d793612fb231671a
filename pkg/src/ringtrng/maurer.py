"""Maurer's universal statistical test.

The statistic is the average log2 distance between repeated b-bit blocks
over L test blocks, after Q initialization blocks.  Reference mean and
variance for an ideal source come from the exact geometric spacing
distribution, summed to a proven tail bound rather than hard-coded from
tables; the finite-L variance correction follows the standard
Coron-Naccache form c(L, b) = 0.7 - 0.8/b + (4 + 32/b) L^(-3/b) / 15.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bitseq import BitSequence
from .errors import TooShortError

#: series truncation: stop once the geometric tail bound drops below this
_TAIL_EPS = 1e-10
_CHUNK = 1 << 14


@dataclass(frozen=True)
class MaurerParams:
    """Block length b, initialization blocks Q, test blocks L."""

    block_length: int = 7
    init_blocks: int = 1280
    test_blocks: int = 1000

    def __post_init__(self):
        if not 1 <= self.block_length <= 16:
            raise ValueError("block_length must be in [1, 16]")
        if self.init_blocks < 1:
            raise ValueError("init_blocks must be >= 1")
        if self.test_blocks < 1:
            raise ValueError("test_blocks must be >= 1")

    @property
    def required_bits(self) -> int:
        return (self.init_blocks + self.test_blocks) * self.block_length

    @classmethod
    def for_length(cls, n: int, block_length: int = 7, init_blocks: int = 1280) -> "MaurerParams":
        """Use everything after initialization as test blocks."""
        test = n // block_length - init_blocks
        if test < 1:
            raise TooShortError(
                f"{n} bits leave no test blocks at b={block_length}, Q={init_blocks}"
            )
        return cls(block_length, init_blocks, test)


@dataclass(frozen=True)
class MaurerReport:
    params: MaurerParams
    f_tu: float
    expected: float
    variance: float
    z: float
    passed: bool
    fallback_blocks: int


def block_indices(seq: BitSequence, block_length: int) -> np.ndarray:
    """Non-overlapping b-bit blocks as integers, first bit most significant.

    Trailing bits that do not fill a block are discarded.
    """
    n = len(seq)
    b = block_length
    if n < b:
        raise TooShortError(f"{n} bits cannot form a {b}-bit block")
    count = n // b
    bits = seq.to_array()[: count * b].astype(np.int64).reshape(count, b)
    weights = (1 << np.arange(b - 1, -1, -1)).astype(np.int64)
    return bits @ weights


def _spacing_scan(blocks: np.ndarray, q: int, l: int, alphabet: int) -> tuple[float, int]:
    """Mean log2 spacing over the test segment, plus fallback count.

    A block value never seen before block n contributes log2(n) (1-based
    numbering), which is also what the recurrence gives a value whose last
    occurrence table entry is empty.
    """
    last = [0] * alphabet
    vals = blocks.tolist()
    for idx in range(q):
        last[vals[idx]] = idx + 1
    acc = 0.0
    fallback = 0
    log2 = math.log2
    for idx in range(q, q + l):
        number = idx + 1
        v = vals[idx]
        prev = last[v]
        if prev:
            acc += log2(number - prev)
        else:
            acc += log2(number)
            fallback += 1
        last[v] = number
    return acc / l, fallback


def ftu(seq: BitSequence, params: MaurerParams) -> float:
    """The test statistic itself; see :func:`maurer_test` for the verdict."""
    b = params.block_length
    need = params.required_bits
    if len(seq) < need:
        raise TooShortError(f"need {need} bits, got {len(seq)}")
    blocks = block_indices(seq, b)
    value, _ = _spacing_scan(blocks, params.init_blocks, params.test_blocks, 1 << b)
    return value


@lru_cache(maxsize=None)
def _spacing_moment(block_length: int, power: int) -> float:
    """sum_{i>=1} p (1-p)^(i-1) (log2 i)^power with p = 2^-b.

    Truncated once a tangent-line geometric tail bound is below _TAIL_EPS,
    so the returned value is provably within _TAIL_EPS of the full series.
    """
    p = 2.0 ** -block_length
    q = 1.0 - p
    total = 0.0
    start = 1
    while True:
        i = np.arange(start, start + _CHUNK, dtype=np.float64)
        total += float(np.sum(p * q ** (i - 1.0) * np.log2(i) ** power))
        start += _CHUNK
        last = start - 1
        # log2(i) <= a + s*(i - last - 1) for i > last, with the tangent at last+1
        a = math.log2(last + 1)
        s = 1.0 / ((last + 1) * math.log(2.0))
        qi = q ** last
        if power == 1:
            tail = qi * (a + s * q / p)
        else:
            tail = qi * (a * a + 2.0 * a * s * q / p + s * s * q * (1.0 + q) / (p * p))
        if tail < _TAIL_EPS:
            return total


def expected_ftu(block_length: int) -> float:
    """Ideal-source mean of the statistic for the given block length."""
    if not 1 <= block_length <= 16:
        raise ValueError("block_length must be in [1, 16]")
    return _spacing_moment(block_length, 1)


def var_single(block_length: int) -> float:
    """Ideal-source variance of a single block's log2 spacing."""
    if not 1 <= block_length <= 16:
        raise ValueError("block_length must be in [1, 16]")
    mean = _spacing_moment(block_length, 1)
    return _spacing_moment(block_length, 2) - mean * mean


def coron_factor(test_blocks: int, block_length: int) -> float:
    """Finite-L variance correction factor c(L, b)."""
    l, b = test_blocks, block_length
    return 0.7 - 0.8 / b + (4.0 + 32.0 / b) * l ** (-3.0 / b) / 15.0


def variance_ftu(block_length: int, test_blocks: int) -> float:
    """Variance of the L-block average statistic for an ideal source."""
    c = coron_factor(test_blocks, block_length)
    return c * c * var_single(block_length) / test_blocks


def maurer_test(
    seq: BitSequence,
    params: MaurerParams | None = None,
    z_threshold: float = 2.0,
) -> MaurerReport:
    """Run the test and report the Z score against the ideal reference.

    Default parameters are b=7, Q=1280 and L spanning the rest of the
    sequence; |Z| below ``z_threshold`` passes.  A block value that never
    appeared during initialization is not an error: the distance falls back
    to the block number and the report counts how often that happened.
    """
    if params is None:
        params = MaurerParams.for_length(len(seq))
    b = params.block_length
    if len(seq) < params.required_bits:
        raise TooShortError(f"need {params.required_bits} bits, got {len(seq)}")
    blocks = block_indices(seq, b)
    value, fallback = _spacing_scan(blocks, params.init_blocks, params.test_blocks, 1 << b)
    mean = expected_ftu(b)
    var = variance_ftu(b, params.test_blocks)
    z = (value - mean) / math.sqrt(var)
    return MaurerReport(
        params=params,
        f_tu=value,
        expected=mean,
        variance=var,
        z=z,
        passed=abs(z) < z_threshold,
        fallback_blocks=fallback,
    )
