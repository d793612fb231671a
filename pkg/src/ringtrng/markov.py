"""Empirical high-order Markov chain fitting for bit sequences.

A memory-k chain conditions the next bit on the previous k-1 bits.  The
table is estimated from overlapping (stride-1) k-bit windows; contexts are
the window's first k-1 bits with the first bit most significant.  Counting
is raw by default: the band and deviation checks compare unsmoothed
frequencies, while entropy reporting can opt into Laplace smoothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bitseq import BitSequence
from .errors import TooShortError, UndefinedTableError

from .measures import _window_values


@dataclass(frozen=True)
class TransitionTable:
    """Next-bit counts and probability estimates per (k-1)-bit context.

    ``context_counts[c]`` is the number of times context c occurs with a
    successor bit, i.e. the row sum of ``next_counts``.  Contexts that never
    occur are flagged in ``observed`` and carry NaN probabilities.
    """

    memory: int
    next_counts: np.ndarray
    context_counts: np.ndarray
    probs: np.ndarray
    observed: np.ndarray


@dataclass(frozen=True)
class BandCheck:
    ok: bool
    half_width: float
    offenders: tuple[int, ...]
    within: np.ndarray


def fit_transition(seq: BitSequence, memory: int) -> TransitionTable:
    """Estimate the memory-k transition table from overlapping windows."""
    k = memory
    if not 2 <= k <= 16:
        raise ValueError("memory must be in [2, 16]")
    n = len(seq)
    if n < k:
        raise TooShortError(f"need at least {k} bits, got {n}")
    bits = seq.to_array().astype(np.int64)
    vals = _window_values(bits, k, n - k + 1)
    flat = np.bincount(vals, minlength=1 << k).astype(np.int64)
    next_counts = flat.reshape(1 << (k - 1), 2)
    context_counts = next_counts.sum(axis=1)
    observed = context_counts > 0
    probs = np.full_like(next_counts, np.nan, dtype=np.float64)
    rows = observed
    probs[rows] = next_counts[rows] / context_counts[rows, None]
    return TransitionTable(
        memory=k,
        next_counts=next_counts,
        context_counts=context_counts,
        probs=probs,
        observed=observed,
    )


def max_deviation(table: TransitionTable) -> float:
    """Largest |p(bit | context) - 1/2| over observed contexts."""
    if not table.observed.any():
        raise UndefinedTableError("no observed context")
    dev = np.abs(table.probs[table.observed] - 0.5)
    return float(dev.max())


def worst_transition(table: TransitionTable) -> tuple[int, int, float]:
    """(context, bit, probability) attaining the maximum deviation."""
    if not table.observed.any():
        raise UndefinedTableError("no observed context")
    dev = np.where(table.observed[:, None], np.abs(table.probs - 0.5), -1.0)
    flat = int(np.argmax(dev))
    ctx, bit = divmod(flat, 2)
    return ctx, bit, float(table.probs[ctx, bit])


def sqrtn_band_check(table: TransitionTable, n: int) -> BandCheck:
    """Are all observed probabilities within 1/2 +/- k/sqrt(N)?"""
    half_width = table.memory / math.sqrt(n)
    dev = np.abs(table.probs - 0.5)
    within = np.ones(table.probs.shape[0], dtype=bool)
    obs = table.observed
    within[obs] = np.nanmax(dev[obs], axis=1) <= half_width
    offenders = tuple(int(c) for c in np.flatnonzero(obs & ~within))
    return BandCheck(ok=not offenders, half_width=half_width, offenders=offenders, within=within)


def coverage(table: TransitionTable) -> float:
    """Fraction of contexts that were observed at least once."""
    return float(np.count_nonzero(table.observed)) / table.observed.size


def _binary_entropy(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0.0, 1.0)
    out = np.zeros_like(p)
    inner = (p > 0.0) & (p < 1.0)
    pi = p[inner]
    out[inner] = -pi * np.log2(pi) - (1.0 - pi) * np.log2(1.0 - pi)
    return out


def conditional_entropy(table: TransitionTable, smoothing: bool = False) -> float:
    """Context-weighted binary entropy of the next bit, in bits per bit.

    ``smoothing`` applies an add-1/2 correction to the next-bit estimates,
    useful when sparse contexts would otherwise contribute hard zeros.
    """
    obs = table.observed
    if not obs.any():
        raise UndefinedTableError("no observed context")
    rows = table.context_counts[obs].astype(np.float64)
    if smoothing:
        p1 = (table.next_counts[obs, 1] + 0.5) / (rows + 1.0)
    else:
        p1 = table.next_counts[obs, 1] / rows
    weights = rows / rows.sum()
    return float(np.sum(weights * _binary_entropy(p1)))
