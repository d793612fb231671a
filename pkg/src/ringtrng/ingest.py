"""Counter-trace ingestion and counter-to-bit conversion.

Raw acquisitions are newline-delimited unsigned decimal integers, one
counter value per reference period; blank lines are ignored.  Values must
fit in 64 bits (real time-to-digital counts are small).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bitseq import BitSequence
from .errors import EmptySequenceError, LengthMismatchError, MalformedCounterError

_LIMIT = 1 << 64


@dataclass(frozen=True)
class CounterTrace:
    values: np.ndarray
    source: str = ""

    def __len__(self) -> int:
        return int(self.values.size)


def read_counters(path) -> CounterTrace:
    """Parse one counter per line; line numbers in errors are 1-based."""
    values: list[int] = []
    with open(path, "r") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if not text.isdigit():
                raise MalformedCounterError(line_no, text)
            value = int(text)
            if value >= _LIMIT:
                raise MalformedCounterError(line_no, text)
            values.append(value)
    if not values:
        raise EmptySequenceError(f"{path}: no counter values")
    return CounterTrace(np.array(values, dtype=np.uint64), source=str(path))


def write_counters(values, path) -> None:
    arr = np.asarray(values)
    Path(path).write_text("\n".join(str(int(v)) for v in arr) + "\n")


def counters_to_bits(trace: CounterTrace) -> BitSequence:
    """Least significant bit of each counter value."""
    if len(trace) == 0:
        raise EmptySequenceError("empty counter trace")
    return BitSequence.from_array((trace.values & np.uint64(1)).astype(np.uint8))


def differential_bits(a: CounterTrace, b: CounterTrace) -> BitSequence:
    """XOR of the two traces' count LSBs."""
    if len(a) != len(b):
        raise LengthMismatchError((0, 1), f"traces differ in length: {len(a)} vs {len(b)}")
    lsb = ((a.values ^ b.values) & np.uint64(1)).astype(np.uint8)
    return BitSequence.from_array(lsb)
