"""Packed binary sequences, run statistics, and sequence combination.

A :class:`BitSequence` is immutable and stores its bits packed eight per
byte (LSB first within a byte), so 10^5..10^6-bit sequences stay cheap to
copy, hash and scan.  All public operations are index based and never
expose the packing.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import EmptySequenceError, LengthMismatchError, MalformedBitError

PACKED_MAGIC = b"RTL1"

_WHITESPACE = frozenset(b" \t\n\r\x0b\x0c")


class BitSequence:
    """Immutable sequence of bits, packed LSB-first eight per byte."""

    __slots__ = ("_data", "_n")

    def __init__(self, packed: bytes, n: int):
        if n < 1:
            raise EmptySequenceError("a bit sequence needs at least one bit")
        need = (n + 7) // 8
        if len(packed) != need:
            raise ValueError(f"expected {need} payload bytes for {n} bits, got {len(packed)}")
        if n % 8:
            # normalize padding so byte-level equality and XOR are safe
            mask = (1 << (n % 8)) - 1
            packed = packed[:-1] + bytes([packed[-1] & mask])
        self._data = bytes(packed)
        self._n = n

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitSequence":
        arr = np.fromiter((int(b) for b in bits), dtype=np.uint8)
        return cls.from_array(arr)

    @classmethod
    def from_array(cls, arr) -> "BitSequence":
        arr = np.ascontiguousarray(arr, dtype=np.uint8)
        if arr.ndim != 1 or arr.size == 0:
            raise EmptySequenceError("need a non-empty 1-d array of bits")
        if arr.max(initial=0) > 1:
            raise ValueError("array elements must be 0 or 1")
        packed = np.packbits(arr, bitorder="little").tobytes()
        return cls(packed, arr.size)

    @property
    def packed(self) -> bytes:
        return self._data

    def to_array(self) -> np.ndarray:
        """Bits as a uint8 array of 0/1 values."""
        raw = np.frombuffer(self._data, dtype=np.uint8)
        return np.unpackbits(raw, count=self._n, bitorder="little")

    def prefix(self, m: int) -> "BitSequence":
        """First m bits as a new sequence."""
        if not 1 <= m <= self._n:
            raise ValueError(f"prefix length {m} outside [1, {self._n}]")
        if m == self._n:
            return self
        return BitSequence.from_array(self.to_array()[:m])

    def __len__(self) -> int:
        return self._n

    def __getitem__(self, i: int) -> int:
        if i < 0:
            i += self._n
        if not 0 <= i < self._n:
            raise IndexError("bit index out of range")
        return (self._data[i >> 3] >> (i & 7)) & 1

    def __iter__(self):
        return iter(self.to_array())

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitSequence):
            return NotImplemented
        return self._n == other._n and self._data == other._data

    def __hash__(self) -> int:
        return hash((self._n, self._data))

    def __repr__(self) -> str:
        if self._n <= 32:
            body = "".join(str(b) for b in self.to_array())
            return f"BitSequence('{body}')"
        return f"BitSequence(n={self._n})"


@dataclass(frozen=True)
class RunStats:
    """Maximal-run decomposition of a sequence.

    ``sd`` is the population standard deviation, matching the analytic
    reference value sqrt(2) for an ideal source.
    """

    lengths: np.ndarray
    mean: float
    sd: float
    count: int


def parse_bits(text: str) -> BitSequence:
    """Read '0'/'1' characters, skipping whitespace.

    Raises MalformedBitError with the character offset of the first
    offending character, or EmptySequenceError when no bits remain.
    """
    try:
        raw = text.encode("ascii")
    except UnicodeEncodeError as exc:
        raise MalformedBitError(exc.start, text[exc.start]) from None
    buf = np.frombuffer(raw, dtype=np.uint8)
    is0 = buf == ord("0")
    is1 = buf == ord("1")
    isws = np.isin(buf, np.frombuffer(bytes(_WHITESPACE), dtype=np.uint8))
    bad = ~(is0 | is1 | isws)
    if bad.any():
        pos = int(np.argmax(bad))
        raise MalformedBitError(pos, text[pos])
    keep = is0 | is1
    if not keep.any():
        raise EmptySequenceError("input contains no bits")
    return BitSequence.from_array(is1[keep].astype(np.uint8))


def signed(seq: BitSequence) -> np.ndarray:
    """The +/-1 lift: 0 -> +1, 1 -> -1, as an int8 array."""
    return (1 - 2 * seq.to_array().astype(np.int8)).astype(np.int8)


def runs(seq: BitSequence) -> RunStats:
    """Lengths of maximal blocks of identical consecutive bits."""
    arr = seq.to_array()
    change = np.flatnonzero(arr[1:] != arr[:-1])
    bounds = np.concatenate(([0], change + 1, [arr.size]))
    lengths = np.diff(bounds).astype(np.int64)
    return RunStats(
        lengths=lengths,
        mean=float(lengths.mean()),
        sd=float(lengths.std()),
        count=int(lengths.size),
    )


def xor_sequences(seqs: list[BitSequence]) -> BitSequence:
    """Element-wise XOR of equal-length sequences."""
    if not seqs:
        raise EmptySequenceError("need at least one sequence")
    n = len(seqs[0])
    mismatched = [i for i, s in enumerate(seqs) if len(s) != n]
    if mismatched:
        raise LengthMismatchError(mismatched)
    acc = np.frombuffer(seqs[0].packed, dtype=np.uint8).copy()
    for s in seqs[1:]:
        acc ^= np.frombuffer(s.packed, dtype=np.uint8)
    return BitSequence(acc.tobytes(), n)


# --- file formats ---------------------------------------------------------


def write_bits_text(seq: BitSequence, path, width: int = 64) -> None:
    arr = seq.to_array()
    chars = np.where(arr == 1, ord("1"), ord("0")).astype(np.uint8).tobytes()
    lines = [chars[i : i + width] for i in range(0, len(chars), width)]
    Path(path).write_bytes(b"\n".join(lines) + b"\n")


def read_bits_text(path) -> BitSequence:
    return parse_bits(Path(path).read_text())


def write_bits_packed(seq: BitSequence, path) -> None:
    """Magic 'RTL1', then bit count as little-endian u64, then payload."""
    header = PACKED_MAGIC + struct.pack("<Q", len(seq))
    Path(path).write_bytes(header + seq.packed)


def read_bits_packed(path) -> BitSequence:
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[:4] != PACKED_MAGIC:
        raise ValueError(f"{path}: not a packed bit file (bad magic)")
    (n,) = struct.unpack("<Q", raw[4:12])
    payload = raw[12:]
    if len(payload) != (n + 7) // 8:
        raise ValueError(f"{path}: payload length does not match bit count {n}")
    return BitSequence(payload, n)


def load_bits(path) -> BitSequence:
    """Read either format, sniffing the packed magic."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == PACKED_MAGIC:
        return read_bits_packed(path)
    return read_bits_text(path)


def save_bits(seq: BitSequence, path, fmt: str = "text") -> None:
    if fmt == "text":
        write_bits_text(seq, path)
    elif fmt == "packed":
        write_bits_packed(seq, path)
    else:
        raise ValueError(f"unknown bit file format {fmt!r}")
