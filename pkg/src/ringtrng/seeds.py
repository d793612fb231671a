"""Deterministic 64-bit seed derivation.

Every derived random stream in the toolkit is seeded through ``mix64``, a
fixed splitmix64 chain over integer parts.  The same (seed, index, ...)
tuple therefore maps to the same 64-bit value on every platform and in
every execution order, which is what makes sweeps reproducible.
"""

MASK64 = (1 << 64) - 1

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_OFFSET = 0x243F6A8885A308D3


def splitmix64(state: int) -> int:
    """One splitmix64 output step for the given 64-bit state."""
    z = (state + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return (z ^ (z >> 31)) & MASK64


def mix64(*parts: int) -> int:
    """Fold integers into one 64-bit value via a splitmix64 chain."""
    acc = _OFFSET
    for part in parts:
        acc = splitmix64(acc ^ (int(part) & MASK64))
    return acc
