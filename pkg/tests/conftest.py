import numpy as np
import pytest

from ringtrng import BitSequence


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_seq(rng, n, p1=0.5) -> BitSequence:
    return BitSequence.from_array((rng.random(n) < p1).astype(np.uint8))


def all_sequences(n):
    """Every n-bit sequence, LSB-first from the integer encoding."""
    for word in range(1 << n):
        yield BitSequence.from_bits((word >> i) & 1 for i in range(n))
