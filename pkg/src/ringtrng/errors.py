"""Exception types shared across the toolkit."""


class RingTrngError(Exception):
    """Base class for all toolkit errors."""


class EmptySequenceError(RingTrngError, ValueError):
    """Input contains no bits."""


class MalformedBitError(RingTrngError, ValueError):
    """Bit text contains a character other than '0', '1' or whitespace."""

    def __init__(self, position: int, char: str):
        self.position = position
        self.char = char
        super().__init__(f"invalid character {char!r} at offset {position}")


class LengthMismatchError(RingTrngError, ValueError):
    """Sequences that must share a length do not."""

    def __init__(self, indices, message: str | None = None):
        self.indices = tuple(indices)
        super().__init__(
            message or f"sequences at indices {self.indices} differ in length"
        )


class WindowTooSmallError(RingTrngError, ValueError):
    """Window shorter than the pattern it must contain."""


class WindowExceedsSequenceError(RingTrngError, ValueError):
    """Window extends past the end of the sequence."""


class BudgetExceededError(RingTrngError, RuntimeError):
    """Exhaustive search would exceed its cost budget."""

    def __init__(self, cost: float, budget: float):
        self.cost = cost
        self.budget = budget
        super().__init__(
            f"estimated cost {cost:.3g} exceeds budget {budget:.3g}; "
            "pass force=True to run anyway"
        )


class TooShortError(RingTrngError, ValueError):
    """Input shorter than the operation requires."""


class UndefinedTableError(RingTrngError, ValueError):
    """Transition table has no observed context."""


class PreconditionFailedError(RingTrngError, ValueError):
    """A bound's domain condition does not hold; the bound is undefined."""

    def __init__(self, condition: str):
        self.condition = condition
        super().__init__(f"precondition failed: {condition}")


class MalformedCounterError(RingTrngError, ValueError):
    """A counter file line is not an unsigned decimal integer."""

    def __init__(self, line_no: int, text: str):
        self.line_no = line_no
        self.text = text
        super().__init__(f"line {line_no}: not an unsigned counter: {text!r}")


class DegenerateInputError(RingTrngError, ValueError):
    """Statistic undefined for this input (zero variance, |r| = 1, ...)."""


class EmptyGridError(RingTrngError, ValueError):
    """Parameter grid produced no valid configuration."""
