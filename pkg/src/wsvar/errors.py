"""Exception hierarchy shared by all wsvar modules.

Every error that a caller may want to branch on carries structured fields
(offset, index, level, ...) rather than only a message, so the CLI can turn
failures into machine-readable JSON.
"""


class WsvarError(Exception):
    """Base class for all library errors."""


class ExpressionSyntaxError(WsvarError):
    """Malformed sequence expression; `offset` is the byte position."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class UnknownIdentifier(WsvarError):
    """An identifier other than the free variable or a known function."""

    def __init__(self, name, offset):
        super().__init__(f"unknown identifier {name!r} (offset {offset})")
        self.name = name
        self.offset = offset


class DomainError(WsvarError):
    """Evaluation left the domain (log of nonpositive, 1/0, overflow)."""


class OutOfDomain(WsvarError):
    """Argument outside [0, 1]."""


class NonpositiveValue(WsvarError):
    """A sequence took a value <= 0; `index` is the first offender."""

    def __init__(self, index, value=None):
        super().__init__(f"nonpositive value at index {index}: {value}")
        self.index = index
        self.value = value


class MonotonicityViolation(WsvarError):
    """A sequence decreased where it must not; `index` is the first offender."""

    def __init__(self, index, value=None, previous=None):
        super().__init__(
            f"monotonicity violated at index {index}: {previous} -> {value}"
        )
        self.index = index
        self.value = value
        self.previous = previous


class ResourceLimit(WsvarError):
    """A cache or grid grew past its configured budget."""


class BudgetExceeded(WsvarError):
    """Search node budget hit; carries the bracketing values found so far."""

    def __init__(self, lower, upper, report=None):
        super().__init__(
            f"node budget exceeded; value in [{lower:.17g}, {upper:.17g}]"
        )
        self.lower = lower
        self.upper = upper
        self.report = report


class GuardExceeded(WsvarError):
    """Instance too large for an exhaustive oracle or materialization."""


class HorizonTooSmall(WsvarError):
    """No feasible interval exists at the first index (delta(1) < 1)."""


class SortViolation(WsvarError):
    """Input vector was required to be sorted nonincreasing."""


class NegativeInput(WsvarError):
    """Input vector was required to be nonnegative (with leading positive)."""


class WitnessNotFound(WsvarError):
    """Level search exhausted its n budget: evidence the indicator is bounded."""

    def __init__(self, level, n_search_limit):
        super().__init__(
            f"no admissible n for level {level} up to n = {n_search_limit}"
        )
        self.level = level
        self.n_search_limit = n_search_limit


class ChainViolation(WsvarError):
    """A step of a witness verification chain failed; names level and step."""

    def __init__(self, level, step, detail=""):
        super().__init__(f"chain violated at level {level}, step {step}: {detail}")
        self.level = level
        self.step = step
