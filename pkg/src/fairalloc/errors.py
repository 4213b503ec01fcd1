"""Exception hierarchy shared by every module."""


class FairAllocError(Exception):
    """Base class for all library errors."""


class InputError(FairAllocError, ValueError):
    """Malformed or inconsistent input (unknown ids, broken preconditions)."""


class CapabilityError(FairAllocError):
    """The request is outside what an algorithm or oracle supports.

    ``reference`` optionally names a fixture id from the corpus that
    demonstrates why the setting is excluded.
    """

    def __init__(self, message, reference=None):
        super().__init__(message)
        self.reference = reference


class NotBaseOrderableError(CapabilityError):
    """A feasible-exchange bijection between two bases does not exist."""

    def __init__(self, message, bases=None):
        super().__init__(message, reference="k4-graphic")
        self.bases = bases


class NoFeasiblePartitionError(InputError):
    """No partition of the ground set into two feasible sets exists."""


class InvariantViolation(AssertionError):
    """A mid-run invariant failed while running in verification mode."""
