"""Exception types raised across the package."""


class IncompatError(Exception):
    """Base class for all package errors."""


class InvalidObservable(IncompatError, ValueError):
    pass


class InvalidState(IncompatError, ValueError):
    pass


class InvalidNormal(IncompatError, ValueError):
    pass


class IndexOutOfRange(IncompatError, IndexError):
    pass


class OutOfRange(IncompatError, ValueError):
    pass


class BiasedInput(IncompatError, ValueError):
    """An operation defined for unbiased triplets received a biased one."""


class NotPositive(IncompatError):
    """A candidate parent POVM has a non-positive element."""

    def __init__(self, pattern, margin):
        self.pattern = pattern
        self.margin = margin
        super().__init__(f"element {pattern} is not positive (margin {margin:.3e})")


class NotSaturable(IncompatError):
    pass


class AlreadyCompatible(IncompatError):
    pass


class DegenerateAnchor(IncompatError):
    pass


class NotOnBoundary(IncompatError):
    pass


class NotSymmetric(IncompatError):
    pass


class NonConvergence(IncompatError, RuntimeError):
    pass


class RootNotBracketed(IncompatError, RuntimeError):
    pass


class TooLarge(IncompatError, ValueError):
    pass


class ParseError(IncompatError, ValueError):
    pass


class DegenerateMaximizer(UserWarning):
    """The worst-case state is not unique; a conventional state was returned."""
