"""Exception types shared across the package."""


class DomainError(ValueError):
    """Base class for contract violations raised by this package."""


class NegativeWeightError(DomainError):
    """A probability weight was negative."""


class AllZeroError(DomainError):
    """Every supplied weight was zero."""


class ZeroMeanError(DomainError):
    """An operation that divides by the mean got a zero-mean input."""


class OutOfRangeError(DomainError):
    """A scalar parameter fell outside its admissible interval."""


class NegativeRateError(DomainError):
    """A rate parameter was negative."""


class AlphaZeroError(DomainError):
    """The interpolation derivative is undefined at alpha = 0."""


class SupportMismatchError(DomainError):
    """Relative entropy asked for with mass outside the reference support."""


class InfeasibleError(DomainError):
    """Requested mean is not reachable on the requested support."""


class ZeroQ1Error(DomainError):
    """The compounding law puts no mass at 1, so the check is void."""


class BadSupportError(DomainError):
    """The compounding law is supported outside the set the check needs."""


class TooLargeError(DomainError):
    """Instance exceeds the size this exhaustive routine accepts."""


class HypothesisFailedError(DomainError):
    """A check's stated hypothesis does not hold for the given input.

    The offending hypothesis name is kept in ``hypothesis``.
    """

    def __init__(self, hypothesis: str, message: str = ""):
        self.hypothesis = hypothesis
        super().__init__(message or f"hypothesis failed: {hypothesis}")


class NotAMatroidError(DomainError):
    """A set system violates a matroid axiom; ``axiom`` names which one."""

    def __init__(self, axiom: str, message: str = ""):
        self.axiom = axiom
        super().__init__(message or f"not a matroid: {axiom} axiom fails")
