"""Exception hierarchy shared by every module of the package."""


class KummerGapError(Exception):
    """Base class for all numerical failures raised by this package."""


class DomainError(KummerGapError, ValueError):
    """An argument lies outside the domain of the requested function."""


class PoleEmbedded(DomainError):
    """The lower parameter ``b`` sits on a pole (0, -1, -2, ...)."""


class PrecisionExhausted(KummerGapError):
    """Series cancellation consumed more digits than the working precision allows."""


class ToleranceNotMet(KummerGapError):
    """Adaptive quadrature hit its panel limit before reaching the tolerance."""


class DegenerateParameters(DomainError):
    """Closed form is singular for the supplied parameters (e.g. xi == eta)."""


class PreconditionViolated(KummerGapError):
    """A documented precondition (typically ``Phi(a, b, z) == 0``) does not hold."""


class ScanExhausted(KummerGapError):
    """A sign-change scan ran out of range before finding the requested zeros."""


class StepFailure(KummerGapError):
    """The adaptive ODE integrator could not take a step."""


class BracketFailure(KummerGapError):
    """No sign change was found for a bracketed root solve."""


class AbsentThreshold(KummerGapError):
    """The monotonicity threshold does not exist for the requested ``b``."""
