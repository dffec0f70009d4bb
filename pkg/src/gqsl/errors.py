"""Exception hierarchy shared by all gqsl modules."""


class GqslError(Exception):
    """Base class for every error raised by gqsl."""


class InvalidArgument(GqslError, ValueError):
    pass


class InvalidState(GqslError, ValueError):
    pass


class NumericalFailure(GqslError, ArithmeticError):
    pass


class PreconditionViolation(GqslError, ValueError):
    pass


class DegenerateGenerator(GqslError, ValueError):
    pass


class Unsupported(GqslError, NotImplementedError):
    pass


class IntegrationFailure(GqslError, RuntimeError):
    """Raised when an integrated state leaves the physical set.

    Attributes:
        time: sample time at which the violation was detected.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class InconsistentTrajectory(GqslError, RuntimeError):
    pass


class BoundViolation(GqslError, AssertionError):
    pass


class PrecisionFailure(GqslError, ArithmeticError):
    pass
