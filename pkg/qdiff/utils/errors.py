"""Exceptions raised by qdiff; `exit_code` is what `python -m qdiff` returns."""

class QdiffError(Exception):
    exit_code = 1

class ConfigError(QdiffError, ValueError):
    exit_code = 1

# Physics-domain errors: the request makes no sense for the model (exit 2).
class DomainError(QdiffError, ValueError):
    exit_code = 2

class BallisticError(DomainError):
    def __init__(self, message="ballistic regime: D undefined (noise magnitude is zero)"):
        super().__init__(message)

# Numerical-validity errors: the computation ran but its output cannot be trusted (exit 3).
class NumericalValidityError(QdiffError, RuntimeError):
    exit_code = 3

class NumericalBlowupError(NumericalValidityError):
    pass

class BoundaryBreachError(NumericalValidityError):
    def __init__(self, message, breach_time=None):
        super().__init__(message)
        self.breach_time = breach_time

class FitWindowError(NumericalValidityError):
    pass

class ResolutionError(NumericalValidityError):
    pass

class PhysicsWarning(UserWarning):
    """
    Emitted when a result is computed outside the regime where it is trustworthy
    (e.g. T not small compared to W).
    """
    pass
