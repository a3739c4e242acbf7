"""Exception types shared across the library."""


class NhgpError(Exception):
    """Base class for all library errors."""


class InvalidInputError(NhgpError, ValueError):
    """Malformed or non-finite input data."""


class DegenerateConstraintError(NhgpError):
    """Constraint matrix lost row rank (or basis lost column rank)."""


class InvalidHyperparameterError(NhgpError, ValueError):
    """Kernel hyperparameters outside their admissible range."""


class IllConditionedKernelError(NhgpError):
    """Cholesky factorization failed even after jitter escalation."""


class OptimizationFailedError(NhgpError):
    """Every objective evaluation during hyperparameter search was non-finite."""


class DivergenceError(NhgpError):
    """Integration produced a non-finite state.

    Carries the last time at which the state was still finite.
    """

    def __init__(self, message, last_valid_time):
        super().__init__(message)
        self.last_valid_time = last_valid_time


class InsufficientDataError(NhgpError):
    """Requested more training samples than the trajectories provide."""
