"""Exception hierarchy."""


class SelfSimError(Exception):
    """Base class for all package errors."""


class ParameterError(SelfSimError, ValueError):
    """Inputs outside the admissible set of an operation."""


class PoleError(ParameterError):
    """Evaluation at the pole of a closed-form solution."""


class DomainError(ParameterError):
    """Point outside the region where the field is defined."""


class IntegrationError(SelfSimError):
    """The integrator stopped before reaching its target.

    The accepted part of the solve is kept on ``trajectory``.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class StepLimitError(IntegrationError):
    pass


class StepUnderflowError(IntegrationError):
    pass


class InvariantViolation(SelfSimError):
    """A proven property of the exact solution failed numerically."""
