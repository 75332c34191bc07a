"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested function."""


class ConfigurationError(ValueError):
    """Invalid combination of parameters (grid too coarse, bad ordering...)."""


class ConvergenceError(RuntimeError):
    """A numeric procedure failed to reach its tolerance.

    ``residual`` carries the achieved error estimate when one is available.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
