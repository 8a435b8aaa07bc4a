class SingularMatrixError(ArithmeticError):
    pass


class DegenerateSteadyStateError(ArithmeticError):
    """The Liouvillian kernel is not one-dimensional."""


class IntegrationError(RuntimeError):
    def __init__(self, message, t_reached):
        super().__init__(f"{message} (reached t={t_reached!r} ns)")
        self.t_reached = t_reached


class UndefinedNormalizationError(ValueError):
    pass


class NoSplittingError(ValueError):
    pass


class FitError(RuntimeError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
