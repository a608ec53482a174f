class KappaError(Exception):
    """Base class for library errors."""


class DimensionError(KappaError, ValueError):
    pass


class EmptySetError(KappaError, ValueError):
    pass


class UnsupportedSetError(KappaError, TypeError):
    """Operation is not defined for this ClosedSet variant."""


class SingularOperatorError(KappaError, ValueError):
    pass


class InfeasibleError(KappaError, ValueError):
    pass


class NotIntervalOrderError(KappaError, ValueError):
    def __init__(self, witness=None):
        self.witness = witness
        msg = "not an interval order"
        if witness is not None:
            msg += f" (2+2 witness: {witness})"
        super().__init__(msg)


class ConvergenceError(KappaError, RuntimeError):
    def __init__(self, message, residuals=()):
        self.residuals = list(residuals)
        last = self.residuals[-1] if self.residuals else float("nan")
        super().__init__(f"{message} (last residual {last:.3e})")
