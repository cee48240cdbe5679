"""Exception types raised by mbs_lab."""


class MBSError(Exception):
    """Base class for all mbs_lab errors."""


class DomainError(MBSError, ValueError):
    """An argument lies outside the domain where the model is valid."""


class NumericalError(MBSError, ArithmeticError):
    """A quantity is undefined at the requested point (e.g. a field null)."""


class ConvergenceError(MBSError, RuntimeError):
    """Quadrature did not reach the requested tolerance."""


class FitError(MBSError, RuntimeError):
    """Nonlinear fringe fit failed to converge."""
