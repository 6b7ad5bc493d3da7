class ConsistencyError(RuntimeError):
    """Two independent computations of the same quantity disagree."""


class PreconditionError(ValueError):
    """An operation was asked to run outside its domain (e.g. infinite measure)."""


class EmpiricsError(RuntimeError):
    """Base class for the desk-scale measurement failures."""


class InfiniteMeasureError(EmpiricsError, PreconditionError):
    """The requested count or volume is infinite, so there is nothing to measure."""


class NonTerminatedError(EmpiricsError):
    """Box growth hit its cap before an empty boundary shell was seen."""

    def __init__(self, message, partial=None, box=None):
        super().__init__(message)
        self.partial = partial
        self.box = box


class UnsupportedShapeError(EmpiricsError):
    """Sublevel set too elongated for box-based volume estimation."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
