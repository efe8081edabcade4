"""
Exception hierarchy.

Every error derives from EventumError and from the builtin that a caller would
expect for the same situation (ValueError for bad input, RuntimeError for a run
that exhausts its window), so `except ValueError` keeps working.
"""


class EventumError(Exception):
    pass


class ShapeError(EventumError, ValueError):
    pass


class MatrixSizeError(EventumError, ValueError):
    pass


class NotAnIsometryError(EventumError, ValueError):
    pass


class UnitarityError(EventumError, ValueError):
    pass


class LabelError(EventumError, ValueError):
    pass


class ModeError(EventumError, ValueError):
    pass


class StateError(EventumError, ValueError):
    pass


class ParameterError(EventumError, ValueError):
    pass


class UnsupportedStructureError(EventumError, ValueError):
    pass


class HorizonError(EventumError, RuntimeError):
    """Raised when a step would leave the materialized window."""

    def __init__(self, message: str, step: int | None = None):
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)
        self.step = step


class KrausError(EventumError, ValueError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual={residual:.3g})")
        self.residual = residual


class ModelValidationError(EventumError, ValueError):
    """Raised when an EventumModel violates its invariants; carries the report."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class FiniteBranchingError(ModelValidationError):
    pass


class CompatibilityError(EventumError, RuntimeError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class ModelFileError(EventumError, ValueError):
    def __init__(self, message: str, location: str | None = None):
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location
