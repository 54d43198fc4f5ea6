"""Exception hierarchy shared by all modules."""


class ApproxAlgError(Exception):
    pass


class ModelError(ApproxAlgError):
    """Inconsistent inputs: mixed variable sets, bad constructor parameters."""


class TruncationError(ApproxAlgError):
    """A requested degree lies beyond the model's certified truncation."""


class ValidationError(ApproxAlgError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ValuationError(ApproxAlgError):
    """The valuation of zero was requested."""


class FlagError(ApproxAlgError):
    """A flag does not apply to the given element or model."""


class UnsupportedDimensionError(ApproxAlgError):
    def __init__(self, message, points=None):
        super().__init__(message)
        self.points = points


class InstanceError(ApproxAlgError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
