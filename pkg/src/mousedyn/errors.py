"""Exception hierarchy shared across the toolkit.

The CLI maps these onto distinct exit codes: configuration problems (bad
flags, missing columns) exit 2, data problems (unreadable or malformed
input) exit 3, model problems (fit failures, artifact mismatches) exit 4.
"""


class MousedynError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(MousedynError):
    """Invalid configuration: bad option values, missing column mappings."""


class DataError(MousedynError):
    """Invalid or unusable input data."""


class ParseError(DataError):
    """Malformed event row; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ModelError(MousedynError):
    """Model fitting or application failed."""


class ConvergenceError(ModelError):
    """Optimizer did not converge; carries the residual violation."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class DivergenceError(ModelError):
    """Training diverged (non-finite loss); carries the epoch index."""

    def __init__(self, message: str, epoch: int):
        super().__init__(message)
        self.epoch = epoch
