"""
Exception hierarchy shared by the library and the command line.

Library code raises these; only utils/command_system.py turns them into
an exit status and a single stderr line.
"""
from typing import Optional, Sequence


class BfaElmError(Exception):
    """Root of every error raised on purpose by this project"""


class ConfigError(BfaElmError, ValueError):
    """Invalid configuration value or config file"""


class DimensionError(BfaElmError, ValueError):
    """Shapes of the inputs do not agree"""


class NonFiniteError(BfaElmError, ValueError):
    """NaN or infinite value where a finite one is required"""


class DatasetError(BfaElmError, ValueError):
    """Dataset too small or otherwise unusable for the requested operation"""


class MetricsError(BfaElmError, ValueError):
    """Metric inputs violate a precondition"""


class DegenerateFeatureError(BfaElmError, ValueError):
    """Feature with min == max; min-max normalization would divide by zero"""

    def __init__(self, message: str, column: Optional[str] = None):
        super().__init__(message)
        self.column = column


class ZeroVarianceError(BfaElmError, ValueError):
    """Constant sequence passed to a correlation"""

    def __init__(self, message: str = "zero variance", column: Optional[str] = None):
        super().__init__(message)
        self.column = column


class SchemaError(BfaElmError, ValueError):
    """CSV file does not follow the expected layout"""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NonFiniteFitnessError(BfaElmError, ArithmeticError):
    """Fitness callback returned NaN or inf"""

    def __init__(self, value: float, position: Sequence[float]):
        self.value = value
        self.position = tuple(float(p) for p in position)
        super().__init__(f"fitness returned {value!r} at position {list(self.position)}")


class DataFileError(BfaElmError, OSError):
    """Input file is missing or cannot be read"""
