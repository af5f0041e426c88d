"""
Error Types
File: utils/utils_errors.py

One exception class per failure the toolkit can report, each with its own
exit status (2 to 9). Library code raises these; only the CLI turns them
into exit codes. Status 1 is left for errors outside the toolkit.
"""

#####################################
# Imports
#####################################

# import from Python Standard Library
from enum import Enum

__all__ = [
    "ErrorCode",
    "ToolkitError",
    "ConfigError",
    "NonConvergenceError",
    "InvalidSpecError",
    "DomainEscapeError",
    "IndexOutOfRangeError",
    "GridTooCoarseError",
    "OverflowGuardError",
    "InvalidEigenvaluesError",
]

#####################################
# Error Codes
#####################################


class ErrorCode(str, Enum):
    CONFIG_ERROR = "CONFIG_ERROR"
    NON_CONVERGENCE = "NON_CONVERGENCE"
    INVALID_SPEC = "INVALID_SPEC"
    DOMAIN_ESCAPE = "DOMAIN_ESCAPE"
    INDEX_OUT_OF_RANGE = "INDEX_OUT_OF_RANGE"
    GRID_TOO_COARSE = "GRID_TOO_COARSE"
    OVERFLOW_GUARD = "OVERFLOW_GUARD"
    INVALID_EIGENVALUES = "INVALID_EIGENVALUES"


#####################################
# Exception Classes
#####################################


class ToolkitError(Exception):
    """Base class. Carries a code and the process exit code the CLI uses."""

    code: ErrorCode = ErrorCode.CONFIG_ERROR
    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def structured(self) -> str:
        """One-line message printed by the CLI."""
        return f"ERROR {self.code.value}: {self.detail}"


class ConfigError(ToolkitError):
    code = ErrorCode.CONFIG_ERROR
    exit_code = 2


class NonConvergenceError(ToolkitError):
    code = ErrorCode.NON_CONVERGENCE
    exit_code = 3


class InvalidSpecError(ToolkitError):
    code = ErrorCode.INVALID_SPEC
    exit_code = 4


class DomainEscapeError(ToolkitError):
    code = ErrorCode.DOMAIN_ESCAPE
    exit_code = 5


class IndexOutOfRangeError(ToolkitError):
    code = ErrorCode.INDEX_OUT_OF_RANGE
    exit_code = 6


class GridTooCoarseError(ToolkitError):
    code = ErrorCode.GRID_TOO_COARSE
    exit_code = 7


class OverflowGuardError(ToolkitError):
    code = ErrorCode.OVERFLOW_GUARD
    exit_code = 8


class InvalidEigenvaluesError(ToolkitError):
    code = ErrorCode.INVALID_EIGENVALUES
    exit_code = 9
