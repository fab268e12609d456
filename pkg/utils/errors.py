from typing import Optional, Tuple, Union


class AidError(Exception):
    """Root of every error raised by the toolkit. Each carries its CLI exit code."""

    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ConfigError(AidError, ValueError):
    """Invalid argument or configuration value."""

    exit_code = 2


class DimensionError(ConfigError):
    """Array shapes that do not fit together."""


class NumericError(AidError, ArithmeticError):
    """A non-finite value appeared during a computation."""

    exit_code = 3

    def __init__(self, detail: str, where: Optional[Union[str, Tuple[int, ...]]] = None):
        if where is not None:
            detail = f"{detail} (at {where})"
        super().__init__(detail)
        self.where = where


class StorageError(AidError, OSError):
    """File could not be read or written."""

    exit_code = 4


class ArrayFormatError(StorageError):
    """Corrupt or truncated array container."""

    def __init__(self, detail: str, offset: int):
        super().__init__(f"{detail} at byte offset {offset}")
        self.offset = offset


def exit_code_for(error: BaseException) -> int:
    """Map any exception to the stable exit-code contract (0/2/3/4)."""
    if isinstance(error, AidError):
        return error.exit_code
    # pydantic's ValidationError subclasses ValueError
    if isinstance(error, ValueError):
        return ConfigError.exit_code
    if isinstance(error, (FloatingPointError, ArithmeticError)):
        return NumericError.exit_code
    if isinstance(error, OSError):
        return StorageError.exit_code
    return 1
