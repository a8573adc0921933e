"""Structured errors raised across the package."""

from pathlib import Path
from typing import Any

import numpy as np


class DrsubError(Exception):
    """Base class for all errors raised by drsub.

    Args:
        message: Human readable description
        **details: Structured context, emitted by the CLI as JSON
    """

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-friendly description of the error."""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "details": {key: _jsonable(value) for key, value in self.details.items()},
        }


class DimensionMismatchError(DrsubError, ValueError):
    """A vector or matrix does not match the expected dimension."""


class InvalidParameterError(DrsubError, ValueError):
    """A parameter lies outside its admissible range."""


class InfeasibleProblemError(DrsubError):
    """A linear program has an empty feasible set."""


class UnboundedProblemError(DrsubError):
    """A linear program is unbounded in the optimization direction."""


class SimplexCyclingError(DrsubError):
    """The simplex method hit its iteration cap."""


class ProjectionError(DrsubError):
    """Dykstra's projection did not converge within its iteration budget."""

    def __init__(self, message: str, last_iterate: np.ndarray, residual: float, **details: Any):
        super().__init__(message, last_iterate=last_iterate, residual=residual, **details)
        self.last_iterate = last_iterate
        self.residual = residual


class GridTooLargeError(DrsubError):
    """Grid search was refused because the dimension is too high."""


class MovieLensFormatError(DrsubError):
    """A MovieLens record could not be parsed."""

    def __init__(self, message: str, path: str | Path, line_number: int, **details: Any):
        super().__init__(message, path=path, line_number=line_number, **details)
        self.path = path
        self.line_number = line_number


class ConfigError(DrsubError):
    """A configuration document failed validation."""


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)
