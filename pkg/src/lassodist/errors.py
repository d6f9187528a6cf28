"""Exception hierarchy shared across the package."""
from __future__ import annotations

import numpy as np


class LassodistError(Exception):
    """Base class for package errors; `exit_code` drives the CLI exit status."""

    exit_code = 1


class ConfigError(LassodistError):
    """Invalid configuration or parameter choice."""

    exit_code = 1


class DataError(LassodistError):
    """Malformed or inconsistent input data."""

    exit_code = 2


class NumericalError(LassodistError):
    """Numerical failure: singular system, degenerate fit, lost positivity."""

    exit_code = 3


class ConvergenceError(NumericalError):
    """Iterative solver stopped before reaching tolerance.

    Carries the best iterate and its residual so callers can inspect how
    close the solver got.
    """

    def __init__(
        self,
        message: str,
        *,
        beta: np.ndarray | None = None,
        residual: float | None = None,
    ) -> None:
        super().__init__(message)
        self.beta = beta
        self.residual = residual
