"""Exceptions and small input-validation helpers shared across modules."""

from __future__ import annotations

import numpy as np


class BetaIntertwineError(Exception):
    """Base class for all package errors."""


class DomainError(BetaIntertwineError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ResonanceError(BetaIntertwineError, ArithmeticError):
    """Near-collision of eigenvalues during a triangular solve."""


class NumericalFailure(BetaIntertwineError, ArithmeticError):
    """NaN, overflow, singular system or quadrature collapse."""


class SamplerError(NumericalFailure):
    """A sampler could not produce a valid draw."""


class IntegrationFailure(NumericalFailure):
    """An SDE integration produced non-finite values."""

    def __init__(self, message, path_index=None, diagnostics=None):
        super().__init__(message)
        self.path_index = path_index
        self.diagnostics = diagnostics or {}


def check_theta(theta, minimum=0.0):
    if not theta > minimum:
        raise DomainError(f"theta must be > {minimum}, got {theta}")
    return theta


def check_chamber(x, *, strict=False, interval=None, name="x"):
    """Validate a point of the Weyl chamber ``x_1 <= ... <= x_n``.

    Returns a float array. ``interval`` is ``(lo, hi)`` with ``hi`` possibly
    ``inf``.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(x)):
        raise DomainError(f"{name} has non-finite coordinates")
    d = np.diff(x)
    if strict and np.any(d <= 0):
        raise DomainError(f"{name} must be strictly increasing, got {x}")
    if np.any(d < 0):
        raise DomainError(f"{name} must be weakly increasing, got {x}")
    if interval is not None:
        lo, hi = interval
        if x.size and (x[0] < lo or x[-1] > hi):
            raise DomainError(f"{name} must lie in [{lo}, {hi}], got {x}")
    return x


def check_interlacing(x, y):
    """Raise unless ``x_1 <= y_1 <= x_2 <= ... <= y_n <= x_{n+1}``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1] != y.shape[-1] + 1:
        raise DomainError("need len(x) == len(y) + 1")
    ok = np.all(x[..., :-1] <= y) and np.all(y <= x[..., 1:])
    if not ok:
        raise DomainError("y does not interlace with x")
