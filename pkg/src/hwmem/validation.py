"""Input validation helpers used by backends, estimators, and the CLI."""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionMismatchError, ZeroVectorError


def as_vector(x, dim: int | None = None, name: str = "x") -> np.ndarray:
    """Coerce to a finite 1-D float64 array, optionally checking its length."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatchError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size < 1:
        raise DimensionMismatchError(f"{name} must have at least one entry")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    if dim is not None and arr.size != dim:
        raise DimensionMismatchError(
            f"{name} has dimension {arr.size}, expected {dim}"
        )
    return arr


def as_matrix(a, n_cols: int | None = None, name: str = "a") -> np.ndarray:
    """Coerce to a finite 2-D float64 array, optionally checking column count."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    if n_cols is not None and arr.shape[1] != n_cols:
        raise DimensionMismatchError(
            f"{name} has {arr.shape[1]} columns, expected {n_cols}"
        )
    return arr


def nonzero_norm(x: np.ndarray, name: str = "x") -> float:
    """Euclidean norm of ``x``, raising ZeroVectorError when it vanishes."""
    norm = float(np.linalg.norm(x))
    if norm == 0.0:
        raise ZeroVectorError(f"{name} has zero norm")
    return norm
