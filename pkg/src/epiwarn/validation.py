"""Input-validation helpers shared by the estimators and pipeline functions."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .exceptions import EmptyInput, LengthMismatch, ShapeMismatch


def as_float_1d(values, *, name: str = "values", allow_empty: bool = False) -> np.ndarray:
    """Coerce to a 1-D float64 array, rejecting non-finite entries."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ShapeMismatch(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0 and not allow_empty:
        raise EmptyInput(f"{name} is empty")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ShapeMismatch(f"{name} contains non-finite entries")
    return arr


def as_float_2d(values, *, name: str = "X") -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ShapeMismatch(f"{name} must be two-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise EmptyInput(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ShapeMismatch(f"{name} contains non-finite entries")
    return arr


def check_same_length(a: Sequence, b: Sequence, *, names: str = "actual/predicted") -> None:
    if len(a) != len(b):
        raise LengthMismatch(f"{names} lengths differ: {len(a)} vs {len(b)}")
