"""Argument checks shared by the estimator facade and the CLI."""

from __future__ import annotations

import math
import numbers

import numpy as np
from sklearn.utils.validation import check_array

from .potential import PotentialSpec


def check_positive(value, name, *, allow_none=False):
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise ValueError(f"{name} must be positive and finite, got {value!r}")
    return value


def check_even_int(value, name, minimum=8):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum or value % 2:
        raise ValueError(f"{name} must be even and >= {minimum}, got {value}")
    return int(value)


def check_spec(p, beta) -> PotentialSpec:
    for name, v in (("p", p), ("beta", beta)):
        if isinstance(v, bool) or not isinstance(v, numbers.Real):
            raise TypeError(f"{name} must be a real number")
    return PotentialSpec(float(p), float(beta))


def check_lambdas(X, *, increasing=False) -> np.ndarray:
    """Energies as a 1-D float array; accepts shape ``(n,)`` or ``(n, 1)``."""
    arr = check_array(X, ensure_2d=False, dtype=np.float64, input_name="X")
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"expected one energy per row, got shape {arr.shape}")
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError("energies must be one-dimensional")
    if increasing and np.any(np.diff(arr) <= 0):
        raise ValueError("energies must be strictly increasing")
    return arr
