"""Small input-validation helpers."""

from __future__ import annotations

import math

import numpy as np
from sklearn.utils.validation import check_array


def check_finite(value, name):
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return float(value)


def check_positive(value, name):
    value = check_finite(value, name)
    if value <= 0:
        raise ValueError(f"{name} must be > 0, got {value!r}")
    return value


def check_nonnegative(value, name):
    value = check_finite(value, name)
    if value < 0:
        raise ValueError(f"{name} must be >= 0, got {value!r}")
    return value


def check_pair(pair, name):
    """Validate a 2-tuple of finite floats, e.g. initial data ``(J, dJ/dT)``."""
    arr = np.asarray(pair, dtype=float)
    if arr.shape != (2,) or not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be two finite numbers, got {pair!r}")
    return float(arr[0]), float(arr[1])


def check_eta_column(X):
    """Coerce an eta sample set to a 1-D float array.

    Accepts a flat sequence or an ``(n, 1)`` array, the latter being what
    scikit-learn pipelines pass around. Negative values are rejected.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    X = check_array(X, ensure_2d=True, dtype=float)
    if X.shape[1] != 1:
        raise ValueError(f"expected a single eta column, got shape {X.shape}")
    eta = X[:, 0]
    if np.any(eta < 0):
        raise ValueError("eta must be non-negative")
    return eta
