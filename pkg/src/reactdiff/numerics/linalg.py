"""Symmetric matrix square root via eigendecomposition."""

from __future__ import annotations

import numpy as np

from ..errors import NumericError, ShapeError
from .tensor import Tensor


def sym_sqrt(a) -> np.ndarray:
    """Square root B of a symmetric PSD matrix, with B @ B == A.

    The input is symmetrized as (A + A.T)/2 first; eigenvalues that come out
    slightly negative from roundoff are clamped to zero.
    """
    arr = a.data if isinstance(a, Tensor) else np.asarray(a, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"sym_sqrt expects a square matrix, got shape {arr.shape}")
    sym = 0.5 * (arr + arr.T)
    try:
        w, u = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition failed: {exc}") from exc
    w = np.clip(w, 0.0, None)
    return (u * np.sqrt(w)) @ u.T
