"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

import numbers

import numpy as np

from .exceptions import NotPositiveDefinite

SYM_TOL = 1e-10
PD_TOL = 1e-12


def check_point(p, dim=None, name="point"):
    """Return ``p`` as a finite 1-D float array, optionally of length ``dim``."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"{name} must have length {dim}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_points(X, dim=None, name="points"):
    """Return ``X`` as a finite float array of shape (n, d) or (d,)."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim not in (1, 2):
        raise ValueError(f"{name} must be 1-D or 2-D, got shape {arr.shape}")
    if dim is not None and arr.shape[-1] != dim:
        raise ValueError(f"{name} must have trailing dimension {dim}, got {arr.shape[-1]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_dim(dim):
    if dim not in (2, 3):
        raise ValueError(f"dimension must be 2 or 3, got {dim!r}")
    return int(dim)


def check_positive(value, name, strict=True):
    if not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise ValueError(f"{name} must be a finite real number, got {value!r}")
    if strict and value <= 0:
        raise ValueError(f"{name} must be > 0, got {value!r}")
    if not strict and value < 0:
        raise ValueError(f"{name} must be >= 0, got {value!r}")
    return float(value)


def check_spd(cov, dim=None, name="cov"):
    """Validate a symmetric positive definite matrix.

    Raises
    ------
    NotPositiveDefinite
        If the matrix is asymmetric beyond ``SYM_TOL`` or its smallest
        eigenvalue does not exceed ``PD_TOL``.
    """
    arr = np.asarray(cov, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"{name} must be {dim}x{dim}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NotPositiveDefinite(f"{name} contains non-finite values")
    if np.max(np.abs(arr - arr.T)) >= SYM_TOL:
        raise NotPositiveDefinite(f"{name} is not symmetric")
    sym = 0.5 * (arr + arr.T)
    if np.linalg.eigvalsh(sym)[0] <= PD_TOL:
        raise NotPositiveDefinite(f"{name} is not positive definite")
    return sym


def check_random_state(seed):
    """Turn ``seed`` into a ``numpy.random.Generator``."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
