"""Input validation helpers.

Small checkers in the spirit of ``sklearn.utils.validation``: they coerce
inputs to canonical dtypes/shapes and raise ``ValueError`` with a readable
message when an invariant is broken.
"""

import numpy as np

__all__ = [
    "check_vector",
    "check_nonneg_vector",
    "check_points",
    "check_cov",
    "check_triplets",
    "check_labels",
]


def check_vector(x, name="x"):
    """Coerce to a finite 1-D float64 array of length >= 1."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"{name} must be a 1-D vector with at least one entry")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinite entries")
    return arr


def check_nonneg_vector(x, name="x"):
    arr = check_vector(x, name)
    if np.any(arr < 0):
        raise ValueError(f"{name} must be entrywise nonnegative")
    return arr


def check_points(X, name="points"):
    """Coerce to a finite 2-D float64 array of shape (n, d)."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be a 2-D array of shape (n, d)")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinite entries")
    return arr


def check_cov(A, name="A", sym_tol=1e-12, psd_tol=-1e-10):
    """Validate a symmetric positive semi-definite matrix.

    Returns the symmetrized float64 copy. Symmetry is required up to
    ``sym_tol`` in absolute terms; eigenvalues may not fall below
    ``psd_tol``.
    """
    arr = np.asarray(A, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be a square matrix")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinite entries")
    if np.max(np.abs(arr - arr.T)) > sym_tol:
        raise ValueError(f"{name} is not symmetric to tolerance {sym_tol}")
    sym = 0.5 * (arr + arr.T)
    eigvals = np.linalg.eigvalsh(sym)
    if np.min(eigvals) < psd_tol:
        raise ValueError(
            f"{name} is not positive semi-definite "
            f"(min eigenvalue {np.min(eigvals):.3e})"
        )
    return sym


def check_triplets(T, n_items=None, name="triplets"):
    """Coerce to a canonical (m, 4) int64 triplet array.

    Accepted input shapes are (m, 4) rows ``i, j, k, y`` or (m, 3) rows
    ``i, j, k`` (labels default to +1). Indices must be distinct within a
    row, nonnegative, and, when ``n_items`` is given, smaller than it.
    Labels must be -1 or +1.
    """
    arr = np.asarray(T)
    if arr.ndim != 2 or arr.shape[1] not in (3, 4) or arr.shape[0] < 1:
        raise ValueError(f"{name} must have shape (m, 3) or (m, 4)")
    if not np.issubdtype(arr.dtype, np.integer):
        flt = np.asarray(arr, dtype=np.float64)
        if not np.all(flt == np.round(flt)):
            raise ValueError(f"{name} entries must be integers")
        arr = flt
    arr = arr.astype(np.int64, copy=True)
    if arr.shape[1] == 3:
        arr = np.column_stack([arr, np.ones(arr.shape[0], dtype=np.int64)])
    i, j, k, y = arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3]
    if np.any((i == j) | (i == k) | (j == k)):
        raise ValueError(f"{name} contains rows with duplicate indices")
    if np.any(arr[:, :3] < 0):
        raise ValueError(f"{name} contains negative indices")
    if n_items is not None and np.any(arr[:, :3] >= n_items):
        raise ValueError(f"{name} contains indices >= n_items ({n_items})")
    if np.any((y != 1) & (y != -1)):
        raise ValueError(f"{name} labels must be -1 or +1")
    return arr


def check_labels(labels, n, name="labels"):
    """Coerce to an int64 label vector of length ``n``."""
    arr = np.asarray(labels)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise ValueError(f"{name} must be a 1-D array of length {n}")
    return arr.astype(np.int64, copy=False)
