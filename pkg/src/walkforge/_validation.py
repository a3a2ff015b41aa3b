"""Input checks shared by the estimators.

``sklearn.utils.check_array`` rejects complex input, so these mirror its
role for the complex matrices and state batches used here.
"""
from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotNormalized, NotUnitary
from .graphs import Graph
from .numlin import HERMITIAN_TOL, UNITARY_TOL, as_complex_matrix, is_hermitian, is_unitary


def check_square_matrix(X) -> np.ndarray:
    if isinstance(X, Graph):
        return X.adjacency()
    m = as_complex_matrix(X)
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains NaN or infinity")
    return m


def check_hermitian_matrix(X, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = check_square_matrix(X)
    if not is_hermitian(m, tol):
        raise NotHermitian(f"expected a Hermitian matrix (tol={tol:g})")
    return 0.5 * (m + m.conj().T)


def check_unitary_matrix(X, tol: float = UNITARY_TOL) -> np.ndarray:
    m = check_square_matrix(X)
    if not is_unitary(m, tol):
        raise NotUnitary(f"expected a unitary matrix (tol={tol:g})")
    return m


def check_states(X, dim: int, tol: float = 1e-9) -> np.ndarray:
    """Return a ``(n_samples, dim)`` complex array of unit-norm rows.

    Integer vectors are read as basis-state indices.
    """
    a = np.asarray(X)
    if a.ndim == 1 and np.issubdtype(a.dtype, np.integer):
        if np.any((a < 0) | (a >= dim)):
            raise ValueError(f"basis indices must lie in [0, {dim})")
        out = np.zeros((a.size, dim), dtype=np.complex128)
        out[np.arange(a.size), a] = 1.0
        return out
    a = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    if a.ndim != 2 or a.shape[1] != dim:
        raise DimensionMismatch(f"expected states of dimension {dim}, got shape {a.shape}")
    norms = np.linalg.norm(a, axis=1)
    if np.any(np.abs(norms - 1.0) > tol):
        raise NotNormalized("every state must have unit norm")
    return a
