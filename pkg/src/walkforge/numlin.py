"""Dense complex linear algebra for walk Hamiltonians and circuit unitaries.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; every
routine here is a pure function. Hermitian matrices go through ``eigh``,
unitaries through the complex Schur form, which stays orthonormal on the
highly degenerate spectra that hypercube walks produce.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NonConvergence, NotHermitian, NotUnitary

HERMITIAN_TOL = 1e-9
UNITARY_TOL = 1e-8
# eigenphases within this distance of -pi are folded onto +pi
BRANCH_TOL = 1e-12


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_complex_matrix(a, *, square: bool = True) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatch(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def max_abs(a) -> float:
    """Entrywise max norm ``max |a_ij|``."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return max_abs(m - m.conj().T) <= tol * max(1.0, max_abs(m))


def is_unitary(m, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return max_abs(m.conj().T @ m - np.eye(m.shape[0])) <= tol


def eig_hermitian(h, tol: float = HERMITIAN_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises
    ------
    NotHermitian
        If ``h`` fails the symmetry check at ``tol``.
    NonConvergence
        If LAPACK does not converge.
    """
    h = as_complex_matrix(h)
    if not is_hermitian(h, tol):
        raise NotHermitian(f"matrix is not Hermitian within {tol:g}")
    h = 0.5 * (h + h.conj().T)
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(str(exc)) from exc
    if not np.all(np.isfinite(w)):
        raise NonConvergence("eigensolver produced non-finite eigenvalues")
    return EigenDecomposition(w, v)


def expm_i_hermitian(h, s: float, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``exp(-1j * s * h)`` for Hermitian ``h`` via its spectrum."""
    if not np.isfinite(s):
        raise ValueError(f"evolution phase must be finite, got {s}")
    w, v = eig_hermitian(h, tol)
    return (v * np.exp(-1j * s * w)) @ v.conj().T


def unitary_eigenphases(u, tol: float = UNITARY_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize a unitary as ``u = Z diag(exp(1j*phases)) Z^H``.

    Phases lie in the half-open interval (-pi, pi]; the -pi end is folded
    onto +pi. ``Z`` is unitary even when eigenvalues are degenerate.
    """
    u = as_complex_matrix(u)
    if not is_unitary(u, tol):
        raise NotUnitary(f"matrix is not unitary within {tol:g}")
    try:
        t, z = scipy.linalg.schur(u, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NonConvergence(str(exc)) from exc
    # the Schur form of a normal matrix is diagonal up to rounding
    phases = np.angle(np.diag(t))
    phases[phases <= -np.pi + BRANCH_TOL] = np.pi
    return phases, z


def logm_unitary_principal(u, tol: float = UNITARY_TOL) -> np.ndarray:
    """Principal Hermitian logarithm: the ``L`` with ``u = exp(1j * L)``.

    All eigenvalues of ``L`` lie in (-pi, pi], so ``-I`` maps to ``pi * I``.
    """
    phases, z = unitary_eigenphases(u, tol)
    log = (z * phases) @ z.conj().T
    return 0.5 * (log + log.conj().T)


def equal_up_to_global_phase(a, b, tol: float = 1e-9) -> bool:
    """True when ``a = exp(1j*alpha) * b`` for some alpha, entrywise within ``tol``."""
    return max_abs(remove_global_phase(a, b) - np.asarray(b)) <= tol


def remove_global_phase(a, reference) -> np.ndarray:
    """Rotate ``a`` by the global phase that best aligns it with ``reference``.

    The phase maximizes ``|trace(reference^H a)|``.
    """
    a = np.asarray(a, dtype=np.complex128)
    overlap = np.vdot(np.asarray(reference, dtype=np.complex128), a)
    if abs(overlap) == 0:
        return a
    return a * (abs(overlap) / overlap)
