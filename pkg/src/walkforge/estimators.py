"""scikit-learn style wrappers around the walk engine and graph extraction."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_hermitian_matrix, check_states, check_unitary_matrix
from .extract import ExtractionParams, adjacency_from_unitary
from .graphs import Graph, bit_labels
from .numlin import eig_hermitian


class ContinuousQuantumWalk(TransformerMixin, BaseEstimator):
    """Continuous-time quantum walk on a fixed graph.

    ``fit`` diagonalizes the adjacency matrix once; ``transform`` maps initial
    states (rows, or basis indices) to detection probabilities at
    ``omega * time``.

    Parameters
    ----------
    omega : float
        Hopping frequency.
    time : float
        Evolution time.

    Attributes
    ----------
    eigenvalues_ : ndarray of shape (n_vertices,)
    eigenvectors_ : ndarray of shape (n_vertices, n_vertices)
    n_vertices_ : int
    """

    def __init__(self, omega=1.0, time=1.0):
        self.omega = omega
        self.time = time

    def fit(self, X, y=None):
        a = check_hermitian_matrix(X)
        decomposition = eig_hermitian(a)
        self.eigenvalues_ = decomposition.eigenvalues
        self.eigenvectors_ = decomposition.eigenvectors
        self.n_vertices_ = a.shape[0]
        return self

    def propagator(self, time=None):
        check_is_fitted(self)
        t = self.time if time is None else time
        v = self.eigenvectors_
        return (v * np.exp(-1j * self.omega * t * self.eigenvalues_)) @ v.conj().T

    def evolve(self, X, time=None):
        """Amplitudes ``exp(-1j*omega*t*A) psi`` for each row ``psi`` of ``X``."""
        check_is_fitted(self)
        states = check_states(X, self.n_vertices_)
        return states @ self.propagator(time).T

    def transform(self, X):
        return np.abs(self.evolve(X)) ** 2

    def transfer_fidelity(self, src, dst, time=None):
        u = self.propagator(time)
        return float(abs(u[dst, src]) ** 2)


class GraphExtractor(TransformerMixin, BaseEstimator):
    """Recover a walk graph from a unitary.

    ``fit(U)`` stores ``adjacency_`` such that ``exp(-1j*(omega/b)*time*adjacency_)``
    reproduces ``U`` up to global phase (for ``k = 0`` or ``U`` commuting
    with the all-ones matrix). ``transform`` runs that walk on initial
    states.
    """

    def __init__(self, omega=1.0, time=1.0, k=0, phi=0.0, b=1.0, prune=1e-9):
        self.omega = omega
        self.time = time
        self.k = k
        self.phi = phi
        self.b = b
        self.prune = prune

    def _params(self):
        return ExtractionParams(self.omega, self.time, self.k, self.phi, self.b, self.prune)

    def fit(self, X, y=None):
        u = check_unitary_matrix(X)
        params = self._params()
        self.adjacency_ = adjacency_from_unitary(u, params)
        d = u.shape[0]
        labels = bit_labels(d.bit_length() - 1) if d >= 2 and d & (d - 1) == 0 else None
        self.graph_ = Graph.from_adjacency(self.adjacency_, prune=self.prune, labels=labels)
        self.walk_params_ = params.walk_params
        self.n_vertices_ = d
        return self

    def transform(self, X):
        check_is_fitted(self)
        walk = ContinuousQuantumWalk(self.walk_params_.omega, self.walk_params_.time)
        return walk.fit(self.adjacency_).transform(X)
