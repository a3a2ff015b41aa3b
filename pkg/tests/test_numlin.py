import math

import numpy as np
import pytest
import scipy.linalg
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hermitian
from walkforge.errors import NotHermitian, NotUnitary
from walkforge.graphs import hypercube
from walkforge.numlin import (
    eig_hermitian,
    equal_up_to_global_phase,
    expm_i_hermitian,
    is_unitary,
    logm_unitary_principal,
    max_abs,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)


class TestEigHermitian:
    def test_identity(self):
        w, v = eig_hermitian(np.eye(2))
        np.testing.assert_allclose(w, [1, 1])
        np.testing.assert_allclose(v.conj().T @ v, np.eye(2), atol=1e-12)

    def test_pauli_x(self):
        w, _ = eig_hermitian(X)
        np.testing.assert_allclose(w, [-1, 1], atol=1e-12)

    def test_cube_spectrum_matches_characteristic_polynomial(self):
        a = hypercube(3).adjacency().real.astype(int)
        lam = sympy.symbols("lam")
        roots = sympy.roots(sympy.Matrix(a).charpoly(lam).as_expr(), lam)
        expected = sorted(float(r) for r, mult in roots.items() for _ in range(mult))
        assert expected == [-3, -1, -1, -1, 1, 1, 1, 3]
        w, _ = eig_hermitian(a)
        np.testing.assert_allclose(w, expected, atol=1e-12)

    def test_reconstruction_and_orthonormality(self, rng):
        h = random_hermitian(rng, 12, scale=5.0)
        dec = eig_hermitian(h)
        assert max_abs(dec.reconstruct() - h) <= 1e-10 * max(1, max_abs(h))
        v = dec.eigenvectors
        assert max_abs(v.conj().T @ v - np.eye(12)) <= 1e-10
        assert np.all(np.diff(dec.eigenvalues) >= 0)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            eig_hermitian([[0, 1], [0, 0]])

    def test_spectrum_shift(self, rng):
        h = random_hermitian(rng, 6)
        w0 = eig_hermitian(h).eigenvalues
        w1 = eig_hermitian(h + 2.5 * np.eye(6)).eigenvalues
        np.testing.assert_allclose(w1, w0 + 2.5, atol=1e-10)


class TestExpm:
    def test_zero_time(self, rng):
        np.testing.assert_allclose(expm_i_hermitian(random_hermitian(rng, 5), 0.0), np.eye(5), atol=1e-14)

    def test_pauli_x_quarter_turn(self):
        np.testing.assert_allclose(expm_i_hermitian(X, math.pi / 2), [[0, -1j], [-1j, 0]], atol=1e-15)

    def test_cube_transfer(self):
        u = expm_i_hermitian(hypercube(3).adjacency(), math.pi / 2)
        assert abs(u[7, 0]) ** 2 == pytest.approx(1.0, abs=1e-12)
        assert u[7, 0] == pytest.approx((-1j) ** 3, abs=1e-12)

    def test_matches_pade_oracle(self, rng):
        h = random_hermitian(rng, 9)
        for s in (0.3, -1.7, 4.0):
            np.testing.assert_allclose(expm_i_hermitian(h, s), scipy.linalg.expm(-1j * s * h), atol=1e-11)

    def test_unitarity(self, rng):
        u = expm_i_hermitian(random_hermitian(rng, 16, scale=10), 3.3)
        assert max_abs(u.conj().T @ u - np.eye(16)) <= 1e-10


class TestLogm:
    def test_identity(self):
        np.testing.assert_allclose(logm_unitary_principal(np.eye(3)), np.zeros((3, 3)), atol=1e-15)

    def test_minus_identity_maps_to_plus_pi(self):
        np.testing.assert_allclose(logm_unitary_principal(-np.eye(2)), math.pi * np.eye(2), atol=1e-12)

    def test_rotation(self):
        u = scipy.linalg.expm(1j * 0.3 * X)
        np.testing.assert_allclose(logm_unitary_principal(u), 0.3 * X, atol=1e-9)

    def test_degenerate_spectrum(self):
        u = scipy.linalg.expm(-1j * 0.4 * hypercube(4).adjacency())
        log = logm_unitary_principal(u)
        np.testing.assert_allclose(scipy.linalg.expm(1j * log), u, atol=1e-10)
        np.testing.assert_allclose(log, -0.4 * hypercube(4).adjacency(), atol=1e-10)

    def test_rejects_non_unitary(self):
        with pytest.raises(NotUnitary):
            logm_unitary_principal([[1, 1], [0, 1]])

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=1, max_value=8), st.integers(min_value=0, max_value=2**32 - 1))
    def test_round_trip_small_spectrum(self, d, seed):
        rng = np.random.default_rng(seed)
        h = random_hermitian(rng, d)
        radius = np.max(np.abs(np.linalg.eigvalsh(h)))
        h = h * (0.9 * math.pi / radius) if radius > 0.9 * math.pi else h
        # expm computes exp(-i s H); s = -1 gives exp(iH)
        assert max_abs(logm_unitary_principal(expm_i_hermitian(h, -1.0)) - h) <= 1e-8

    def test_branch_range(self, rng):
        u = scipy.linalg.expm(1j * random_hermitian(rng, 10, scale=8))
        log = logm_unitary_principal(u)
        w = np.linalg.eigvalsh(log)
        assert np.all(w > -math.pi) and np.all(w <= math.pi + 1e-12)
        assert max_abs(scipy.linalg.expm(1j * log) - u) <= 1e-8


def test_global_phase_equality():
    u = scipy.linalg.expm(-0.5j * X)
    assert equal_up_to_global_phase(np.exp(0.77j) * u, u)
    assert not equal_up_to_global_phase(X, np.eye(2))
    assert is_unitary(u)
