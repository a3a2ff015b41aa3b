import math

import numpy as np
import pytest
import scipy.linalg

from walkforge.circuit import circuit_unitary, onehot_leakage, postselect_onehot, simulate_statevector
from walkforge.compilers import (
    TABLE_S1_LAMBDA,
    TrotterPlan,
    compile_hypercube_separable,
    compile_onehot_line,
    load_table_s1,
    table_s1_report,
    xxyy_block,
)
from walkforge.graphs import hamming_profile, hypercube, pst_line_weights
from walkforge.numlin import expm_i_hermitian
from walkforge.walk import StateVector, WalkParams, evolve_hypercube_product, line_distribution, total_variation

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
XXYY = np.kron(X, X) + np.kron(Y, Y)
HP = math.pi / 2


def phase(s):
    return WalkParams.from_phase(s)


def onehot_start(n):
    return StateVector.basis(1, 2 ** (n + 1))


class TestSeparable:
    def test_cube_transfer(self):
        c = compile_hypercube_separable(3, phase(HP))
        assert len(c) == 3 and c.depth() == 1
        assert all(g.u3_params == (math.pi, -HP, HP) for g in c)
        assert simulate_statevector(c).probabilities()[7] == pytest.approx(1, abs=1e-12)

    def test_zero_time_identity(self):
        np.testing.assert_allclose(circuit_unitary(compile_hypercube_separable(1, phase(0))), np.eye(2), atol=1e-15)

    def test_twenty_dim_quarter(self):
        psi = simulate_statevector(compile_hypercube_separable(20, phase(math.pi / 4)))
        expected = evolve_hypercube_product(20, phase(math.pi / 4)).profile.levels
        np.testing.assert_allclose(hamming_profile(psi.probabilities()).levels, expected, atol=1e-9)
        np.testing.assert_allclose(expected, [math.comb(20, k) / 2**20 for k in range(21)], atol=1e-15)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_exact_unitary(self, n, rng):
        a = hypercube(n).adjacency()
        for s in rng.uniform(-5, 5, size=4):
            np.testing.assert_allclose(
                circuit_unitary(compile_hypercube_separable(n, phase(s))), expm_i_hermitian(a, s), atol=1e-9
            )


class TestXXYYBlock:
    @staticmethod
    def closed_form(theta):
        u = np.eye(4, dtype=complex)
        u[1:3, 1:3] = [[math.cos(theta), -1j * math.sin(theta)], [-1j * math.sin(theta), math.cos(theta)]]
        return u

    @pytest.mark.parametrize("theta", [0.0, 0.1, HP, 2.0, math.pi, -0.7, 5.0])
    @pytest.mark.parametrize("order", [(0, 1), (1, 0)])
    def test_matches_closed_form(self, theta, order):
        u = circuit_unitary(xxyy_block(theta, *order))
        np.testing.assert_allclose(u, self.closed_form(theta), atol=1e-10)
        np.testing.assert_allclose(u, scipy.linalg.expm(-0.5j * theta * XXYY), atol=1e-10)

    def test_gate_budget(self):
        c = xxyy_block(0.3, 0, 1)
        assert c.count("cx") == 2
        assert {g.kind for g in c} <= {"u1", "u2", "u3", "cx"}

    def test_zero_is_identity(self):
        np.testing.assert_allclose(circuit_unitary(xxyy_block(0, 0, 1)), np.eye(4), atol=1e-15)

    def test_half_swap(self):
        u = scipy.linalg.expm(-0.5j * HP * XXYY)
        # basis index 1 = qubit 0 excited, index 2 = qubit 1 excited
        assert u[2, 1] == pytest.approx(-1j)
        np.testing.assert_allclose(circuit_unitary(xxyy_block(HP, 0, 1)), u, atol=1e-10)

    def test_full_turn(self):
        u = circuit_unitary(xxyy_block(math.pi, 0, 1))
        np.testing.assert_allclose(u[1:3, 1:3], -np.eye(2), atol=1e-10)

    def test_embedding(self):
        c = xxyy_block(0.4, 2, 1, num_qubits=4)
        psi = simulate_statevector(c, StateVector.basis(0b0100, 16))
        assert abs(psi.amplitudes[0b0010]) ** 2 == pytest.approx(math.sin(0.4) ** 2)


class TestTrotterPlan:
    @pytest.mark.parametrize("order", ["first", "second"])
    def test_total_angle(self, order):
        plan = TrotterPlan(7, order)
        np.testing.assert_allclose(plan.total_angles(5, phase(1.3)), 1.3 * pst_line_weights(5), atol=1e-12)

    def test_odd_bonds_first(self):
        step = TrotterPlan(1).schedule(4, phase(1))[0]
        assert [i for i, _ in step] == [1, 3, 2, 4]

    def test_validation(self):
        with pytest.raises(ValueError):
            TrotterPlan(0)
        with pytest.raises(ValueError):
            TrotterPlan(2, "third")


class TestOneHot:
    def test_accurate_mode(self):
        n, s = 3, HP
        c = compile_onehot_line(n, phase(s), TrotterPlan(256))
        r = postselect_onehot(simulate_statevector(c, onehot_start(n)))
        assert total_variation(r.distribution, line_distribution(n, phase(s))) < 2e-3
        assert r.distribution.probabilities[3] == pytest.approx(1, abs=2e-3)

    def test_single_step_short_time(self):
        n, s = 3, 0.05
        c = compile_onehot_line(n, phase(s), TrotterPlan(1))
        r = postselect_onehot(simulate_statevector(c, onehot_start(n)))
        assert total_variation(r.distribution, line_distribution(n, phase(s))) < 1e-3

    def test_single_bond_is_exact(self):
        for s in (0.3, 1.1, 2.9):
            c = compile_onehot_line(1, phase(s), TrotterPlan(1))
            r = postselect_onehot(simulate_statevector(c, onehot_start(1)))
            assert total_variation(r.distribution, line_distribution(1, phase(s))) < 1e-9

    def test_second_order_beats_first(self):
        n, s = 4, HP
        exact = line_distribution(n, phase(s))
        tv = {}
        for order in ("first", "second"):
            c = compile_onehot_line(n, phase(s), TrotterPlan(16, order))
            tv[order] = total_variation(postselect_onehot(simulate_statevector(c, onehot_start(n))).distribution, exact)
        assert tv["second"] < tv["first"]

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_excitation_conserved_per_block(self, n, rng):
        c = compile_onehot_line(n, phase(float(rng.uniform(0, 3))), TrotterPlan(3, "second"))
        assert c.num_qubits == n + 1
        for q in range(n + 1):
            assert onehot_leakage(simulate_statevector(c, StateVector.basis(1 << q, 2 ** (n + 1)))) < 1e-9

    def test_gate_count_bound(self):
        n, steps = 4, 5
        c = compile_onehot_line(n, phase(1), TrotterPlan(steps))
        assert c.count("cx") == 2 * n * steps
        assert len(c) <= steps * n * (2 + 6)


class TestTableS1:
    def test_parameters_match_print(self):
        c = load_table_s1()
        single = [g for g in c if g.kind != "cx"]
        assert len(single) == 20
        assert single[0].u3_params == (1.57, 3.14, 3.14)
        assert single[1].u3_params == (0, 0, 4.71)
        assert tuple(g.lam for g in single) == TABLE_S1_LAMBDA
        assert c.num_qubits == 4

    def test_report(self):
        r = table_s1_report()
        assert r.distribution.probabilities.sum() == pytest.approx(1)
        assert 0 <= r.discarded_fraction < 1e-3
        assert set(r.tv_by_phase) == {math.pi / 4, HP, 3 * math.pi / 4, math.pi}
        assert r.best_tv == min(r.tv_by_phase.values())
