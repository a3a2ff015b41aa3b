"""Compile hypercube walks to {U1, U2, U3, CNOT} circuits.

Two encodings are provided:

* separable: one qubit per hypercube axis, each evolved by
  ``U3(2*omega*t, -pi/2, pi/2) = exp(-1j*omega*t*X)``; exact.
* one-hot: the Hamming-level line on ``n + 1`` qubits with one excitation,
  Trotterized over ``H = (omega/2) * sum_i beta_i (X X + Y Y)`` on bond
  ``(i - 1, i)``. Restricted to one excitation, each bond hops with
  amplitude ``omega * beta_i``, matching :func:`walkforge.graphs.pst_line`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate, cx, postselect_onehot, simulate_statevector, u3
from .graphs import pst_line_weights
from .walk import StateVector, WalkDistribution, WalkParams, line_distribution, total_variation

_HALF_PI = math.pi / 2


def compile_hypercube_separable(n: int, params: WalkParams) -> Circuit:
    """``n`` parallel ``U3(2*omega*t, -pi/2, pi/2)`` gates; depth 1."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    theta = 2.0 * params.phase
    return Circuit(n, tuple(u3(q, theta, -_HALF_PI, _HALF_PI) for q in range(n)))


def xxyy_block(theta: float, q_a: int, q_b: int, num_qubits: int | None = None) -> Circuit:
    """Exact ``exp(-1j*(theta/2)*(X_a X_b + Y_a Y_b))`` with two CNOTs.

    ``RX(pi/2)`` on both qubits turns ``YY`` into ``ZZ``; the CNOT pair then
    realizes ``exp(-1j*(theta/2)*(XX + ZZ))`` from ``RX(theta)`` on ``q_a`` and
    ``RZ(theta)`` on ``q_b``. The RZ is written as an anti-diagonal U3 whose
    stray ``X`` commutes through the second CNOT, so the block carries no
    global phase.
    """
    if q_a == q_b:
        raise ValueError("xxyy_block needs two distinct qubits")
    if num_qubits is None:
        num_qubits = max(q_a, q_b) + 1
    rx90 = (_HALF_PI, -_HALF_PI, _HALF_PI)
    gates = (
        u3(q_a, *rx90),
        u3(q_b, *rx90),
        cx(q_a, q_b),
        u3(q_a, theta, -_HALF_PI, _HALF_PI),
        u3(q_b, math.pi, _HALF_PI - theta / 2, theta / 2 - _HALF_PI),
        cx(q_a, q_b),
        u3(q_a, _HALF_PI, _HALF_PI, -_HALF_PI),
        u3(q_b, *rx90),
    )
    return Circuit(num_qubits, gates)


@dataclass(frozen=True)
class TrotterPlan:
    steps: int = 8
    order: str = "first"

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.order not in ("first", "second"):
            raise ValueError(f"order must be 'first' or 'second', got {self.order!r}")

    def schedule(self, n: int, params: WalkParams) -> list[list[tuple[int, float]]]:
        """Per step, the ordered ``(bond, theta)`` pairs; bond ``i`` joins qubits ``i - 1, i``.

        Odd bonds run first, then even bonds; each class is mutually
        commuting. Second order splits the odd class symmetrically around the
        even class.
        """
        beta = pst_line_weights(n)
        dt = params.phase / self.steps
        odd = [i for i in range(1, n + 1) if i % 2 == 1]
        even = [i for i in range(1, n + 1) if i % 2 == 0]
        if self.order == "first" or not even:
            step = [(i, dt * beta[i - 1]) for i in odd + even]
        else:
            half = [(i, 0.5 * dt * beta[i - 1]) for i in odd]
            step = half + [(i, dt * beta[i - 1]) for i in even] + half
        return [list(step) for _ in range(self.steps)]

    def total_angles(self, n: int, params: WalkParams) -> np.ndarray:
        total = np.zeros(n)
        for step in self.schedule(n, params):
            for i, theta in step:
                total[i - 1] += theta
        return total


def compile_onehot_line(n: int, params: WalkParams, plan: TrotterPlan | None = None) -> Circuit:
    """Trotterized one-hot line walk on ``n + 1`` qubits.

    No state preparation is included; start from the excitation on qubit 0
    (basis index 1) to mirror a walk from line vertex 0.
    """
    plan = plan or TrotterPlan()
    gates: list[Gate] = []
    for step in plan.schedule(n, params):
        for i, theta in step:
            gates.extend(xxyy_block(theta, i - 1, i).gates)
    return Circuit(n + 1, tuple(gates))


# U3 (theta, phi, lambda) columns as printed, gate k acting on qubit (k - 1) % 4
# in time layer (k - 1) // 4
TABLE_S1_THETA = (
    1.57, 0, 1.57, 0, 3.14, 1.57, 3.14, 1.57, 1.57, 1.57,
    1.57, 1.57, 3.14, 1.57, 3.14, 1.57, 1.57, 1.57, 1.57, 1.57,
)
TABLE_S1_PHI = (
    3.14, 0, 0, 0, 0.96, -1.14, 0.96, -1.14, -1.57, -3.14,
    -1.57, -3.14, 0.96, -1.14, 0.96, -1.14, -1.57, 4.71, -1.57, -4.71,
)
TABLE_S1_LAMBDA = (
    3.14, 4.71, 0, 4.71, 2.54, -4.71, 2.54, -4.71, -3.14, 4.71,
    -3.14, 4.71, 2.54, -4.71, 2.54, -4.71, -1.57, 4.71, -1.57, -1.57,
)
TABLE_S1_CNOT_LAYER = ((0, 1), (2, 3))


def load_table_s1() -> Circuit:
    """Four-qubit one-hot circuit from the published parameter table.

    Five layers of four U3 gates, read column by column, separated by
    ``cx(0, 1)`` and ``cx(2, 3)``. The excitation of qubit 0 is folded into
    the first layer, so the circuit starts from ``|0000>``.
    """
    gates: list[Gate] = []
    for layer in range(5):
        for q in range(4):
            k = 4 * layer + q
            gates.append(u3(q, TABLE_S1_THETA[k], TABLE_S1_PHI[k], TABLE_S1_LAMBDA[k]))
        if layer < 4:
            gates.extend(cx(c, t) for c, t in TABLE_S1_CNOT_LAYER)
    return Circuit(4, tuple(gates))


REFERENCE_PHASES = (math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi)


@dataclass(frozen=True)
class TableS1Report:
    distribution: WalkDistribution
    discarded_fraction: float
    tv_by_phase: dict
    best_phase: float

    @property
    def best_tv(self) -> float:
        return self.tv_by_phase[self.best_phase]


def table_s1_report(phases=REFERENCE_PHASES, initial=0) -> TableS1Report:
    """Post-selected output of :func:`load_table_s1` compared with the exact line walk.

    ``phases`` are values of ``omega * t``; the best-fit one minimizes total
    variation against the exact walk on ``pst_line(3)`` from vertex 0.
    """
    psi = simulate_statevector(load_table_s1(), StateVector.basis(initial, 16))
    result = postselect_onehot(psi)
    tvs = {
        float(s): total_variation(result.distribution, line_distribution(3, WalkParams.from_phase(s)))
        for s in phases
    }
    best = min(tvs, key=tvs.get)
    return TableS1Report(result.distribution, result.discarded_fraction, tvs, best)
