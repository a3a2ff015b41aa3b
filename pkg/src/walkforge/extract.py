"""From circuits back to walk graphs.

A circuit unitary ``U`` is read as ``exp(-1j*omega*t*A)``. Besides the
principal logarithm, the adjacency matrix carries three free knobs:

* ``phi``: a real diagonal shift ``phi * I`` (global phase of ``U``);
* ``k``: an integer multiple of ``2*pi/(d*omega*t)`` times the all-ones
  matrix ``J``, using that ``J/d`` is a projector;
* ``b``: a rescale ``A -> b*A`` paired with ``omega -> omega/b``.

The ``k`` term leaves ``U`` unchanged only when ``A`` commutes with ``J``,
i.e. when the uniform superposition is an eigenvector of ``U``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .circuit import Circuit, Gate, circuit_unitary, cx, simulate_statevector, u3
from .errors import DimensionMismatch, NotUnitary, ZeroTime
from .graphs import Graph, bit_labels, parse_bits
from .numlin import UNITARY_TOL, as_complex_matrix, is_unitary, logm_unitary_principal
from .walk import StateVector, WalkDistribution, WalkParams, propagator


@dataclass(frozen=True)
class ExtractionParams:
    omega: float = 1.0
    time: float = 1.0
    k: int = 0
    phi: float = 0.0
    b: float = 1.0
    prune: float = 1e-9

    def __post_init__(self):
        if self.omega * self.time == 0:
            raise ZeroTime("omega * time must be non-zero")
        if self.b == 0:
            raise ValueError("frequency rescale b must be non-zero")
        if int(self.k) != self.k:
            raise ValueError(f"k must be an integer, got {self.k}")

    @property
    def phase(self) -> float:
        return float(self.omega * self.time)

    @property
    def walk_params(self) -> WalkParams:
        """Params under which the extracted graph reproduces ``U``: ``omega' = omega / b``."""
        return WalkParams(omega=self.omega / self.b, time=self.time)


def adjacency_from_unitary(u, p: ExtractionParams = ExtractionParams(), tol: float = UNITARY_TOL) -> np.ndarray:
    """Dense ``b * ((i/s) log U + phi I + (2 pi k / (d s)) J)`` with ``s = omega * t``."""
    u = as_complex_matrix(u)
    if not is_unitary(u, tol):
        raise NotUnitary(f"matrix is not unitary within {tol:g}")
    d = u.shape[0]
    s = p.phase
    # log U = 1j * L, so (i/s) log U = -L/s
    a = -logm_unitary_principal(u, tol) / s
    a = a + p.phi * np.eye(d)
    if p.k:
        a = a + (2.0 * math.pi * p.k / (d * s)) * np.ones((d, d))
    return p.b * a


def graph_from_unitary(u, p: ExtractionParams = ExtractionParams(), labels=None) -> Graph:
    a = adjacency_from_unitary(u, p)
    d = a.shape[0]
    if labels is None and d >= 2 and d & (d - 1) == 0:
        labels = bit_labels(d.bit_length() - 1)
    return Graph.from_adjacency(a, prune=p.prune, labels=labels)


def graph_from_circuit(c: Circuit, p: ExtractionParams = ExtractionParams()) -> Graph:
    return graph_from_unitary(circuit_unitary(c), p)


def is_chiral(g: Graph, tol: float = 1e-9) -> bool:
    """True if any edge weight has an imaginary part above ``tol``."""
    return any(abs(w.imag) > tol for w in g.edges.values())


# -- random perfect-transfer sampler ----------------------------------------


@dataclass(frozen=True)
class CouplingMap:
    """Directed qubit pairs ``(control, target)`` on which a CNOT may act."""

    num_qubits: int
    pairs: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        pairs = frozenset((int(c), int(t)) for c, t in self.pairs)
        for c, t in pairs:
            if c == t:
                raise ValueError(f"coupling map pair ({c}, {t}) is reflexive")
            if not (0 <= c < self.num_qubits and 0 <= t < self.num_qubits):
                raise ValueError(f"coupling map pair ({c}, {t}) out of range")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def linear(cls, num_qubits: int) -> "CouplingMap":
        return cls(num_qubits, frozenset(p for q in range(num_qubits - 1) for p in ((q, q + 1), (q + 1, q))))

    @classmethod
    def full(cls, num_qubits: int) -> "CouplingMap":
        return cls(num_qubits, frozenset((c, t) for c in range(num_qubits) for t in range(num_qubits) if c != t))

    def allows(self, g: Gate) -> bool:
        return g.kind != "cx" or (g.control, g.target) in self.pairs


ANGLE_GRID = tuple(math.pi * x for x in (0.0, 0.25, -0.25, 0.5, -0.5, 0.75, -0.75, 1.0))


@dataclass(frozen=True)
class SamplerConfig:
    """Random circuit search settings.

    Each try builds ``max_depth`` layers. Within a layer, CNOTs are placed on
    random free coupling-map pairs with probability ``cnot_prob`` and every
    remaining qubit receives a U3 with probability ``u3_prob``.
    """

    num_qubits: int = 4
    max_depth: int = 5
    max_tries: int = 10_000
    seed: int = 0
    fidelity_threshold: float = 1 - 1e-6
    palette: tuple[str, ...] = ("u3", "cx")
    angles: str = "grid"
    cnot_prob: float = 0.35
    u3_prob: float = 0.75
    max_results: Optional[int] = None

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if not 0 < self.fidelity_threshold <= 1:
            raise ValueError("fidelity_threshold must lie in (0, 1]")
        if not set(self.palette) <= {"u3", "cx"} or not self.palette:
            raise ValueError(f"palette must be a non-empty subset of {{'u3', 'cx'}}, got {self.palette}")
        if self.angles not in ("grid", "uniform"):
            raise ValueError(f"angles must be 'grid' or 'uniform', got {self.angles!r}")


@dataclass(frozen=True)
class SampledCircuit:
    try_index: int
    circuit: Circuit
    fidelity: float


def _angle(cfg: SamplerConfig, rng: np.random.Generator) -> float:
    if cfg.angles == "grid":
        return ANGLE_GRID[rng.integers(len(ANGLE_GRID))]
    return float(rng.uniform(-math.pi, math.pi))


def random_circuit(cfg: SamplerConfig, cmap: CouplingMap, rng: np.random.Generator) -> Circuit:
    pairs = sorted(cmap.pairs)
    gates: list[Gate] = []
    for _ in range(cfg.max_depth):
        free = set(range(cfg.num_qubits))
        if "cx" in cfg.palette and pairs:
            for idx in rng.permutation(len(pairs)):
                c, t = pairs[idx]
                if c in free and t in free and rng.random() < cfg.cnot_prob:
                    gates.append(cx(c, t))
                    free -= {c, t}
        if "u3" in cfg.palette:
            for q in sorted(free):
                if rng.random() < cfg.u3_prob:
                    gates.append(u3(q, _angle(cfg, rng), _angle(cfg, rng), _angle(cfg, rng)))
    return Circuit(cfg.num_qubits, tuple(gates))


def transfer_fidelity(c: Circuit) -> float:
    """``|<1...1| U |0...0>|**2`` under ideal simulation."""
    psi = simulate_statevector(c)
    return float(min(1.0, abs(psi.amplitudes[-1]) ** 2))


def try_rng(seed: int, try_index: int) -> np.random.Generator:
    return np.random.default_rng([seed, try_index])


def sample_perfect_transfer(cfg: SamplerConfig, cmap: Optional[CouplingMap] = None) -> list[SampledCircuit]:
    """Random circuits moving ``|0...0>`` to ``|1...1>`` with fidelity above threshold.

    Tries are independent and seeded from ``(cfg.seed, try_index)``; results
    come back ordered by try. An empty list means nothing was found.
    """
    cmap = cmap or CouplingMap.linear(cfg.num_qubits)
    if cmap.num_qubits != cfg.num_qubits:
        raise DimensionMismatch(f"coupling map has {cmap.num_qubits} qubits, config {cfg.num_qubits}")
    found = []
    for t in range(cfg.max_tries):
        c = random_circuit(cfg, cmap, try_rng(cfg.seed, t))
        f = transfer_fidelity(c)
        if f >= cfg.fidelity_threshold:
            found.append(SampledCircuit(t, c, f))
            if cfg.max_results is not None and len(found) >= cfg.max_results:
                break
    return found


# -- transport report ---------------------------------------------------------


@dataclass(frozen=True)
class TransportRow:
    initial: int
    distribution: WalkDistribution
    invariant_subspace: tuple[int, ...]

    @property
    def peak(self) -> int:
        return int(np.argmax(self.distribution.probabilities))


@dataclass(frozen=True)
class TransportReport:
    params: WalkParams
    rows: tuple[TransportRow, ...]

    def table(self) -> list[dict]:
        out = []
        for row in self.rows:
            dist = row.distribution
            for v, prob in enumerate(dist.probabilities):
                out.append(
                    {
                        "initial": dist.label(row.initial),
                        "label": dist.label(v),
                        "probability": float(prob),
                    }
                )
        return out


def _support_closure(u: np.ndarray, start: int, tol: float) -> tuple[int, ...]:
    """Smallest vertex set containing ``start`` that ``u`` maps into itself, up to ``tol``."""
    support = {start}
    frontier = [start]
    while frontier:
        j = frontier.pop()
        for v in np.flatnonzero(np.abs(u[:, j]) ** 2 > tol):
            if int(v) not in support:
                support.add(int(v))
                frontier.append(int(v))
    return tuple(sorted(support))


def transport_report(
    g: Graph, params: WalkParams, initial_states: Iterable, tol: float = 1e-6
) -> TransportReport:
    """Vertex distributions at ``params.time`` for each basis initial state.

    Initial states are vertex indices or bit strings. The invariant subspace
    of a row is the support reached by repeatedly applying the propagator.
    """
    u = propagator(g, params)
    d = g.num_vertices
    rows = []
    for init in initial_states:
        if isinstance(init, str):
            init = parse_bits(init, d.bit_length() - 1)
        init = int(init)
        out = u[:, init]
        dist = WalkDistribution(np.abs(out) ** 2 / np.sum(np.abs(out) ** 2), time=params.time, labels=g.labels)
        rows.append(TransportRow(init, dist, _support_closure(u, init, tol)))
    return TransportReport(params, tuple(rows))
