"""Exact continuous-time quantum walk evolution.

Units: hbar = 1 and only the product ``s = omega * time`` enters the
dynamics, ``psi(t) = exp(-1j * s * A) psi(0)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, DimensionTooLarge, NotNormalized
from .graphs import (
    MAX_HYPERCUBE_DIM,
    NORM_TOL,
    Graph,
    HammingProfile,
    binomial_profile,
    bit_labels,
    parse_bits,
    popcount,
    pst_line,
)
from .numlin import expm_i_hermitian

DENSE_LIMIT = 4096


@dataclass(frozen=True)
class WalkParams:
    """Hopping frequency and evolution time."""

    omega: float = 1.0
    time: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.omega) and np.isfinite(self.time)):
            raise ValueError("omega and time must be finite")

    @classmethod
    def from_phase(cls, s: float, omega: float = 1.0) -> "WalkParams":
        return cls(omega=omega, time=s / omega)

    @classmethod
    def from_theta(cls, theta: float, omega: float = 1.0) -> "WalkParams":
        """U3 rotation angle convention: ``theta = 2 * omega * time``."""
        return cls(omega=omega, time=theta / (2.0 * omega))

    @property
    def phase(self) -> float:
        return float(self.omega * self.time)

    def rescaled(self, b: float) -> "WalkParams":
        """Params for the graph ``b * A``: same dynamics with ``omega / b``."""
        return WalkParams(omega=self.omega / b, time=self.time)


class StateVector:
    """Normalized amplitude vector over the computational basis.

    Vertex ``v`` of a graph is basis state ``v``; for qubit registers qubit 0
    is the least significant bit of ``v``.
    """

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes, tol: float = NORM_TOL):
        a = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        if a.size < 1:
            raise DimensionMismatch("state vector must be non-empty")
        norm = np.linalg.norm(a)
        if abs(norm - 1.0) > tol:
            raise NotNormalized(f"state has norm {norm!r}; normalize it explicitly")
        a.setflags(write=False)
        self.amplitudes = a

    @classmethod
    def basis(cls, index: int, dim: int) -> "StateVector":
        if not 0 <= index < dim:
            raise ValueError(f"basis index {index} out of range for dimension {dim}")
        a = np.zeros(dim, dtype=np.complex128)
        a[index] = 1.0
        return cls(a)

    @classmethod
    def from_bits(cls, bits: str) -> "StateVector":
        """Basis state labelled by a bit string, most significant bit (highest qubit) first."""
        n = len(bits)
        return cls.basis(parse_bits(bits, n), 2**n)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def num_qubits(self) -> int:
        n = self.dim.bit_length() - 1
        if self.dim != 2**n:
            raise DimensionMismatch(f"dimension {self.dim} is not a power of two")
        return n

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __len__(self):
        return self.dim

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def __repr__(self):
        return f"StateVector(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class WalkDistribution:
    """Detection probabilities at a time, with optional shot counts."""

    probabilities: np.ndarray
    time: Optional[float] = None
    labels: Optional[tuple[str, ...]] = None
    counts: Optional[np.ndarray] = None
    bits: Optional[int] = None

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float).reshape(-1)
        if np.any(p < -NORM_TOL):
            raise ValueError("probabilities must be non-negative")
        if abs(p.sum() - 1.0) > NORM_TOL:
            raise NotNormalized(f"distribution sums to {p.sum()!r}")
        if self.labels is not None and len(self.labels) != p.size:
            raise DimensionMismatch(f"{len(self.labels)} labels for {p.size} probabilities")
        object.__setattr__(self, "probabilities", np.clip(p, 0.0, None))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_state(cls, psi: StateVector, time=None, labels=None) -> "WalkDistribution":
        p = psi.probabilities()
        return cls(p / p.sum(), time=time, labels=labels)

    def label(self, v: int) -> str:
        if self.labels is not None:
            return self.labels[v]
        if self.bits is not None:
            return format(v, f"0{self.bits}b")
        return str(v)

    @property
    def shots(self) -> Optional[int]:
        return None if self.counts is None else int(np.sum(self.counts))

    def __len__(self):
        return self.probabilities.size

    def rows(self):
        for v, p in enumerate(self.probabilities):
            yield self.label(v), float(p)


def total_variation(p, q) -> float:
    p = np.asarray(getattr(p, "probabilities", p), dtype=float)
    q = np.asarray(getattr(q, "probabilities", q), dtype=float)
    if p.shape != q.shape:
        raise DimensionMismatch(f"cannot compare distributions of shapes {p.shape} and {q.shape}")
    return 0.5 * float(np.abs(p - q).sum())


def _as_state(psi0, dim: int) -> StateVector:
    """Coerce a vertex index, bit string, amplitude vector or state to a state of ``dim``."""
    if isinstance(psi0, str):
        if dim & (dim - 1):
            raise DimensionMismatch(f"bit-string state on a graph with {dim} vertices (not a power of two)")
        psi0 = parse_bits(psi0, dim.bit_length() - 1)
    if isinstance(psi0, (int, np.integer)):
        psi0 = StateVector.basis(int(psi0), dim)
    elif not isinstance(psi0, StateVector):
        psi0 = StateVector(psi0)
    if psi0.dim != dim:
        raise DimensionMismatch(f"state of dimension {psi0.dim} on a graph with {dim} vertices")
    return psi0


def propagator(g: Graph, params: WalkParams) -> np.ndarray:
    """Dense ``exp(-1j * omega * t * A)``; limited to ``DENSE_LIMIT`` vertices."""
    if g.num_vertices > DENSE_LIMIT:
        raise DimensionTooLarge(
            f"{g.num_vertices} vertices exceeds the dense limit {DENSE_LIMIT}; "
            "use evolve_hypercube_product for large hypercubes"
        )
    return expm_i_hermitian(g.adjacency(), params.phase)


def evolve_exact(g: Graph, params: WalkParams, psi0) -> StateVector:
    psi0 = _as_state(psi0, g.num_vertices)
    u = propagator(g, params)
    out = u @ psi0.amplitudes
    return StateVector(out / np.linalg.norm(out))


def distribution(g: Graph, params: WalkParams, psi0) -> WalkDistribution:
    psi = evolve_exact(g, params, psi0)
    return WalkDistribution.from_state(psi, time=params.time, labels=g.labels)


def perfect_transfer_fidelity(g: Graph, params: WalkParams, src: int, dst: int) -> float:
    """``|<dst| exp(-1j*omega*t*A) |src>|**2``."""
    d = g.num_vertices
    if not (0 <= src < d and 0 <= dst < d):
        raise ValueError(f"vertices ({src}, {dst}) out of range for {d} vertices")
    psi = evolve_exact(g, params, StateVector.basis(src, d))
    return float(min(1.0, abs(psi.amplitudes[dst]) ** 2))


@dataclass(frozen=True)
class HypercubeProduct:
    """Hypercube walk evaluated through its tensor-product structure.

    Each qubit evolves as ``exp(-1j*s*X)``, flipping with probability
    ``sin(s)**2``, so memory stays O(n) for any dimension up to 20.
    """

    n: int
    params: WalkParams
    origin: int = 0

    @property
    def flip_probability(self) -> float:
        return float(np.sin(self.params.phase) ** 2)

    @property
    def profile(self) -> HammingProfile:
        return HammingProfile(binomial_profile(self.n, self.flip_probability))

    def distance(self, vertex) -> int:
        v = parse_bits(vertex, self.n)
        return int(popcount(np.uint64(v ^ self.origin)))

    def amplitude(self, vertex) -> complex:
        s = self.params.phase
        k = self.distance(vertex)
        return complex(np.cos(s) ** (self.n - k) * (-1j * np.sin(s)) ** k)

    def probability(self, vertex) -> float:
        p = self.flip_probability
        k = self.distance(vertex)
        return float(p**k * (1.0 - p) ** (self.n - k))

    def probabilities(self) -> np.ndarray:
        """All ``2**n`` vertex probabilities; materializes O(2**n) memory."""
        p = self.flip_probability
        k = popcount(np.arange(2**self.n, dtype=np.uint64) ^ np.uint64(self.origin))
        return p**k * (1.0 - p) ** (self.n - k)


def evolve_hypercube_product(n: int, params: WalkParams, origin: str | int = 0) -> HypercubeProduct:
    n = int(n)
    if not 1 <= n <= MAX_HYPERCUBE_DIM:
        raise DimensionTooLarge(f"hypercube dimension must be in [1, {MAX_HYPERCUBE_DIM}], got {n}")
    return HypercubeProduct(n, params, parse_bits(origin, n))


def line_distribution(n: int, params: WalkParams, start: int = 0) -> WalkDistribution:
    """Exact walk on the engineered line ``pst_line(n)``."""
    g = pst_line(n)
    return distribution(g, params, StateVector.basis(start, g.num_vertices))


__all__ = [
    "DENSE_LIMIT",
    "HypercubeProduct",
    "StateVector",
    "WalkDistribution",
    "WalkParams",
    "bit_labels",
    "distribution",
    "evolve_exact",
    "evolve_hypercube_product",
    "line_distribution",
    "perfect_transfer_fidelity",
    "propagator",
    "total_variation",
]
