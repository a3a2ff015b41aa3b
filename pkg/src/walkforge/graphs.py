"""Complex-weighted Hermitian graphs and the graph families walked on.

A :class:`Graph` stores only the upper triangle (``i <= j``) of its
adjacency matrix; the lower triangle is implied by Hermitian symmetry.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .errors import DimensionTooLarge, LengthMismatch, NotHermitian, NotNormalized, ParseError
from .numlin import as_complex_matrix, is_hermitian

MAX_HYPERCUBE_DIM = 20
PRUNE_TOL = 1e-9
NORM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Graph:
    """Vertex count plus Hermitian edge weights.

    ``edges`` may list either orientation of an edge; when both ``(i, j)``
    and ``(j, i)`` are present they must be complex conjugates of each
    other. Diagonal entries (self-loops) must be real.
    """

    num_vertices: int
    edges: Mapping[tuple[int, int], complex] = field(default_factory=dict)
    labels: Optional[tuple[str, ...]] = None
    tol: float = 1e-12

    def __post_init__(self):
        d = int(self.num_vertices)
        if d < 1:
            raise ValueError(f"num_vertices must be >= 1, got {self.num_vertices}")
        upper: dict[tuple[int, int], complex] = {}
        for (i, j), w in dict(self.edges).items():
            i, j, w = int(i), int(j), complex(w)
            if not (0 <= i < d and 0 <= j < d):
                raise IndexError(f"edge ({i}, {j}) out of range for {d} vertices")
            if i > j:
                i, j, w = j, i, w.conjugate()
            if i == j and abs(w.imag) > self.tol:
                raise NotHermitian(f"self-loop at {i} has non-real weight {w}")
            if (i, j) in upper and abs(upper[(i, j)] - w) > self.tol * max(1.0, abs(w)):
                raise NotHermitian(
                    f"edge ({i}, {j}) given twice with non-conjugate weights {upper[(i, j)]} and {w}"
                )
            upper[(i, j)] = complex(w.real, 0.0) if i == j else w
        labels = self.labels
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != d:
                raise LengthMismatch(f"{len(labels)} labels for {d} vertices")
        object.__setattr__(self, "num_vertices", d)
        object.__setattr__(self, "edges", dict(sorted(upper.items())))
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_adjacency(cls, a, *, prune: float = PRUNE_TOL, labels=None, tol: float = 1e-8) -> "Graph":
        """Build a graph from a Hermitian matrix, dropping entries with ``|w| <= prune``."""
        a = as_complex_matrix(a)
        if not is_hermitian(a, tol):
            raise NotHermitian(f"adjacency matrix is not Hermitian within {tol:g}")
        a = 0.5 * (a + a.conj().T)
        iu, ju = np.triu_indices(a.shape[0])
        w = a[iu, ju]
        keep = np.abs(w) > prune
        edges = {(int(i), int(j)): complex(x) for i, j, x in zip(iu[keep], ju[keep], w[keep])}
        return cls(a.shape[0], edges, labels=labels)

    def weight(self, i: int, j: int) -> complex:
        if i <= j:
            return self.edges.get((i, j), 0j)
        return self.edges.get((j, i), 0j).conjugate()

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.num_vertices, self.num_vertices), dtype=np.complex128)
        for (i, j), w in self.edges.items():
            a[i, j] = w
            a[j, i] = w.conjugate()
        return a

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.num_vertices == other.num_vertices
            and self.edges == other.edges
            and self.labels == other.labels
        )

    def __repr__(self):
        return f"Graph(num_vertices={self.num_vertices}, num_edges={len(self.edges)})"


def bit_labels(n: int) -> tuple[str, ...]:
    """Binary labels of ``0 .. 2**n - 1``, most significant bit first.

    Character ``n - 1 - q`` of a label is the state of qubit ``q``, so qubit 0
    is the rightmost character.
    """
    return tuple(format(v, f"0{n}b") for v in range(2**n))


def _check_dim(n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if n > MAX_HYPERCUBE_DIM:
        raise DimensionTooLarge(f"dimension {n} exceeds the supported maximum {MAX_HYPERCUBE_DIM}")
    return n


def hypercube(n: int) -> Graph:
    """The n-dimensional hypercube: bit strings joined at Hamming distance 1."""
    n = _check_dim(n)
    edges = {}
    for v in range(2**n):
        for b in range(n):
            u = v ^ (1 << b)
            if v < u:
                edges[(v, u)] = 1.0
    return Graph(2**n, edges, labels=bit_labels(n))


def pst_line_weights(n: int) -> np.ndarray:
    """Couplings ``sqrt(i * (n + 1 - i))`` for ``i = 1 .. n``."""
    n = _check_dim(n)
    i = np.arange(1, n + 1)
    return np.sqrt(i * (n + 1 - i))


def pst_line(n: int) -> Graph:
    """Weighted path on ``n + 1`` vertices carrying the hypercube walk's Hamming levels.

    Edge ``(i - 1, i)`` has weight ``sqrt(i * (n + 1 - i))``.
    """
    w = pst_line_weights(n)
    return Graph(n + 1, {(i, i + 1): float(w[i]) for i in range(n)})


def complete_allones(d: int) -> Graph:
    """All-ones matrix ``J`` (self-loops included); ``J / d`` is a projector."""
    d = int(d)
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    return Graph(d, {(i, j): 1.0 for i in range(d) for j in range(i, d)})


@dataclass(frozen=True)
class HammingProfile:
    """Probability mass per Hamming distance ``k = 0 .. n`` from an origin."""

    levels: np.ndarray

    def __post_init__(self):
        levels = np.asarray(self.levels, dtype=float)
        if levels.ndim != 1 or levels.size < 1:
            raise ValueError("levels must be a non-empty vector")
        if np.any(levels < -NORM_TOL):
            raise ValueError("Hamming profile has negative entries")
        if abs(levels.sum() - 1.0) > NORM_TOL:
            raise NotNormalized(f"Hamming profile sums to {levels.sum()!r}")
        object.__setattr__(self, "levels", np.clip(levels, 0.0, None))

    @property
    def n(self) -> int:
        return self.levels.size - 1

    def __len__(self):
        return self.levels.size


def popcount(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint64)
    count = np.zeros(x.shape, dtype=np.int64)
    while np.any(x):
        count += (x & np.uint64(1)).astype(np.int64)
        x = x >> np.uint64(1)
    return count


def parse_bits(bits: str | int, n: int) -> int:
    """Vertex index of a bit string written most significant bit first."""
    if isinstance(bits, (int, np.integer)):
        v = int(bits)
    else:
        bits = bits.strip()
        if len(bits) != n or set(bits) - {"0", "1"}:
            raise ValueError(f"expected a {n}-bit string, got {bits!r}")
        v = int(bits, 2)
    if not 0 <= v < 2**n:
        raise ValueError(f"vertex {v} out of range for {n} bits")
    return v


def hamming_profile(dist, origin: str | int = 0) -> HammingProfile:
    """Aggregate a distribution over ``2**n`` vertices by distance from ``origin``.

    ``dist`` is a probability vector or anything with a ``probabilities``
    attribute (such as a walk distribution).
    """
    p = np.asarray(getattr(dist, "probabilities", dist), dtype=float)
    d = p.size
    n = d.bit_length() - 1
    if p.ndim != 1 or d < 2 or d != 2**n:
        raise LengthMismatch(f"distribution length {d} is not a power of two >= 2")
    o = parse_bits(origin, n)
    k = popcount(np.arange(d, dtype=np.uint64) ^ np.uint64(o))
    return HammingProfile(np.bincount(k, weights=p, minlength=n + 1))


def hypercube_kron_sum(n: int) -> np.ndarray:
    """``sum_i I^(x)i (x) A_line (x) I^(x)(n-1-i)``, built with explicit Kronecker products."""
    line = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    total = np.zeros((2**n, 2**n), dtype=np.complex128)
    for i in range(n):
        total += np.kron(np.kron(np.eye(2**i), line), np.eye(2 ** (n - 1 - i)))
    return total


# -- file I/O ---------------------------------------------------------------


def graph_to_dict(g: Graph) -> dict:
    out = {
        "num_vertices": g.num_vertices,
        "edges": [{"i": i, "j": j, "re": w.real, "im": w.imag} for (i, j), w in g.edges.items()],
    }
    if g.labels is not None:
        out["labels"] = list(g.labels)
    return out


def graph_from_dict(data: Mapping) -> Graph:
    if not isinstance(data, Mapping):
        raise ParseError("graph document must be a JSON object")
    try:
        d = data["num_vertices"]
    except KeyError:
        raise ParseError("missing key", field="num_vertices") from None
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ParseError(f"expected a positive integer, got {d!r}", field="num_vertices")
    edges: dict[tuple[int, int], complex] = {}
    for pos, e in enumerate(data.get("edges", [])):
        where = f"edges[{pos}]"
        try:
            i, j = e["i"], e["j"]
            w = complex(float(e.get("re", 0.0)), float(e.get("im", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed edge ({exc})", field=where) from None
        if not (isinstance(i, int) and isinstance(j, int)):
            raise ParseError("vertex indices must be integers", field=where)
        if not (0 <= i < d and 0 <= j < d):
            raise ParseError(f"edge ({i}, {j}) out of range", field=where)
        if i > j:
            i, j, w = j, i, w.conjugate()
        if (i, j) in edges and edges[(i, j)] != w:
            raise NotHermitian(f"{where}: edge ({i}, {j}) conflicts with an earlier entry")
        edges[(i, j)] = w
    try:
        return Graph(d, edges, labels=data.get("labels"))
    except (IndexError, LengthMismatch) as exc:
        raise ParseError(str(exc)) from None


def save(g: Graph, path) -> None:
    """Write ``g`` as JSON, atomically (temp file then rename)."""
    text = json.dumps(graph_to_dict(g), indent=1)
    atomic_write_text(path, text + "\n")


def load(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    return graph_from_dict(data)


def atomic_write_text(path, text: str) -> None:
    path = os.fspath(path)
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def binomial_profile(n: int, p: float) -> np.ndarray:
    k = np.arange(n + 1)
    coeff = np.array([math.comb(n, int(x)) for x in k], dtype=float)
    return coeff * p**k * (1.0 - p) ** (n - k)
