"""Gate-level circuits over {U1, U2, U3, CNOT} and a statevector backend.

Qubit ordering is little-endian: qubit ``q`` is bit ``q`` of the basis
index, so in a bit-string label (written most significant first) qubit 0
is the rightmost character. ``cx`` matrices are written in the
``|control, target>`` basis.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import AllWeightDiscarded, DimensionMismatch, ParseError, TooManyQubits
from .graphs import atomic_write_text, popcount
from .walk import StateVector, WalkDistribution

UNITARY_QUBIT_LIMIT = 12
SIMULATION_QUBIT_LIMIT = 24
ONEHOT_MIN_WEIGHT = 1e-12

_ONE_QUBIT = ("u1", "u2", "u3")
_KINDS = _ONE_QUBIT + ("cx",)


@dataclass(frozen=True)
class Gate:
    kind: str
    target: int
    control: Optional[int] = None
    theta: float = 0.0
    phi: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.target < 0:
            raise ValueError("qubit indices must be non-negative")
        if self.kind == "cx":
            if self.control is None or self.control < 0:
                raise ValueError("cx needs a non-negative control qubit")
            if self.control == self.target:
                raise ValueError(f"cx control and target coincide (qubit {self.target})")
        elif self.control is not None:
            raise ValueError(f"{self.kind} takes no control qubit")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,) if self.control is None else (self.control, self.target)

    @property
    def u3_params(self) -> tuple[float, float, float]:
        """(theta, phi, lambda) in U3 notation; undefined for cx."""
        if self.kind == "u1":
            return 0.0, 0.0, self.lam
        if self.kind == "u2":
            return math.pi / 2, self.phi, self.lam
        return self.theta, self.phi, self.lam


def u1(q: int, lam: float) -> Gate:
    return Gate("u1", q, lam=float(lam))


def u2(q: int, phi: float, lam: float) -> Gate:
    return Gate("u2", q, phi=float(phi), lam=float(lam))


def u3(q: int, theta: float, phi: float, lam: float) -> Gate:
    return Gate("u3", q, theta=float(theta), phi=float(phi), lam=float(lam))


def cx(control: int, target: int) -> Gate:
    return Gate("cx", target, control=control)


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (lam + phi)) * c],
        ],
        dtype=np.complex128,
    )


CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128)


def gate_matrix(g: Gate) -> np.ndarray:
    """2x2 matrix for U1/U2/U3; 4x4 for cx in the ``|control, target>`` basis.

    U2 is U3 at theta = pi/2, which carries the 1/sqrt(2) normalization.
    """
    if g.kind == "cx":
        return CNOT.copy()
    if g.kind == "u1":
        return np.diag([1.0, np.exp(1j * g.lam)]).astype(np.complex128)
    return u3_matrix(*g.u3_params)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        gates = tuple(self.gates)
        for g in gates:
            if max(g.qubits) >= self.num_qubits:
                raise ValueError(f"{g} addresses a qubit outside 0..{self.num_qubits - 1}")
        object.__setattr__(self, "gates", gates)

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if not isinstance(other, Circuit):
            return NotImplemented
        return Circuit(max(self.num_qubits, other.num_qubits), self.gates + other.gates)

    def extended(self, gates: Iterable[Gate]) -> "Circuit":
        return Circuit(self.num_qubits, self.gates + tuple(gates))

    def widened(self, num_qubits: int) -> "Circuit":
        return Circuit(num_qubits, self.gates)

    def layers(self) -> list[list[Gate]]:
        """Greedy as-soon-as-possible layering."""
        level = [0] * self.num_qubits
        out: list[list[Gate]] = []
        for g in self.gates:
            layer = max(level[q] for q in g.qubits)
            if layer == len(out):
                out.append([])
            out[layer].append(g)
            for q in g.qubits:
                level[q] = layer + 1
        return out

    def depth(self) -> int:
        level = [0] * self.num_qubits
        for g in self.gates:
            top = max(level[q] for q in g.qubits) + 1
            for q in g.qubits:
                level[q] = top
        return max(level, default=0)

    def count(self, kind: str) -> int:
        return sum(g.kind == kind for g in self.gates)


# -- statevector backend ------------------------------------------------------


def _apply_1q(state: np.ndarray, m: np.ndarray, q: int, n: int) -> np.ndarray:
    batch = state.shape[1]
    v = state.reshape(2 ** (n - 1 - q), 2, 2**q, batch)
    return np.einsum("ij,ajbk->aibk", m, v).reshape(2**n, batch)


def _apply_cx(state: np.ndarray, c: int, t: int, n: int) -> np.ndarray:
    v = state.reshape([2] * n + [state.shape[1]]).copy()
    ca, ta = n - 1 - c, n - 1 - t
    i0 = [slice(None)] * (n + 1)
    i1 = [slice(None)] * (n + 1)
    i0[ca] = i1[ca] = 1
    i0[ta], i1[ta] = 0, 1
    i0, i1 = tuple(i0), tuple(i1)
    v[i0], v[i1] = v[i1].copy(), v[i0].copy()
    return v.reshape(state.shape)


def apply_gate(state: np.ndarray, g: Gate, n: int) -> np.ndarray:
    """Apply ``g`` to a ``(2**n, batch)`` array of column states."""
    if g.kind == "cx":
        return _apply_cx(state, g.control, g.target, n)
    return _apply_1q(state, gate_matrix(g), g.target, n)


def _run(c: Circuit, cols: np.ndarray) -> np.ndarray:
    n = c.num_qubits
    for g in c.gates:
        cols = apply_gate(cols, g, n)
    return cols


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Dense unitary of ``c`` (gates applied left to right in time)."""
    if c.num_qubits > UNITARY_QUBIT_LIMIT:
        raise TooManyQubits(f"{c.num_qubits} qubits exceeds the dense limit {UNITARY_QUBIT_LIMIT}")
    return _run(c, np.eye(2**c.num_qubits, dtype=np.complex128))


def simulate_statevector(c: Circuit, psi0=None) -> StateVector:
    """Gate-by-gate simulation; ``psi0`` defaults to ``|0...0>``."""
    n = c.num_qubits
    if n > SIMULATION_QUBIT_LIMIT:
        raise TooManyQubits(f"{n} qubits exceeds the simulator limit {SIMULATION_QUBIT_LIMIT}")
    if psi0 is None:
        psi0 = StateVector.basis(0, 2**n)
    elif isinstance(psi0, str):
        psi0 = StateVector.from_bits(psi0)
    elif not isinstance(psi0, StateVector):
        psi0 = StateVector(psi0)
    if psi0.dim != 2**n:
        raise DimensionMismatch(f"state of dimension {psi0.dim} on a {n}-qubit circuit")
    out = _run(c, psi0.amplitudes.reshape(-1, 1).copy())[:, 0]
    return StateVector(out / np.linalg.norm(out))


# -- shot sampling and noise --------------------------------------------------


@dataclass(frozen=True)
class NoiseSpec:
    """Per-gate depolarizing probabilities and a per-bit readout flip probability."""

    depol_1q: float = 0.0
    depol_2q: float = 0.0
    readout_flip: float = 0.0

    def __post_init__(self):
        for name in ("depol_1q", "depol_2q", "readout_flip"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")

    @property
    def has_gate_noise(self) -> bool:
        return self.depol_1q > 0 or self.depol_2q > 0


def _flip_readout(outcomes: np.ndarray, n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    if p <= 0:
        return outcomes
    flips = rng.random((outcomes.size, n)) < p
    mask = (flips * (1 << np.arange(n))).sum(axis=1)
    return outcomes ^ mask


def _distribution_from_outcomes(outcomes: np.ndarray, d: int, n: int) -> WalkDistribution:
    counts = np.bincount(outcomes, minlength=d)
    return WalkDistribution(counts / counts.sum(), counts=counts, bits=n)


def sample_counts(
    psi: StateVector, shots: int, seed: int, noise: Optional[NoiseSpec] = None
) -> WalkDistribution:
    """Seeded multinomial draw from ``|amplitudes|**2``.

    Only the readout part of ``noise`` applies here; gate noise needs the
    circuit, see :func:`run_noisy`.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    p = psi.probabilities()
    p = p / p.sum()
    n = psi.num_qubits
    flip = noise.readout_flip if noise is not None else 0.0
    if flip <= 0:
        counts = rng.multinomial(shots, p)
        return WalkDistribution(counts / shots, counts=counts, bits=n)
    outcomes = rng.choice(p.size, size=shots, p=p)
    return _distribution_from_outcomes(_flip_readout(outcomes, n, flip, rng), p.size, n)


_PAULI = {
    1: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    2: np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    3: np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def _depolarize(cols, qubits, p, n, rng):
    """Insert a uniformly random non-identity Pauli string with probability ``p`` per column."""
    batch = cols.shape[1]
    hit = rng.random(batch) < p
    if not hit.any():
        return cols
    k = len(qubits)
    # index in 1 .. 4**k - 1 encodes one Pauli letter per qubit in base 4
    which = rng.integers(1, 4**k, size=batch)
    for qi, q in enumerate(qubits):
        letter = (which // 4**qi) % 4
        for code, m in _PAULI.items():
            sel = np.flatnonzero(hit & (letter == code))
            if sel.size:
                cols[:, sel] = _apply_1q(cols[:, sel], m, q, n)
    return cols


def run_noisy(
    c: Circuit,
    psi0=None,
    shots: int = 8192,
    seed: int = 0,
    noise: Optional[NoiseSpec] = None,
    chunk_elements: int = 1 << 22,
) -> WalkDistribution:
    """Shot-sampled execution with stochastic Pauli insertion after each gate.

    Each shot is one trajectory; without gate noise the circuit is simulated
    once and sampled with :func:`sample_counts`.
    """
    noise = noise or NoiseSpec()
    psi0 = simulate_statevector(Circuit(c.num_qubits), psi0)
    if not noise.has_gate_noise:
        return sample_counts(simulate_statevector(c, psi0), shots, seed, noise)
    n, d = c.num_qubits, 2**c.num_qubits
    rng = np.random.default_rng(seed)
    start = np.flatnonzero(np.abs(psi0.amplitudes) > 0)
    if c.count("cx") == 0 and start.size == 1:
        out = _run_noisy_product(c, int(start[0]), shots, noise.depol_1q, rng)
        return _distribution_from_outcomes(_flip_readout(out, n, noise.readout_flip, rng), d, n)
    chunk = max(1, chunk_elements // d)
    outcomes = []
    for start in range(0, shots, chunk):
        m = min(chunk, shots - start)
        cols = np.repeat(psi0.amplitudes.reshape(-1, 1), m, axis=1)
        for g in c.gates:
            cols = apply_gate(cols, g, n)
            p = noise.depol_2q if g.kind == "cx" else noise.depol_1q
            if p > 0:
                cols = _depolarize(cols, g.qubits, p, n, rng)
        cdf = np.cumsum(np.abs(cols) ** 2, axis=0)
        u = rng.random(m) * cdf[-1]
        outcomes.append(np.minimum((cdf < u).sum(axis=0), d - 1))
    out = _flip_readout(np.concatenate(outcomes), n, noise.readout_flip, rng)
    return _distribution_from_outcomes(out, d, n)


def _run_noisy_product(c: Circuit, start: int, shots: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Trajectories of a CNOT-free circuit from a basis state, one qubit at a time.

    The state stays a product under single-qubit gates and single-qubit Pauli
    insertions, so each qubit is an independent two-level trajectory and the
    outcome bits are independent.
    """
    outcomes = np.zeros(shots, dtype=np.int64)
    for q in range(c.num_qubits):
        cols = np.zeros((2, shots), dtype=np.complex128)
        cols[(start >> q) & 1] = 1
        for g in c.gates:
            if g.target == q:
                cols = gate_matrix(g) @ cols
                if p > 0:
                    cols = _depolarize(cols, (0,), p, 1, rng)
        p1 = np.abs(cols[1]) ** 2 / np.sum(np.abs(cols) ** 2, axis=0)
        outcomes |= (rng.random(shots) < p1).astype(np.int64) << q
    return outcomes


# -- one-hot post-selection ---------------------------------------------------


@dataclass(frozen=True)
class OneHotResult:
    distribution: WalkDistribution
    discarded_fraction: float


def postselect_onehot(dist, time: Optional[float] = None) -> OneHotResult:
    """Keep only Hamming-weight-1 outcomes over ``n + 1`` qubits and renormalize.

    Line position ``i`` is the outcome where only qubit ``i`` reads 1.
    """
    if isinstance(dist, StateVector):
        p = dist.probabilities()
    else:
        time = getattr(dist, "time", time) if time is None else time
        p = np.asarray(getattr(dist, "probabilities", dist), dtype=float)
    d = p.size
    m = d.bit_length() - 1
    if d != 2**m or m < 1:
        raise DimensionMismatch(f"distribution length {d} is not a power of two")
    onehot = 1 << np.arange(m)
    kept = p[onehot]
    total = float(kept.sum())
    if total < ONEHOT_MIN_WEIGHT:
        raise AllWeightDiscarded(f"one-hot weight {total:.3g} is below {ONEHOT_MIN_WEIGHT:g}")
    invalid = popcount(np.arange(d, dtype=np.uint64)) != 1
    counts = getattr(dist, "counts", None)
    kept_counts = None if counts is None else np.asarray(counts)[onehot]
    out = WalkDistribution(kept / total, time=time, labels=tuple(str(i) for i in range(m)), counts=kept_counts)
    return OneHotResult(out, float(p[invalid].sum()))


def onehot_leakage(psi: StateVector) -> float:
    """Probability outside the single-excitation subspace."""
    p = psi.probabilities()
    return float(p[popcount(np.arange(p.size, dtype=np.uint64)) != 1].sum())


# -- text format --------------------------------------------------------------

_PI_RE = re.compile(r"^([+-]?)(\d*)\s*\*?\s*pi(?:\s*/\s*(\d+))?$")


def parse_angle(text: str) -> float:
    """Parse a decimal or an exact multiple of pi such as ``pi/2``, ``-3pi/4``, ``2*pi``."""
    t = text.strip().lower()
    m = _PI_RE.match(t)
    if m is None:
        return float(t)
    sign, num, den = m.groups()
    frac = Fraction(int(num) if num else 1, int(den) if den else 1)
    if sign == "-":
        frac = -frac
    return float(frac) * math.pi


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_circuit(c: Circuit, comment: Optional[str] = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {line}" for line in comment.splitlines())
    lines.append(f"qubits {c.num_qubits}")
    for g in c.gates:
        if g.kind == "u1":
            lines.append(f"u1 q[{g.target}] {_fmt(g.lam)}")
        elif g.kind == "u2":
            lines.append(f"u2 q[{g.target}] {_fmt(g.phi)} {_fmt(g.lam)}")
        elif g.kind == "u3":
            lines.append(f"u3 q[{g.target}] {_fmt(g.theta)} {_fmt(g.phi)} {_fmt(g.lam)}")
        else:
            lines.append(f"cx q[{g.control}] q[{g.target}]")
    return "\n".join(lines) + "\n"


_QUBIT_RE = re.compile(r"^q\[(\d+)\]$")
_ARITY = {"u1": (1, 1), "u2": (1, 2), "u3": (1, 3), "cx": (2, 0)}


def parse_circuit(text: str) -> Circuit:
    num_qubits = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        head = tok[0].lower()
        if head == "qubits":
            if num_qubits is not None:
                raise ParseError("duplicate qubits header", line=lineno)
            if len(tok) != 2 or not tok[1].isdigit() or int(tok[1]) < 1:
                raise ParseError(f"bad header {line!r}", line=lineno)
            num_qubits = int(tok[1])
            continue
        if num_qubits is None:
            raise ParseError("gate before the 'qubits n' header", line=lineno)
        if head not in _ARITY:
            raise ParseError(f"unknown gate {tok[0]!r}", line=lineno)
        nq, na = _ARITY[head]
        if len(tok) != 1 + nq + na:
            raise ParseError(f"{head} expects {nq} qubit(s) and {na} angle(s)", line=lineno)
        qs = []
        for t in tok[1 : 1 + nq]:
            m = _QUBIT_RE.match(t)
            if m is None:
                raise ParseError(f"bad qubit reference {t!r}", line=lineno)
            qs.append(int(m.group(1)))
        try:
            angles = [parse_angle(t) for t in tok[1 + nq :]]
        except ValueError:
            raise ParseError(f"bad angle in {line!r}", line=lineno) from None
        try:
            if head == "u1":
                g = u1(qs[0], *angles)
            elif head == "u2":
                g = u2(qs[0], *angles)
            elif head == "u3":
                g = u3(qs[0], *angles)
            else:
                g = cx(qs[0], qs[1])
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
        if max(g.qubits) >= num_qubits:
            raise ParseError(f"qubit index out of range for {num_qubits} qubits", line=lineno)
        gates.append(g)
    if num_qubits is None:
        raise ParseError("missing 'qubits n' header")
    return Circuit(num_qubits, tuple(gates))


def save_circuit(c: Circuit, path, comment: Optional[str] = None) -> None:
    atomic_write_text(path, emit_circuit(c, comment))


def load_circuit(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse_circuit(fh.read())
