"""States, channels and information primitives over an ordered qubit register.

Register convention (fixed, big-endian): qubit 0 is the most-significant bit.
The basis index of |b0 b1 ... b_{n-1}> is sum_q b_q * 2**(n-1-q), i.e.
``amplitudes.reshape([2]*n)[b0, b1, ...]``.  Bitstrings are written left to
right as qubit 0 to qubit n-1.  All embedding, partial-trace and measurement
code in the package derives from this single convention.

A density matrix reshaped to ``[2]*(2n)`` has row bits on axes ``0..n-1`` and
column bits on axes ``n..2n-1``; axis ``q`` / ``n+q`` belongs to qubit q.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import apply_matrix

NORM_ATOL = 1e-12
HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-9  # MLE output carries statistical noise
EIG_CUTOFF = 1e-12  # 0*log(0) guard
CHANNEL_ATOL = 1e-10

PAULIS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PureState:
    """Normalized complex amplitude vector over 2**num_qubits basis states."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.num_qubits,):
            raise ValueError(f"expected 2**{self.num_qubits} amplitudes, got shape {amps.shape}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state norm {norm} deviates from 1 beyond {NORM_ATOL}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amps) -> PureState:
        amps = np.asarray(amps, dtype=complex)
        n = int(round(math.log2(amps.size)))
        return cls(n, amps)

    @classmethod
    def zero(cls, num_qubits: int) -> PureState:
        amps = np.zeros(2**num_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(num_qubits, amps)

    def density_matrix(self) -> DensityMatrix:
        return DensityMatrix(self.num_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, PSD (within tolerance) matrix over the register."""

    num_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        dim = 2**self.num_qubits
        mat = np.ascontiguousarray(self.matrix, dtype=complex)
        if mat.shape != (dim, dim):
            raise ValueError(f"expected {dim}x{dim} matrix, got shape {mat.shape}")
        dev = np.max(np.abs(mat - mat.conj().T))
        if dev > HERMITIAN_ATOL:
            raise ValueError(f"matrix deviates from Hermitian by {dev}")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"trace {tr} deviates from 1 beyond {TRACE_ATOL}")
        low = np.linalg.eigvalsh(mat)[0]
        if low < -PSD_ATOL:
            raise ValueError(f"matrix has eigenvalue {low} below -{PSD_ATOL}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_matrix(cls, mat) -> DensityMatrix:
        mat = np.asarray(mat, dtype=complex)
        n = int(round(math.log2(mat.shape[0])))
        return cls(n, mat)

    @classmethod
    def maximally_mixed(cls, num_qubits: int) -> DensityMatrix:
        dim = 2**num_qubits
        return cls(num_qubits, np.eye(dim, dtype=complex) / dim)


@dataclass(frozen=True)
class KrausChannel:
    """Set of Kraus operators; optional weights are folded in as sqrt(w)*K."""

    operators: tuple
    weights: tuple | None = None

    def __post_init__(self):
        ops = [np.ascontiguousarray(k, dtype=complex) for k in self.operators]
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        if any(k.shape != (dim, dim) for k in ops):
            raise ValueError("Kraus operators must be square and of equal dimension")
        if self.weights is not None:
            if len(self.weights) != len(ops):
                raise ValueError("one weight per operator required")
            ops = [math.sqrt(w) * k for k, w in zip(ops, self.weights)]
        complete = sum(k.conj().T @ k for k in ops)
        dev = np.max(np.abs(complete - np.eye(dim)))
        if dev > CHANNEL_ATOL:
            raise ValueError(f"channel is not trace preserving: sum K^dag K deviates by {dev}")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "operators", tuple(ops))
        object.__setattr__(self, "weights", None)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    @property
    def num_qubits(self) -> int:
        return int(round(math.log2(self.dim)))


def depolarizing_channel(p: float, num_qubits: int = 1) -> KrausChannel:
    """rho -> (1-p) rho + p I/2^k on k qubits, as a Pauli Kraus set."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing probability {p} outside [0, 1]")
    labels = ["I", "X", "Y", "Z"]
    ops, weights = [], []
    d2 = 4**num_qubits
    for idx in range(d2):
        op = np.eye(1, dtype=complex)
        rem = idx
        for _ in range(num_qubits):
            op = np.kron(op, PAULIS[labels[rem % 4]])
            rem //= 4
        ops.append(op)
        weights.append(1.0 - p + p / d2 if idx == 0 else p / d2)
    return KrausChannel(tuple(ops), tuple(weights))


def amplitude_damping_channel(gamma: float) -> KrausChannel:
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"damping probability {gamma} outside [0, 1]")
    k0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausChannel((k0, k1))


def apply_channel(rho: DensityMatrix, ch: KrausChannel, targets: list[int]) -> DensityMatrix:
    """Apply the channel embedded on `targets`: rho' = sum_i (K_i x I) rho (K_i^dag x I)."""
    n = rho.num_qubits
    targets = list(targets)
    if len(set(targets)) != len(targets) or any(not 0 <= q < n for q in targets):
        raise ValueError(f"targets {targets} must be distinct and in range 0..{n - 1}")
    if ch.dim != 2 ** len(targets):
        raise ValueError(f"operator dim {ch.dim} does not match 2^{len(targets)} targets")
    out = np.zeros(4**n, dtype=complex)
    row_axes = tuple(targets)
    col_axes = tuple(n + q for q in targets)
    for k in ch.operators:
        work = rho.matrix.reshape(-1).astype(complex)
        apply_matrix(work, k, row_axes, 2 * n)
        apply_matrix(work, k.conj(), col_axes, 2 * n)
        out += work
    return DensityMatrix(n, out.reshape(2**n, 2**n))


def partial_trace(state: PureState | DensityMatrix, keep: list[int]) -> DensityMatrix:
    """Reduced density matrix on `keep`, ordered by ascending register index."""
    n = state.num_qubits
    keep = sorted(keep)
    if not keep:
        raise ValueError("keep list must be non-empty")
    if len(set(keep)) != len(keep) or any(not 0 <= q < n for q in keep):
        raise ValueError(f"keep {keep} must be distinct and in range 0..{n - 1}")
    rest = [q for q in range(n) if q not in keep]
    dk = 2 ** len(keep)
    if isinstance(state, PureState):
        psi = state.amplitudes.reshape([2] * n)
        psi = np.transpose(psi, keep + rest).reshape(dk, -1)
        return DensityMatrix(len(keep), psi @ psi.conj().T)
    tensor = state.matrix.reshape([2] * (2 * n))
    subs = list(range(n)) + [n + q if q in keep else q for q in range(n)]
    out_subs = keep + [n + q for q in keep]
    reduced = np.einsum(tensor, subs, out_subs).reshape(dk, dk)
    return DensityMatrix(len(keep), reduced)


def von_neumann_entropy(rho: DensityMatrix, base: float = 2) -> float:
    """-sum eig*log(eig) over eigenvalues above the cutoff; base-2 by default."""
    eigs = np.linalg.eigvalsh(rho.matrix)
    eigs = eigs[eigs > EIG_CUTOFF]
    return float(-np.sum(eigs * np.log(eigs)) / math.log(base))


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    if a.num_qubits != b.num_qubits:
        raise ValueError("dimension mismatch")
    eigs = np.linalg.eigvalsh(a.matrix - b.matrix)
    return float(0.5 * np.sum(np.abs(eigs)))


def fidelity(a: DensityMatrix, b: DensityMatrix) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2, clipped to [0, 1]."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("dimension mismatch")
    w, v = np.linalg.eigh(a.matrix)
    sqrt_a = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    inner = np.linalg.eigvalsh(sqrt_a @ b.matrix @ sqrt_a)
    f = float(np.sum(np.sqrt(np.clip(inner, 0, None))) ** 2)
    return min(max(f, 0.0), 1.0)


def concurrence(rho2q: DensityMatrix) -> float:
    """Wootters concurrence of a two-qubit state."""
    if rho2q.num_qubits != 2:
        raise ValueError("concurrence requires exactly 2 qubits")
    yy = np.kron(PAULIS["Y"], PAULIS["Y"])
    r = rho2q.matrix @ yy @ rho2q.matrix.conj() @ yy
    lams = np.sqrt(np.abs(np.real(np.linalg.eigvals(r))))
    lams = np.sort(lams)[::-1]
    return float(max(0.0, lams[0] - lams[1] - lams[2] - lams[3]))
