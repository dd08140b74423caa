"""Gate-level IR and builders for the purified and condensed collision circuits.

Both builders mirror the register layout of :mod:`dlab.scm`: qubit 0 is the
system; the full circuit places emitter/ancilla pairs at (1+2i, 2+2i), the
condensed circuit places pair qubits at 1..n.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .kernels import apply_matrix
from .scm import Scenario, ScmParams, prep_angle

UNITARY_MAX_QUBITS = 6


class GateKind(enum.Enum):
    X = "X"
    H = "H"
    RY = "RY"
    CNOT = "CNOT"
    CZ = "CZ"
    SWAP = "SWAP"


GATE_ARITY = {
    GateKind.X: 1,
    GateKind.H: 1,
    GateKind.RY: 1,
    GateKind.CNOT: 2,
    GateKind.CZ: 2,
    GateKind.SWAP: 2,
}

_SQRT2_INV = 1 / math.sqrt(2)
_FIXED_MATRICES = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    GateKind.CNOT: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
    GateKind.SWAP: np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}


class RoleKind(enum.Enum):
    SYSTEM = "system"
    ANCILLA = "ancilla"
    EMITTER = "emitter"
    PAIR = "pair"


@dataclass(frozen=True)
class Role:
    kind: RoleKind
    index: int | None = None

    def __post_init__(self):
        if self.kind is RoleKind.SYSTEM:
            if self.index is not None:
                raise ValueError("system role carries no index")
        elif self.index is None or self.index < 0:
            raise ValueError(f"{self.kind.value} role needs a non-negative index")

    def __str__(self):
        return self.kind.value if self.index is None else f"{self.kind.value}{self.index}"


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        arity = GATE_ARITY[self.kind]
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind.value} acts on {arity} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"gate qubits must be distinct, got {self.qubits}")
        if (self.kind is GateKind.RY) != (self.angle is not None):
            raise ValueError("angle is required for RY and forbidden otherwise")

    def matrix(self) -> np.ndarray:
        if self.kind is GateKind.RY:
            h = self.angle / 2.0
            return np.array(
                [[math.cos(h), -math.sin(h)], [math.sin(h), math.cos(h)]], dtype=complex
            )
        return _FIXED_MATRICES[self.kind]


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over a register of named logical qubits."""

    num_qubits: int
    gates: tuple[Gate, ...]
    labels: dict[int, Role] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(not 0 <= q < self.num_qubits for q in g.qubits):
                raise ValueError(f"gate {g} outside register of {self.num_qubits} qubits")
        if self.labels:
            if any(not 0 <= q < self.num_qubits for q in self.labels):
                raise ValueError("label qubit id out of range")
            n_sys = sum(1 for r in self.labels.values() if r.kind is RoleKind.SYSTEM)
            if n_sys != 1:
                raise ValueError(f"expected exactly one system label, got {n_sys}")

    @property
    def system_qubit(self) -> int:
        for q, r in self.labels.items():
            if r.kind is RoleKind.SYSTEM:
                return q
        raise ValueError("circuit has no system label")


def build_full_circuit(t: float, p: ScmParams) -> Circuit:
    """Purified circuit: per pair Ry(2a) on emitter, CNOT(E->A), X on emitter;
    then H on the system and one CZ(system, ancilla) per pair."""
    if p.scenario is not Scenario.FULL:
        raise ValueError("params are not for the full scenario")
    if abs(p.theta - math.pi) > 1e-12:
        raise ValueError("circuit construction requires theta = pi (non-entangling collisions)")
    alpha = prep_angle(t, p)
    gates = []
    labels = {0: Role(RoleKind.SYSTEM)}
    for i in range(p.n):
        em, anc = 1 + 2 * i, 2 + 2 * i
        labels[em] = Role(RoleKind.EMITTER, i)
        labels[anc] = Role(RoleKind.ANCILLA, i)
        gates.append(Gate(GateKind.RY, (em,), 2 * alpha))
        gates.append(Gate(GateKind.CNOT, (em, anc)))
        gates.append(Gate(GateKind.X, (em,)))
    gates.append(Gate(GateKind.H, (0,)))
    for i in range(p.n):
        gates.append(Gate(GateKind.CZ, (0, 2 + 2 * i)))
    return Circuit(1 + 2 * p.n, tuple(gates), labels)


def build_condensed_circuit(t: float, p: ScmParams) -> Circuit:
    """Condensed circuit: Ry(2a) on each pair qubit, H on the system, then CZs."""
    if p.scenario is not Scenario.CONDENSED:
        raise ValueError("params are not for the condensed scenario")
    alpha = prep_angle(t, p)
    gates = []
    labels = {0: Role(RoleKind.SYSTEM)}
    for i in range(p.n):
        labels[1 + i] = Role(RoleKind.PAIR, i)
        gates.append(Gate(GateKind.RY, (1 + i,), 2 * alpha))
    gates.append(Gate(GateKind.H, (0,)))
    for i in range(p.n):
        gates.append(Gate(GateKind.CZ, (0, 1 + i)))
    return Circuit(1 + p.n, tuple(gates), labels)


def unitary_of(c: Circuit) -> np.ndarray:
    """Full 2^n x 2^n unitary by gate composition; dense-matrix guard at 6 qubits."""
    if c.num_qubits > UNITARY_MAX_QUBITS:
        raise ValueError(f"unitary_of supports at most {UNITARY_MAX_QUBITS} qubits")
    n = c.num_qubits
    u = np.eye(2**n, dtype=complex).reshape(-1)
    for g in c.gates:
        apply_matrix(u, g.matrix(), g.qubits, 2 * n)
    return u.reshape(2**n, 2**n)


def circuit_to_text(c: Circuit) -> str:
    """One gate per line: `KIND q0 [q1] [angle]`."""
    lines = []
    for g in c.gates:
        parts = [g.kind.value] + [str(q) for q in g.qubits]
        if g.angle is not None:
            parts.append(repr(g.angle))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str, num_qubits: int | None = None) -> Circuit:
    gates = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            kind = GateKind(parts[0].upper())
        except ValueError:
            raise ValueError(f"line {lineno}: unknown gate kind {parts[0]!r}") from None
        arity = GATE_ARITY[kind]
        expected = 1 + arity + (1 if kind is GateKind.RY else 0)
        if len(parts) != expected:
            raise ValueError(f"line {lineno}: expected {expected} fields, got {len(parts)}")
        qubits = tuple(int(tok) for tok in parts[1 : 1 + arity])
        angle = float(parts[1 + arity]) if kind is GateKind.RY else None
        gates.append(Gate(kind, qubits, angle))
    if num_qubits is None:
        num_qubits = 1 + max((q for g in gates for q in g.qubits), default=-1)
    return Circuit(num_qubits, tuple(gates))
