"""Closed-form analytics of the stochastic collision model.

A single qubit, initially |+>, dephases through instantaneous collisions of
strength theta with n ancillae; collision times are Poisson with per-ancilla
rate lam, so each ancilla has collided by time t with probability
p(t) = 1 - exp(-lam*t).  The purified picture adds one emitter per ancilla
(Full scenario); at theta = pi each emitter-ancilla pair spans a 2-dimensional
subspace and is remapped onto one qubit (Condensed scenario).

Register orders produced here and mirrored by the circuit builders:
  Full:      qubit 0 = system, then (E_1, A_1), (E_2, A_2), ...
  Condensed: qubit 0 = system, then pair qubits 1..n.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .qstate import KrausChannel, PureState


class Scenario(enum.Enum):
    FULL = "full"
    CONDENSED = "condensed"


THETA_PI_ATOL = 1e-12


@dataclass(frozen=True)
class ScmParams:
    """Collision strength theta, per-ancilla rate lam, pair count n, scenario."""

    theta: float
    lam: float
    n: int
    scenario: Scenario = Scenario.CONDENSED

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"rate lam must be positive, got {self.lam}")
        if self.n < 1:
            raise ValueError(f"need at least one ancilla-emitter pair, got n={self.n}")
        if not 0 <= self.theta < 2 * math.pi:
            raise ValueError(f"theta {self.theta} outside [0, 2*pi)")
        if self.scenario is Scenario.CONDENSED and abs(self.theta - math.pi) > THETA_PI_ATOL:
            raise ValueError("condensed scenario requires theta = pi (non-entangling collisions)")


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing, non-negative times in lam=1 units."""

    times: tuple

    def __post_init__(self):
        ts = tuple(float(t) for t in self.times)
        if any(t < 0 for t in ts):
            raise ValueError("times must be non-negative")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", ts)

    @classmethod
    def linspace(cls, start: float, stop: float, count: int) -> TimeGrid:
        return cls(tuple(np.linspace(start, stop, count)))


class CanonicalTimes(NamedTuple):
    t_max: float
    t_close: float
    t_rec: float


def canonical_times() -> CanonicalTimes:
    """(ln 2, ln(2/1.3), ln 6): maximal mixing, near-maximal, recoherence regime."""
    return CanonicalTimes(math.log(2.0), math.log(2.0 / 1.3), math.log(6.0))


def collision_probability(t: float, p: ScmParams) -> float:
    """Probability that a given ancilla has collided by time t: 1 - exp(-lam*t)."""
    if t < 0:
        raise ValueError(f"negative time {t}")
    return 1.0 - math.exp(-p.lam * t)


def prep_angle(t: float, p: ScmParams) -> float:
    """Rotation half-angle alpha = arccos(exp(-lam*t/2)); sin^2(alpha) = p(t)."""
    if t < 0:
        raise ValueError(f"negative time {t}")
    return math.acos(math.exp(-p.lam * t / 2.0))


def coherence_markovian(t: float, p: ScmParams) -> float:
    """Infinite-environment coherence factor exp[-lam*(1 - cos theta)*t]."""
    return math.exp(-p.lam * (1.0 - math.cos(p.theta)) * t)


def coherence_finite(t: float, p: ScmParams, convention: str = "per-ancilla") -> float:
    """Finite-n coherence factor [1 + (cos theta - 1) p(t)]^n.

    The default "per-ancilla" convention uses p(t) = 1 - exp(-lam*t), which
    places the zero of the theta=pi, n-pair factor at t = ln 2.  The alternate
    "shared-rate" convention replaces lam by lam/n and converges to the
    Markovian factor pointwise as n grows.
    """
    if convention == "per-ancilla":
        prob = 1.0 - math.exp(-p.lam * t)
    elif convention == "shared-rate":
        prob = 1.0 - math.exp(-p.lam * t / p.n)
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return (1.0 + (math.cos(p.theta) - 1.0) * prob) ** p.n


def collision_channel(theta: float) -> KrausChannel:
    """Single-collision map: equal-weight Kraus pair K = diag(e^{-i theta/2}, e^{i theta/2}), K^dag."""
    k = np.array([[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]])
    return KrausChannel((k, k.conj().T), weights=(0.5, 0.5))


def ideal_global_state(t: float, p: ScmParams) -> PureState:
    """Exact purified global state at time t.

    Full: per pair the emitted/unemitted superposition of the three-branch
    purification, with the emitted branch carrying the phase factor i; at
    theta = pi the branch phases cancel and the state is real.  Condensed:
    (|0>_S prod(sqrt(1-p)|0> + sqrt(p)|1>) + |1>_S prod(sqrt(1-p)|0> - sqrt(p)|1>))/sqrt(2).
    """
    if t < 0:
        raise ValueError(f"negative time {t}")
    prob = collision_probability(t, p)
    sq, sp = math.sqrt(1.0 - prob), math.sqrt(prob)
    if p.scenario is Scenario.CONDENSED:
        branch = {
            0: np.array([sq, sp], dtype=complex),
            1: np.array([sq, -sp], dtype=complex),
        }
    else:
        c, s = math.cos(p.theta / 2.0), math.sin(p.theta / 2.0)
        # Pair basis |E A>: amplitudes on |00>, |01>, |10>, |11>.
        branch = {
            0: np.array([1j * sp * c, sp * s, sq, 0.0], dtype=complex),
            1: np.array([1j * sp * c, -sp * s, sq, 0.0], dtype=complex),
        }
    parts = []
    for sigma in (0, 1):
        env = np.ones(1, dtype=complex)
        for _ in range(p.n):
            env = np.kron(env, branch[sigma])
        parts.append(env)
    amps = np.concatenate(parts) / math.sqrt(2.0)
    num_qubits = 1 + (p.n if p.scenario is Scenario.CONDENSED else 2 * p.n)
    return PureState(num_qubits, amps)
