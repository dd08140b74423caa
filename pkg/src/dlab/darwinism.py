"""Information-theoretic analyses over system/environment splits: mutual
information curves, measurement-basis grids, Holevo bounds, Pauli correlation
scans and the trace-distance backflow witness.

Environment fractions are unions of partition-scheme units; averages run over
every same-size fraction (unordered, exhaustive).
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .kernels import apply_matrix
from .qstate import DensityMatrix, PureState, partial_trace, von_neumann_entropy
from .scm import Scenario, ScmParams
from .simulator import MeasSetting, basis_rotation

DEFAULT_PHI_STEPS = 61
DEFAULT_XI_STEPS = 61
_PROB_CUTOFF = 1e-15


class SchemeMode(enum.Enum):
    PER_PAIR = "per_pair"
    PER_QUBIT = "per_qubit"
    ANCILLAE_ONLY = "ancillae_only"


@dataclass(frozen=True)
class PartitionScheme:
    """Disjoint environment units; fractions are unions of whole units."""

    units: tuple[tuple[int, ...], ...]
    mode: SchemeMode | None = None

    def __post_init__(self):
        units = tuple(tuple(sorted(u)) for u in self.units)
        object.__setattr__(self, "units", units)
        if not units or any(not u for u in units):
            raise ValueError("every unit must be a non-empty qubit tuple")
        flat = [q for u in units for q in u]
        if len(set(flat)) != len(flat):
            raise ValueError("units must be disjoint")

    @property
    def num_units(self) -> int:
        return len(self.units)

    def fractions(self, num_units: int):
        """All unordered unions of `num_units` units, as sorted qubit tuples."""
        for combo in itertools.combinations(self.units, num_units):
            yield tuple(sorted(q for u in combo for q in u))


def partition_scheme(params: ScmParams, mode: SchemeMode) -> PartitionScheme:
    """Environment partition for the register layout of the built circuits."""
    if params.scenario is Scenario.FULL:
        if mode is SchemeMode.PER_PAIR:
            units = tuple((1 + 2 * i, 2 + 2 * i) for i in range(params.n))
        elif mode is SchemeMode.PER_QUBIT:
            units = tuple((q,) for q in range(1, 1 + 2 * params.n))
        else:
            units = tuple((2 + 2 * i,) for i in range(params.n))
    else:
        if mode is SchemeMode.ANCILLAE_ONLY:
            raise ValueError("the condensed register has no emitters to trace out")
        units = tuple((1 + i,) for i in range(params.n))
    return PartitionScheme(units, mode)


@dataclass(frozen=True)
class MiCurve:
    """Averaged mutual information vs fraction size (in units)."""

    points: tuple[tuple[int, float, float], ...]

    def values(self) -> list[float]:
        return [v for _, v, _ in self.points]


@dataclass(frozen=True)
class BasisGrid:
    """CMI over the (phi, xi) measurement-basis grid."""

    phis: tuple[float, ...]
    xis: tuple[float, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (len(self.phis), len(self.xis)):
            raise ValueError("grid shape does not match the axes")
        if vals.min() < -1e-9:
            raise ValueError("mutual information cannot be negative")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def argmax(self) -> tuple[float, float, float]:
        i, j = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return float(self.phis[i]), float(self.xis[j]), float(self.values[i, j])

    @property
    def max_value(self) -> float:
        return float(self.values.max())


def _plugin_entropy(probs: np.ndarray, base: float) -> float:
    p = probs[probs > _PROB_CUTOFF]
    return float(-np.sum(p * np.log(p)) / math.log(base))


def _vn_entropy_raw(mat: np.ndarray, base: float) -> float:
    vals = np.linalg.eigvalsh(mat)
    return _plugin_entropy(np.clip(vals, 0.0, None), base)


def _check_parts(state, sys_qubits, frac_qubits):
    sys_q = tuple(sorted(sys_qubits))
    frac_q = tuple(sorted(frac_qubits))
    if not sys_q or not frac_q:
        raise ValueError("system and fraction must be non-empty")
    if set(sys_q) & set(frac_q):
        raise ValueError("system and fraction overlap")
    if any(not 0 <= q < state.num_qubits for q in sys_q + frac_q):
        raise ValueError("qubit index outside the register")
    return sys_q, frac_q


def system_coherence(state, system_qubit: int = 0) -> float:
    """Signed coherence factor 2 Re <0|rho_S|1> of the designated qubit."""
    rho = partial_trace(state, (system_qubit,))
    return float(2 * rho.matrix[0, 1].real)


def qmi(state, sys_qubits, frac_qubits, base: float = 2) -> float:
    """I(S:F) = H(S) + H(F) - H(SF)."""
    sys_q, frac_q = _check_parts(state, sys_qubits, frac_qubits)
    h_s = von_neumann_entropy(partial_trace(state, sys_q), base)
    h_f = von_neumann_entropy(partial_trace(state, frac_q), base)
    h_sf = von_neumann_entropy(partial_trace(state, tuple(sorted(sys_q + frac_q))), base)
    return h_s + h_f - h_sf


def averaged_qmi(state, sys_qubits, scheme: PartitionScheme, base: float = 2) -> MiCurve:
    """QMI averaged over all same-size fractions, with the standard error of
    the mean as the spread measure."""
    points = []
    for f in range(1, scheme.num_units + 1):
        vals = [qmi(state, sys_qubits, frac, base) for frac in scheme.fractions(f)]
        arr = np.array(vals)
        stderr = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
        points.append((f, float(arr.mean()), stderr))
    return MiCurve(tuple(points))


def _reduced_parts(state, sys_q, frac_q):
    kept = tuple(sorted(sys_q + frac_q))
    rho = partial_trace(state, kept)
    sys_pos = tuple(kept.index(q) for q in sys_q)
    frac_pos = tuple(kept.index(q) for q in frac_q)
    return rho.matrix, sys_pos, frac_pos, len(kept)


def _joint_probs(mat: np.ndarray, k: int, rotations) -> np.ndarray:
    """diag(U rho U^dag) for the product rotation U = u_0 x ... x u_{k-1}."""
    flat = mat.reshape(-1).copy()
    for pos, u in enumerate(rotations):
        apply_matrix(flat, u, (pos,), 2 * k)
    u_full = reduce(np.kron, rotations)
    probs = np.einsum("ob,ob->o", flat.reshape(2**k, 2**k), u_full.conj()).real
    return np.clip(probs, 0.0, None)


def _shannon_mi(probs: np.ndarray, k: int, sys_pos, frac_pos, base: float) -> float:
    joint = probs.reshape([2] * k).transpose(sys_pos + frac_pos)
    joint = joint.reshape(2 ** len(sys_pos), 2 ** len(frac_pos))
    joint = joint / joint.sum()
    return (
        _plugin_entropy(joint.sum(axis=1), base)
        + _plugin_entropy(joint.sum(axis=0), base)
        - _plugin_entropy(joint.reshape(-1), base)
    )


def _resolve_rotations(k, sys_pos, frac_pos, sys_basis, env_basis_rotations):
    rotations = [None] * k
    for i, pos in enumerate(sys_pos):
        rotations[pos] = sys_basis.rotation(i)
    for i, pos in enumerate(frac_pos):
        rotations[pos] = env_basis_rotations[i]
    return rotations


def cmi_joint(state, sys_qubits, frac_qubits, env_basis: MeasSetting, sys_basis: MeasSetting | None = None, base: float = 2) -> float:
    """Shannon MI between system and fraction outcomes under fixed local
    measurement bases, from the exact Born distribution."""
    sys_q, frac_q = _check_parts(state, sys_qubits, frac_qubits)
    if env_basis.num_qubits != len(frac_q):
        raise ValueError(
            f"basis arity mismatch: {env_basis.num_qubits} bases for {len(frac_q)} fraction qubits"
        )
    if sys_basis is None:
        sys_basis = MeasSetting.computational(len(sys_q))
    elif sys_basis.num_qubits != len(sys_q):
        raise ValueError("basis arity mismatch on the system side")
    mat, sys_pos, frac_pos, k = _reduced_parts(state, sys_q, frac_q)
    env_rot = [env_basis.rotation(i) for i in range(len(frac_q))]
    rotations = _resolve_rotations(k, sys_pos, frac_pos, sys_basis, env_rot)
    probs = _joint_probs(mat, k, rotations)
    return _shannon_mi(probs, k, sys_pos, frac_pos, base)


def cmi_joint_sampled(state, sys_qubits, frac_qubits, env_basis: MeasSetting, shots: int, seed: int, sys_basis: MeasSetting | None = None, base: float = 2) -> float:
    """Plug-in MI from seeded multinomial counts instead of exact Born
    probabilities; emulates a finite-shot estimate of the same quantity."""
    sys_q, frac_q = _check_parts(state, sys_qubits, frac_qubits)
    if env_basis.num_qubits != len(frac_q):
        raise ValueError(
            f"basis arity mismatch: {env_basis.num_qubits} bases for {len(frac_q)} fraction qubits"
        )
    if sys_basis is None:
        sys_basis = MeasSetting.computational(len(sys_q))
    mat, sys_pos, frac_pos, k = _reduced_parts(state, sys_q, frac_q)
    env_rot = [env_basis.rotation(i) for i in range(len(frac_q))]
    rotations = _resolve_rotations(k, sys_pos, frac_pos, sys_basis, env_rot)
    probs = _joint_probs(mat, k, rotations)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    emp = rng.multinomial(shots, probs) / shots
    return _shannon_mi(emp, k, sys_pos, frac_pos, base)


def cmi_grid(
    state,
    sys_qubits,
    frac_qubits,
    phi_steps: int = DEFAULT_PHI_STEPS,
    xi_steps: int = DEFAULT_XI_STEPS,
    sys_basis: MeasSetting | None = None,
    base: float = 2,
) -> BasisGrid:
    """cmi_joint over the uniform basis grid phi in [0, pi], xi in [0, 2*pi),
    with the same (phi, xi) basis on every fraction qubit. The state is
    reduced once; only the rotations vary per cell."""
    if phi_steps < 2 or xi_steps < 2:
        raise ValueError("grid needs at least 2 steps per axis")
    sys_q, frac_q = _check_parts(state, sys_qubits, frac_qubits)
    if sys_basis is None:
        sys_basis = MeasSetting.computational(len(sys_q))
    mat, sys_pos, frac_pos, k = _reduced_parts(state, sys_q, frac_q)
    phis = np.linspace(0.0, math.pi, phi_steps)
    xis = np.linspace(0.0, 2 * math.pi, xi_steps, endpoint=False)
    values = np.empty((phi_steps, xi_steps))
    for i, phi in enumerate(phis):
        for j, xi in enumerate(xis):
            u = basis_rotation(phi, xi)
            rotations = _resolve_rotations(k, sys_pos, frac_pos, sys_basis, [u] * len(frac_pos))
            probs = _joint_probs(mat, k, rotations)
            values[i, j] = _shannon_mi(probs, k, sys_pos, frac_pos, base)
    return BasisGrid(tuple(phis.tolist()), tuple(xis.tolist()), values)


def holevo_bound(state, sys_qubits, frac_qubits, base: float = 2) -> float:
    """chi = H(rho_F) - sum_i p_i H(rho_F|i) over the system's computational
    (pointer) outcomes; zero-probability branches are dropped."""
    sys_q, frac_q = _check_parts(state, sys_qubits, frac_qubits)
    mat, sys_pos, frac_pos, k = _reduced_parts(state, sys_q, frac_q)
    tensor = mat.reshape([2] * (2 * k))
    s = len(sys_pos)
    rho_f = partial_trace(DensityMatrix(k, mat), frac_pos).matrix
    chi = _vn_entropy_raw(rho_f, base)
    for i in range(2**s):
        idx: list = [slice(None)] * (2 * k)
        for bitpos, pos in enumerate(sys_pos):
            bit = (i >> (s - 1 - bitpos)) & 1
            idx[pos] = bit
            idx[k + pos] = bit
        cond = tensor[tuple(idx)].reshape(2 ** len(frac_pos), 2 ** len(frac_pos))
        p_i = np.trace(cond).real
        if p_i < _PROB_CUTOFF:
            continue
        chi -= p_i * _vn_entropy_raw(cond / p_i, base)
    return chi


@dataclass(frozen=True)
class ScanEntry:
    sys_basis: str
    env_basis: str
    value: float


def pauli_cmi_scan(state, sys_qubits, frac_size: int, scheme: PartitionScheme, base: float = 2) -> tuple[ScanEntry, ...]:
    """CMI for every Pauli basis combination on system and fraction, averaged
    over all unordered fractions of `frac_size` qubits built from whole
    scheme units."""
    if frac_size < 1:
        raise ValueError("fraction size must be positive")
    fractions = []
    for r in range(1, scheme.num_units + 1):
        for combo in itertools.combinations(scheme.units, r):
            qubits = tuple(sorted(q for u in combo for q in u))
            if len(qubits) == frac_size:
                fractions.append(qubits)
    if not fractions:
        raise ValueError(f"no fraction of {frac_size} qubits fits whole units")
    sys_q = tuple(sorted(sys_qubits))
    entries = []
    for sys_letters in itertools.product("XYZ", repeat=len(sys_q)):
        sys_basis = MeasSetting.pauli("".join(sys_letters))
        for env_letters in itertools.product("XYZ", repeat=frac_size):
            env_basis = MeasSetting.pauli("".join(env_letters))
            vals = [
                cmi_joint(state, sys_q, frac, env_basis, sys_basis, base) for frac in fractions
            ]
            entries.append(
                ScanEntry("".join(sys_letters), "".join(env_letters), float(np.mean(vals)))
            )
    return tuple(entries)


def blp_witness(curve) -> float:
    """Sum of coherence-magnitude increases along the time grid; positive
    exactly when |c(t)| is non-monotone there."""
    pts = list(curve)
    if len(pts) < 2:
        raise ValueError("witness needs at least 2 points")
    times = [t for t, _ in pts]
    if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
        raise ValueError("times must be strictly increasing")
    total = 0.0
    for (_, c1), (_, c2) in zip(pts, pts[1:]):
        total += max(0.0, abs(c2) - abs(c1))
    return total


def mi_curve_to_csv(curve: MiCurve) -> str:
    lines = ["f,value,stderr"]
    for f, v, se in curve.points:
        lines.append(f"{f},{float(v)!r},{float(se)!r}")
    return "\n".join(lines) + "\n"


def basis_grid_to_csv(grid: BasisGrid) -> str:
    lines = ["phi,xi,value"]
    for i, phi in enumerate(grid.phis):
        for j, xi in enumerate(grid.xis):
            lines.append(f"{float(phi)!r},{float(xi)!r},{float(grid.values[i, j])!r}")
    return "\n".join(lines) + "\n"


def scan_to_csv(entries) -> str:
    lines = ["sys_basis,env_basis,value"]
    for e in entries:
        lines.append(f"{e.sys_basis},{e.env_basis},{float(e.value)!r}")
    return "\n".join(lines) + "\n"
