"""Config-driven experiment runner: `dlab <subcommand> --config cfg.json`.

Every artifact embeds the resolved config and seed; reruns with the same
inputs are byte-identical. Exit codes: 0 success, 2 config error, 3 numerical
failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .circuit import build_condensed_circuit, build_full_circuit, circuit_to_text
from .darwinism import (
    SchemeMode,
    averaged_qmi,
    basis_grid_to_csv,
    cmi_grid,
    cmi_joint_sampled,
    holevo_bound,
    mi_curve_to_csv,
    partition_scheme,
    qmi,
    system_coherence,
)
from .qstate import fidelity, partial_trace
from .routing import (
    builtin_coupling_map,
    coupling_map_from_file,
    peephole_zero_swap,
    route,
    routed_statevector_equivalent,
    routed_unitary_equivalent,
)
from .scm import CanonicalTimes, Scenario, ScmParams, canonical_times, coherence_finite
from .simulator import MeasSetting, NoiseModel, run_density, run_statevector, sample
from .tomography import (
    TomographyJob,
    coherence_from_tomo,
    mle_reconstruct,
    pauli_settings,
    qubit_tomography,
    save_state_text,
    save_tomography_job,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

TOMO_MAX_QUBITS = 5

_SCENARIOS = {"full": Scenario.FULL, "condensed": Scenario.CONDENSED}
_PARTITIONS = {m.value: m for m in SchemeMode}


class ConfigError(Exception):
    pass


_KNOWN_KEYS = {
    "scenario",
    "n",
    "theta",
    "lam",
    "times",
    "shots",
    "seed",
    "noise",
    "coupling_map",
    "partition",
    "outputs",
    "phi_steps",
    "xi_steps",
    "fraction_units",
    "sizes",
    "include_tomography",
    "sampled",
    "dilution",
    "tol",
    "max_iters",
    "jobs",
}
_NOISE_KEYS = {"depol_1q", "depol_2q", "amp_damp_gamma", "readout_flip", "idle_noise"}


def _named_time(name: str, ct: CanonicalTimes) -> float:
    table = {"t_max": ct.t_max, "t_close": ct.t_close, "t_rec": ct.t_rec}
    if name not in table:
        raise ConfigError(f"unknown named time {name!r}, expected one of {sorted(table)}")
    return table[name]


def _resolve_times(raw) -> tuple[float, ...]:
    ct = canonical_times()
    if raw is None:
        raise ConfigError("'times' is required")
    if isinstance(raw, str):
        if raw == "canonical":
            values = [ct.t_max, ct.t_close, ct.t_rec]
        else:
            values = [_named_time(raw, ct)]
    elif isinstance(raw, dict):
        extra = set(raw) - {"start", "stop", "count"}
        if extra:
            raise ConfigError(f"unknown time-grid keys {sorted(extra)}")
        try:
            values = np.linspace(float(raw["start"]), float(raw["stop"]), int(raw["count"])).tolist()
        except KeyError as e:
            raise ConfigError(f"time grid needs 'start', 'stop', 'count' (missing {e})") from None
    elif isinstance(raw, list):
        values = [_named_time(v, ct) if isinstance(v, str) else float(v) for v in raw]
    else:
        raise ConfigError(f"cannot interpret 'times': {raw!r}")
    values = sorted(values)
    if any(t < 0 for t in values):
        raise ConfigError("times must be non-negative")
    if any(b - a <= 1e-15 for a, b in zip(values, values[1:])):
        raise ConfigError("times must be distinct")
    return tuple(values)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario
    n: int
    theta: float
    lam: float
    times: tuple[float, ...]
    shots: int
    seed: int
    noise: NoiseModel
    coupling_map: str
    partition: SchemeMode
    outputs: str
    phi_steps: int
    xi_steps: int
    fraction_units: int
    sizes: tuple[int, ...] | None
    include_tomography: bool
    sampled: bool
    dilution: float
    tol: float
    max_iters: int
    jobs: int

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(raw) - _KNOWN_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        for key in ("scenario", "n"):
            if key not in raw:
                raise ConfigError(f"'{key}' is required")
        scenario = _SCENARIOS.get(raw["scenario"])
        if scenario is None:
            raise ConfigError(f"'scenario' must be one of {sorted(_SCENARIOS)}")
        noise_raw = raw.get("noise", {})
        if not isinstance(noise_raw, dict):
            raise ConfigError("'noise' must be an object")
        bad = set(noise_raw) - _NOISE_KEYS
        if bad:
            raise ConfigError(f"unknown noise keys {sorted(bad)}")
        partition = _PARTITIONS.get(raw.get("partition", "per_pair"))
        if partition is None:
            raise ConfigError(f"'partition' must be one of {sorted(_PARTITIONS)}")
        lam = float(raw.get("lam", 1.0))
        try:
            noise = NoiseModel(**noise_raw)
            cfg = cls(
                scenario=scenario,
                n=int(raw["n"]),
                theta=float(raw.get("theta", math.pi)),
                lam=lam,
                times=_resolve_times(raw.get("times")),
                shots=int(raw.get("shots", 4096)),
                seed=int(raw.get("seed", 0)),
                noise=noise,
                coupling_map=str(raw.get("coupling_map", "t7")),
                partition=partition,
                outputs=str(raw.get("outputs", "out")),
                phi_steps=int(raw.get("phi_steps", 61)),
                xi_steps=int(raw.get("xi_steps", 61)),
                fraction_units=int(raw.get("fraction_units", 1)),
                sizes=None if raw.get("sizes") is None else tuple(int(s) for s in raw["sizes"]),
                include_tomography=bool(raw.get("include_tomography", False)),
                sampled=bool(raw.get("sampled", False)),
                dilution=float(raw.get("dilution", 0.1)),
                tol=float(raw.get("tol", 1e-7)),
                max_iters=int(raw.get("max_iters", 5000)),
                jobs=int(raw.get("jobs", 1)),
            )
            cfg.params  # force ScmParams invariants now, as a config check
        except (ValueError, TypeError) as e:
            raise ConfigError(str(e)) from None
        if cfg.shots <= 0:
            raise ConfigError("'shots' must be positive")
        if cfg.jobs < 1:
            raise ConfigError("'jobs' must be at least 1")
        return cfg

    @property
    def params(self) -> ScmParams:
        return ScmParams(theta=self.theta, lam=self.lam, n=self.n, scenario=self.scenario)

    def resolved_dict(self) -> dict:
        return {
            "scenario": self.scenario.value,
            "n": self.n,
            "theta": self.theta,
            "lam": self.lam,
            "times": list(self.times),
            "shots": self.shots,
            "seed": self.seed,
            "noise": {
                "depol_1q": self.noise.depol_1q,
                "depol_2q": self.noise.depol_2q,
                "amp_damp_gamma": self.noise.amp_damp_gamma,
                "readout_flip": self.noise.readout_flip,
                "idle_noise": self.noise.idle_noise,
            },
            "coupling_map": self.coupling_map,
            "partition": self.partition.value,
            "outputs": self.outputs,
            "phi_steps": self.phi_steps,
            "xi_steps": self.xi_steps,
            "fraction_units": self.fraction_units,
            "sizes": None if self.sizes is None else list(self.sizes),
            "include_tomography": self.include_tomography,
            "sampled": self.sampled,
            "dilution": self.dilution,
            "tol": self.tol,
            "max_iters": self.max_iters,
            "jobs": self.jobs,
        }

    def provenance_lines(self) -> str:
        blob = json.dumps(self.resolved_dict(), sort_keys=True)
        return f"# config: {blob}\n# seed: {self.seed}\n"


def _require_pointer_theta(cfg: ExperimentConfig) -> None:
    if abs(cfg.theta - math.pi) > 1e-12:
        raise ConfigError("circuit-based commands require theta = pi")


def _build_circuit(cfg: ExperimentConfig, t: float):
    if cfg.scenario is Scenario.FULL:
        return build_full_circuit(t, cfg.params)
    return build_condensed_circuit(t, cfg.params)


def _ideal_state(cfg: ExperimentConfig, t: float):
    return run_statevector(_build_circuit(cfg, t))


def _run_state(cfg: ExperimentConfig, t: float):
    """Statevector when the noise model is trivial, density evolution else."""
    circuit = _build_circuit(cfg, t)
    if cfg.noise.is_trivial:
        return run_statevector(circuit)
    return run_density(circuit, cfg.noise)


def _write(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _write_json(path: str, obj) -> None:
    _write(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _finish(cfg: ExperimentConfig, command: str, artifacts: list[str]) -> None:
    manifest = {
        "command": command,
        "version": __version__,
        "config": cfg.resolved_dict(),
        "artifacts": sorted(artifacts),
    }
    _write_json(os.path.join(cfg.outputs, "manifest.json"), manifest)


def _pmap(fn, payloads, jobs: int):
    if jobs <= 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, payloads))


def _coherence_point(payload):
    cfg_dict, index, t = payload
    cfg = ExperimentConfig.from_dict(cfg_dict)
    analytic = coherence_finite(t, cfg.params)
    ideal = _ideal_state(cfg, t)
    simulated = system_coherence(ideal)
    reduced = partial_trace(_run_state(cfg, t), (0,))
    records = [
        sample(
            reduced,
            MeasSetting.pauli(basis),
            cfg.shots,
            cfg.seed + 3 * index + k,
            cfg.noise.readout_flip,
        )
        for k, basis in enumerate("XYZ")
    ]
    sampled = coherence_from_tomo(qubit_tomography(records))
    freq_x = records[0].frequencies()
    mean_x = float(freq_x[0] - freq_x[1])
    stderr = math.sqrt(max(0.0, 1.0 - mean_x**2) / cfg.shots)
    return t, analytic, simulated, sampled, stderr


def cmd_coherence(cfg: ExperimentConfig) -> None:
    _require_pointer_theta(cfg)
    payloads = [(cfg.resolved_dict(), i, t) for i, t in enumerate(cfg.times)]
    rows = _pmap(_coherence_point, payloads, cfg.jobs)
    lines = [cfg.provenance_lines() + "time,analytic,simulated,sampled,sampled_stderr"]
    for t, ana, sim, samp, se in rows:
        lines.append(f"{t!r},{ana!r},{sim!r},{samp!r},{se!r}")
    _write(os.path.join(cfg.outputs, "coherence.csv"), "\n".join(lines) + "\n")
    _finish(cfg, "coherence", ["coherence.csv"])


def _tomo_reconstruction(cfg: ExperimentConfig, state, base_seed: int):
    nq = state.num_qubits
    if nq > TOMO_MAX_QUBITS:
        raise ConfigError(
            f"tomographic reconstruction is capped at {TOMO_MAX_QUBITS} qubits ({nq} requested)"
        )
    settings = pauli_settings(nq)
    records = [
        sample(state, s, cfg.shots, base_seed + j, cfg.noise.readout_flip)
        for j, s in enumerate(settings)
    ]
    job = TomographyJob(nq, tuple(records), cfg.dilution, cfg.tol, cfg.max_iters)
    return job, mle_reconstruct(job)


def _darwinism_point(payload):
    cfg_dict, index, t = payload
    cfg = ExperimentConfig.from_dict(cfg_dict)
    scheme = partition_scheme(cfg.params, cfg.partition)
    curves = {"ideal": averaged_qmi(_ideal_state(cfg, t), (0,), scheme)}
    if not cfg.noise.is_trivial:
        curves["noisy"] = averaged_qmi(_run_state(cfg, t), (0,), scheme)
    if cfg.include_tomography:
        _, result = _tomo_reconstruction(cfg, _run_state(cfg, t), cfg.seed + 10_000 * index)
        curves["tomo"] = averaged_qmi(result.state, (0,), scheme)
    return index, t, curves


def cmd_darwinism(cfg: ExperimentConfig) -> None:
    _require_pointer_theta(cfg)
    payloads = [(cfg.resolved_dict(), i, t) for i, t in enumerate(cfg.times)]
    artifacts = []
    for index, t, curves in _pmap(_darwinism_point, payloads, cfg.jobs):
        for variant, curve in sorted(curves.items()):
            name = f"mi_t{index:02d}_{variant}.csv"
            artifacts.append(name)
            head = cfg.provenance_lines() + f"# time: {t!r}\n# variant: {variant}\n"
            _write(os.path.join(cfg.outputs, name), head + mi_curve_to_csv(curve))
    _finish(cfg, "darwinism", artifacts)


def _fraction_qubits(cfg: ExperimentConfig, scheme) -> tuple[int, ...]:
    if not 1 <= cfg.fraction_units <= scheme.num_units:
        raise ConfigError(
            f"'fraction_units' must lie in 1..{scheme.num_units}, got {cfg.fraction_units}"
        )
    return tuple(sorted(q for u in scheme.units[: cfg.fraction_units] for q in u))


def _cmi_point(payload):
    cfg_dict, index, t = payload
    cfg = ExperimentConfig.from_dict(cfg_dict)
    scheme = partition_scheme(cfg.params, cfg.partition)
    frac = _fraction_qubits(cfg, scheme)
    state = _run_state(cfg, t)
    if cfg.sampled:
        phis = np.linspace(0.0, math.pi, cfg.phi_steps)
        xis = np.linspace(0.0, 2 * math.pi, cfg.xi_steps, endpoint=False)
        values = np.empty((cfg.phi_steps, cfg.xi_steps))
        for i, phi in enumerate(phis):
            for j, xi in enumerate(xis):
                cell_seed = cfg.seed + 100_000 * index + i * cfg.xi_steps + j
                values[i, j] = cmi_joint_sampled(
                    state,
                    (0,),
                    frac,
                    MeasSetting.angles(phi, xi, len(frac)),
                    cfg.shots,
                    cell_seed,
                )
        from .darwinism import BasisGrid

        grid = BasisGrid(tuple(phis.tolist()), tuple(xis.tolist()), values)
    else:
        grid = cmi_grid(state, (0,), frac, cfg.phi_steps, cfg.xi_steps)
    return index, t, frac, grid


def cmd_cmi(cfg: ExperimentConfig) -> None:
    _require_pointer_theta(cfg)
    payloads = [(cfg.resolved_dict(), i, t) for i, t in enumerate(cfg.times)]
    artifacts = []
    for index, t, frac, grid in _pmap(_cmi_point, payloads, cfg.jobs):
        name = f"cmi_t{index:02d}.csv"
        artifacts.append(name)
        phi, xi, peak = grid.argmax()
        head = cfg.provenance_lines() + f"# time: {t!r}\n# fraction: {list(frac)}\n"
        foot = f"# argmax: {phi!r},{xi!r},{peak!r}\n"
        _write(os.path.join(cfg.outputs, name), head + basis_grid_to_csv(grid) + foot)
    _finish(cfg, "cmi", artifacts)


def _compare_point(payload):
    cfg_dict, t, size = payload
    cfg = ExperimentConfig.from_dict(cfg_dict)
    scheme = partition_scheme(cfg.params, cfg.partition)
    state = _run_state(cfg, t)
    qmis, chis, cmis = [], [], []
    for frac in scheme.fractions(size):
        qmis.append(qmi(state, (0,), frac))
        chis.append(holevo_bound(state, (0,), frac))
        cmis.append(cmi_grid(state, (0,), frac, cfg.phi_steps, cfg.xi_steps).max_value)
    return t, size, float(np.mean(qmis)), float(np.mean(chis)), float(np.mean(cmis))


def cmd_compare(cfg: ExperimentConfig) -> None:
    """QMI / Holevo / max-basis CMI per fraction size at the canonical times."""
    _require_pointer_theta(cfg)
    scheme = partition_scheme(cfg.params, cfg.partition)
    sizes = cfg.sizes or tuple(range(1, scheme.num_units + 1))
    if any(not 1 <= s <= scheme.num_units for s in sizes):
        raise ConfigError(f"'sizes' must lie in 1..{scheme.num_units}")
    ct = canonical_times()
    payloads = [
        (cfg.resolved_dict(), t, size)
        for t in (ct.t_max, ct.t_close, ct.t_rec)
        for size in sizes
    ]
    rows = _pmap(_compare_point, payloads, cfg.jobs)
    lines = [cfg.provenance_lines() + "time,size,qmi,holevo,cmi_max"]
    for t, size, q, chi, cmi in rows:
        lines.append(f"{t!r},{size},{q!r},{chi!r},{cmi!r}")
    _write(os.path.join(cfg.outputs, "compare.csv"), "\n".join(lines) + "\n")
    _finish(cfg, "compare", ["compare.csv"])


def _resolve_coupling_map(cfg: ExperimentConfig):
    try:
        return builtin_coupling_map(cfg.coupling_map)
    except ValueError:
        pass
    if os.path.exists(cfg.coupling_map):
        try:
            return coupling_map_from_file(cfg.coupling_map)
        except ValueError as e:
            raise ConfigError(f"bad coupling map file: {e}") from None
    raise ConfigError(f"coupling map {cfg.coupling_map!r} is neither built-in nor a file")


def cmd_route(cfg: ExperimentConfig) -> None:
    _require_pointer_theta(cfg)
    cmap = _resolve_coupling_map(cfg)
    circuit = _build_circuit(cfg, canonical_times().t_max)
    rc = route(circuit, cmap)
    pp = peephole_zero_swap(rc)
    report = {
        "num_logical": circuit.num_qubits,
        "num_physical": cmap.num_physical,
        "placement": {str(k): v for k, v in sorted(rc.placement.items())},
        "final_placement": {str(k): v for k, v in sorted(rc.final_placement.items())},
        "swap_count": rc.swap_count,
        "cnot_count": rc.cnot_count,
        "peephole": {"swap_count": pp.swap_count, "cnot_count": pp.cnot_count},
        "equivalent_statevector": routed_statevector_equivalent(rc, circuit),
        "equivalent_statevector_peephole": routed_statevector_equivalent(pp, circuit),
        "equivalent_unitary": (
            routed_unitary_equivalent(rc, circuit) if cmap.num_physical <= 6 else None
        ),
        "config": cfg.resolved_dict(),
        "seed": cfg.seed,
    }
    _write_json(os.path.join(cfg.outputs, "route_report.json"), report)
    _write(os.path.join(cfg.outputs, "routed.txt"), cfg.provenance_lines() + circuit_to_text(rc.circuit))
    _write(
        os.path.join(cfg.outputs, "routed_peephole.txt"),
        cfg.provenance_lines() + circuit_to_text(pp.circuit),
    )
    _finish(cfg, "route", ["route_report.json", "routed.txt", "routed_peephole.txt"])


def cmd_tomo(cfg: ExperimentConfig) -> None:
    _require_pointer_theta(cfg)
    t = cfg.times[0]
    state = _run_state(cfg, t)
    job, result = _tomo_reconstruction(cfg, state, cfg.seed)
    save_tomography_job(job, os.path.join(cfg.outputs, "job"))
    ideal = _ideal_state(cfg, t).density_matrix()
    fid = fidelity(result.state, ideal)
    lls = result.log_likelihoods
    report = {
        "time": t,
        "num_qubits": state.num_qubits,
        "fidelity_vs_ideal": fid,
        "iterations": result.iterations,
        "converged": result.converged,
        "final_log_likelihood": lls[-1],
        "log_likelihood_monotone": all(b >= a - 1e-12 for a, b in zip(lls, lls[1:])),
        "config": cfg.resolved_dict(),
        "seed": cfg.seed,
    }
    save_state_text(result.state, os.path.join(cfg.outputs, "state.txt"))
    _write_json(os.path.join(cfg.outputs, "tomo_report.json"), report)
    artifacts = ["job", "state.txt", "tomo_report.json"]
    _finish(cfg, "tomo", artifacts)


_COMMANDS = {
    "coherence": cmd_coherence,
    "darwinism": cmd_darwinism,
    "cmi": cmd_cmi,
    "compare": cmd_compare,
    "route": cmd_route,
    "tomo": cmd_tomo,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dlab", description="collision-model workbench")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--seed", type=int, help="seed override")
        p.add_argument("--jobs", type=int, help="worker count override")
    args = parser.parse_args(argv)
    try:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        if args.out is not None:
            raw["outputs"] = args.out
        if args.seed is not None:
            raw["seed"] = args.seed
        if args.jobs is not None:
            raw["jobs"] = args.jobs
        cfg = ExperimentConfig.from_dict(raw)
        _COMMANDS[args.command](cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as e:  # noqa: BLE001 - anything downstream is a run failure
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
