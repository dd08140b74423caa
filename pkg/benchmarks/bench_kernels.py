"""Benchmark the compiled gate kernels against the pure-numpy fallback.

Two sections: raw 1q/2q matrix application on random states, and an
end-to-end statevector simulation of a workbench circuit run once per
implementation in a subprocess (the implementation is fixed at import).

Usage:
    python3 benchmarks/bench_kernels.py [--qubits 8 10 12 14] [--repeats 20]
"""
from __future__ import annotations

import argparse
import math
import os
import subprocess
import sys
import time

import numpy as np

from dlab.kernels import _fallback

try:
    from dlab.kernels import _core
except ImportError:
    _core = None


def random_state(num_qubits: int, rng: np.random.Generator) -> np.ndarray:
    amps = rng.standard_normal(2**num_qubits) + 1j * rng.standard_normal(2**num_qubits)
    return np.ascontiguousarray(amps / np.linalg.norm(amps))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    return np.ascontiguousarray(q * (np.diag(r) / np.abs(np.diag(r))))


def best_of(fn, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernels(num_qubits: int, repeats: int, rng: np.random.Generator) -> None:
    state = random_state(num_qubits, rng)
    u1 = random_unitary(2, rng)
    u2 = random_unitary(4, rng)
    mid = num_qubits // 2
    rows = []
    for label, mat, axes in (("1q", u1, (mid,)), ("2q", u2, (mid - 1, mid))):
        work = state.copy()
        t_fb = best_of(lambda: _fallback.apply_matrix(work, mat, axes, num_qubits), repeats)
        if _core is None:
            rows.append((label, t_fb, None))
            continue
        work = state.copy()
        if label == "1q":
            t_core = best_of(lambda: _core.apply_1q(work, u1, mid, num_qubits), repeats)
        else:
            t_core = best_of(lambda: _core.apply_2q(work, u2, mid - 1, mid, num_qubits), repeats)
        rows.append((label, t_fb, t_core))
    for label, t_fb, t_core in rows:
        if t_core is None:
            print(f"  {label}  fallback {t_fb * 1e6:9.1f} us   (compiled core unavailable)")
        else:
            print(
                f"  {label}  fallback {t_fb * 1e6:9.1f} us   cython {t_core * 1e6:9.1f} us"
                f"   speedup {t_fb / t_core:5.2f}x"
            )


def circuit_worker(num_pairs: int, repeats: int) -> None:
    # separate process so the import-time kernel choice applies cleanly
    from dlab import ScmParams, build_condensed_circuit, canonical_times, run_statevector

    t_max = canonical_times()[0]
    params = ScmParams(theta=math.pi, lam=1.0, n=num_pairs)
    circuit = build_condensed_circuit(t_max, params)
    elapsed = best_of(lambda: run_statevector(circuit), repeats)
    print(f"{elapsed:.6f}")


def bench_circuit(num_pairs: int, repeats: int) -> None:
    results = {}
    for label, env_val in (("cython", "0"), ("python", "1")):
        env = dict(os.environ, DLAB_PURE_PYTHON=env_val)
        proc = subprocess.run(
            [sys.executable, __file__, "--worker", str(num_pairs), str(repeats)],
            capture_output=True,
            text=True,
            env=env,
        )
        if proc.returncode != 0:
            raise RuntimeError(f"worker failed: {proc.stderr}")
        results[label] = float(proc.stdout.strip())
    t_py, t_cy = results["python"], results["cython"]
    print(
        f"  condensed scenario, {num_pairs + 1} qubits: python {t_py * 1e3:8.2f} ms"
        f"   cython {t_cy * 1e3:8.2f} ms   speedup {t_py / t_cy:5.2f}x"
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--qubits", type=int, nargs="+", default=[8, 10, 12, 14])
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--worker", nargs=2, type=int, metavar=("PAIRS", "REPEATS"))
    args = parser.parse_args(argv)
    if args.worker:
        circuit_worker(*args.worker)
        return 0
    rng = np.random.default_rng(0)
    print(f"compiled core available: {_core is not None}")
    print("gate kernels (best of repeats):")
    for n in args.qubits:
        print(f" {n} qubits")
        bench_kernels(n, args.repeats, rng)
    print("full circuit simulation:")
    bench_circuit(13, max(3, args.repeats // 4))
    return 0


if __name__ == "__main__":
    sys.exit(main())
