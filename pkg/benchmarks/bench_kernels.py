"""Compare the compiled correlator kernels against the numpy reference.

Usage: python benchmarks/bench_kernels.py [--dims 40,80,160] [--samples 500]

Reports per-backend wall time for the weighted OTOC series (the hot path of
every coupling scan) plus the TPC and equilibrium kernels, and checks that
both backends agree to near machine precision.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from otoc_criticality import kernels
from otoc_criticality.kernels import reference


def make_case(rng, dim, samples):
    energies = np.sort(rng.normal(scale=10.0, size=dim))
    W = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    W = np.ascontiguousarray((W + W.conj().T) / 2)
    w = np.full(dim, 1.0 / dim)
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi = np.ascontiguousarray(psi / np.linalg.norm(psi), dtype=np.complex128)
    times = np.linspace(0.0, 50.0, samples)
    return energies, W, w, psi, times


def timed(fn, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", default="40,80,160")
    ap.add_argument("--samples", type=int, default=500)
    args = ap.parse_args()
    dims = [int(x) for x in args.dims.split(",")]
    rng = np.random.default_rng(0)

    print(f"active backend: {kernels.BACKEND}")
    if kernels.BACKEND != "compiled":
        print("compiled extension not available; timing the reference only")

    header = f"{'kernel':<12} {'D':>5} {'compiled':>12} {'reference':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for dim in dims:
        energies, W, w, psi, times = make_case(rng, dim, args.samples)
        cases = {
            "otoc": (
                lambda: kernels.otoc_weighted_series(W, W, energies, w, times),
                lambda: reference.otoc_weighted_series(W, W, energies, w, times),
            ),
            "tpc": (
                lambda: kernels.tpc_series(W, W, energies, times, 1.0 / dim),
                lambda: reference.tpc_series(W, W, energies, times, 1.0 / dim),
            ),
            "equilibrium": (
                lambda: kernels.equilibrium_series(W, W, energies, psi, times),
                lambda: reference.equilibrium_series(W, W, energies, psi, times),
            ),
        }
        for name, (fast_fn, slow_fn) in cases.items():
            t_fast, fast = timed(fast_fn)
            t_slow, slow = timed(slow_fn)
            err = float(np.max(np.abs(fast - slow)))
            scale = float(np.max(np.abs(slow))) or 1.0
            if err > 1e-10 * scale:
                raise SystemExit(f"backend mismatch for {name} at D={dim}: {err}")
            print(f"{name:<12} {dim:>5} {t_fast:>11.4f}s {t_slow:>11.4f}s "
                  f"{t_slow / t_fast:>7.1f}x")


if __name__ == "__main__":
    main()
