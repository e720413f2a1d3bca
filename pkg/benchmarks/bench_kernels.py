#!/usr/bin/env python3
"""Time the JIT kernels against the pure NumPy/Python fallback path.

The fallback implementations are always importable under the `_py` names,
so both paths are measured in one process regardless of the
CHRONON_LAB_NO_NUMBA setting.
"""

import argparse
import time

import numpy as np

from chronon_lab import kernels


def best_of(fn, repeats):
    best = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best


def report(name, jit_fn, py_fn, check, repeats):
    a = jit_fn()
    b = py_fn()
    assert check(a, b), f"{name}: paths disagree"
    t_jit = best_of(jit_fn, repeats)
    t_py = best_of(py_fn, repeats)
    print(f"{name:<24} numba {t_jit * 1e3:9.2f} ms   "
          f"fallback {t_py * 1e3:9.2f} ms   speedup {t_py / t_jit:6.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=200_000,
                    help="trajectory length")
    ap.add_argument("--compose", type=int, default=2 ** 20,
                    help="composition count")
    ap.add_argument("--batch", type=int, default=200_000,
                    help="propagator batch size")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    print(f"numba path active: {kernels.NUMBA_ENABLED}")
    if not kernels.NUMBA_ENABLED:
        print("note: public names are the fallback; jit column repeats it")

    rng = np.random.default_rng(0)
    u = np.linalg.qr(rng.standard_normal((2, 2))
                     + 1j * rng.standard_normal((2, 2)))[0]
    psi = np.array([1.0 + 0j, 0.0 + 0j])
    gen = -1j * 0.5 * (u + u.conj().T)
    times = np.linspace(0.0, 10.0, args.batch)

    # warm the JIT outside the timings
    kernels.step_trajectory(u, psi, 2)
    kernels.compose_steps(u, 2)
    kernels.propagator_batch(gen, times[:2])

    report("step_trajectory",
           lambda: kernels.step_trajectory(u, psi, args.steps),
           lambda: kernels.step_trajectory_py(u, psi, args.steps),
           lambda a, b: np.allclose(a, b, atol=1e-10), args.repeats)
    report("compose_steps",
           lambda: kernels.compose_steps(u, args.compose),
           lambda: kernels.compose_steps_py(u, args.compose),
           lambda a, b: np.allclose(a, b, atol=1e-10), args.repeats)
    report("propagator_batch",
           lambda: kernels.propagator_batch(gen, times),
           lambda: kernels.propagator_batch_py(gen, times),
           lambda a, b: np.allclose(a, b, atol=1e-10), args.repeats)


if __name__ == "__main__":
    main()
