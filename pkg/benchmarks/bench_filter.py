#!/usr/bin/env python3
"""Benchmark: compiled filter kernel vs numpy fallback.

The filter evaluation is the hot inner loop of the decoherence quadrature
(one evaluation per Gauss node, O(n_pulses) work each).  This script times
both backends on representative workloads and one full end-to-end chi
evaluation, printing a table.

Run after installing:  python benchmarks/bench_filter.py
"""
import time

import numpy as np

from dephasekit._kernels import _filter_py

try:
    from dephasekit._kernels import _filter_cy
except ImportError:
    _filter_cy = None


def _time(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernel():
    rng = np.random.default_rng(0)
    m = 200_000
    x = rng.uniform(0.0, 2.0e5, m)
    print(f"filter_grid on {m} points (best of 5):")
    print(f"{'sequence':>14} {'numpy':>12} {'cython':>12} {'speedup':>9}")
    cases = [
        ("se (n=1)", np.array([0.5])),
        ("cpmg n=6", (np.arange(1, 7) - 0.5) / 6),
        ("cpmg n=50", (np.arange(1, 51) - 0.5) / 50),
        ("cpmg n=500", (np.arange(1, 501) - 0.5) / 500),
        ("udd n=50", np.sin(np.pi * np.arange(1, 51) / 102) ** 2),
        ("random n=500", np.sort(rng.uniform(0.001, 0.999, 500))),
    ]
    for name, fr in cases:
        t_py = _time(_filter_py.filter_grid, fr, x)
        if _filter_cy is not None:
            t_cy = _time(_filter_cy.filter_grid, fr, x)
            print(f"{name:>14} {t_py * 1e3:>10.1f}ms {t_cy * 1e3:>10.1f}ms "
                  f"{t_py / t_cy:>8.1f}x")
        else:
            print(f"{name:>14} {t_py * 1e3:>10.1f}ms {'n/a':>12} {'':>9}")


def bench_chi():
    import os
    import subprocess
    import sys
    code = (
        "import time, dephasekit as dk\n"
        "from dephasekit import spectra, sequences, quadrature\n"
        "s = spectra.make_power_law(2.585e-2, 5/3, spectra.PAPER_F_IR, spectra.PAPER_F_UV)\n"
        "q = quadrature.chi_integral  # warm up caches\n"
        "q(s, sequences.cpmg(8), 1.0, tol=1e-5)\n"
        "t0 = time.perf_counter()\n"
        "r = q(s, sequences.cpmg(500), 224.0, tol=1e-5)\n"
        "print(f'  backend={dk.kernel_backend:>6}: chi={r.value:.6f} "
        "evals={r.n_evals} wall={time.perf_counter()-t0:.3f}s')\n"
    )
    print("\nend-to-end chi (paper-like spectrum, cpmg n=500, t=224 s, tol=1e-5):",
          flush=True)
    for force in ("0", "1"):
        env = dict(os.environ, DEPHASEKIT_FORCE_FALLBACK=force)
        subprocess.run([sys.executable, "-c", code], env=env, check=True)


if __name__ == "__main__":
    bench_kernel()
    bench_chi()
