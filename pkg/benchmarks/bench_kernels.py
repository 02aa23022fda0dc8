"""Wall-clock comparison of the compiled RK4 kernel against the pure-Python
(numpy) fallback on the periodic exponential chain.

Run:  python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from ncforms import kernels


def run(sites, steps, dt, force_python):
    k = np.arange(sites)
    u0 = 0.8 * np.cos(2 * np.pi * k / sites)
    v0 = 0.3 * np.sin(2 * np.pi * k / sites)
    t0 = time.perf_counter()
    ts, us, vs, hs, ps = kernels.rk4_run(u0, v0, 1.0, dt, steps,
                                         stride=steps, force_python=force_python)
    elapsed = time.perf_counter() - t0
    return elapsed, us[-1], vs[-1]


def main():
    print(f"compiled extension available: {kernels.HAVE_COMPILED}")
    cases = [(16, 100_000), (64, 100_000), (256, 20_000), (1024, 5_000)]
    print(f"{'sites':>6} {'steps':>8} {'python (s)':>12} {'compiled (s)':>13} "
          f"{'speedup':>8} {'parity':>10}")
    for sites, steps in cases:
        t_py, u_py, v_py = run(sites, steps, 1e-3, force_python=True)
        if kernels.HAVE_COMPILED:
            t_c, u_c, v_c = run(sites, steps, 1e-3, force_python=False)
            par = max(np.abs(u_py - u_c).max(), np.abs(v_py - v_c).max())
            print(f"{sites:>6} {steps:>8} {t_py:>12.4f} {t_c:>13.4f} "
                  f"{t_py / t_c:>8.2f} {par:>10.2e}")
        else:
            print(f"{sites:>6} {steps:>8} {t_py:>12.4f} {'n/a':>13} "
                  f"{'n/a':>8} {'n/a':>10}")


if __name__ == "__main__":
    main()
