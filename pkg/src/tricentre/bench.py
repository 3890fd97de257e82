"""Benchmark the compiled integration kernel against the pure-Python path.

Runs the same reference workload (separated-flow integration over several
periods at tight tolerance) through the kernel selected at import time
(numba-compiled unless TRICENTRE_NUMBA=0 or numba is missing) and through
the always-pure reference implementation, then prints both timings.

Usage: python -m tricentre.bench [--reps N] [--periods P] [--tol T]
"""
from __future__ import annotations

import argparse
import math
import time

import numpy as np

from . import _kernels
from ._accel import NUMBA_ENABLED
from .periods import period_xi, solve_resonant_a1


def _workload(beta: float = 1.0 / 7.0, periods: float = 5.0,
              tol: float = 1e-12):
    sol = solve_resonant_a1(beta, 1)
    a1 = sol.a1_hat
    phi0 = 0.3
    y0 = np.array([
        0.0, phi0,
        2.0 * math.sqrt(1.0 - beta * a1 - a1),
        2.0 * math.sqrt(beta * a1 * math.cos(phi0) ** 2 + a1)])
    span = periods * period_xi(beta, a1)
    args = (y0, 0.0, span, tol, tol, 0.0, span, 10_000_000,
            1.0, -2.0 * beta * a1, 0.0, 0.0, 0.0, 0.0)
    return args


def _time(fn, args, reps: int) -> tuple[float, int]:
    best = math.inf
    nsteps = 0
    for _ in range(reps):
        t0 = time.perf_counter()
        status, n, _t, _y, _k = fn(*args)
        best = min(best, time.perf_counter() - t0)
        assert status == _kernels.STATUS_OK
        nsteps = n
    return best, nsteps


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--reps", type=int, default=3,
                        help="repetitions per variant (best time reported)")
    parser.add_argument("--periods", type=float, default=5.0,
                        help="integration span in xi periods")
    parser.add_argument("--tol", type=float, default=1e-12)
    args = parser.parse_args(argv)

    work = _workload(periods=args.periods, tol=args.tol)

    if NUMBA_ENABLED:
        t0 = time.perf_counter()
        _kernels.dopri5_core(*work)  # trigger compilation
        compile_s = time.perf_counter() - t0
        label = "numba @njit"
    else:
        compile_s = 0.0
        label = "pure fallback (numba disabled)"

    hot, nsteps = _time(_kernels.dopri5_core, work, args.reps)
    pure, _ = _time(_kernels._dopri5_core_py, work, max(1, args.reps // 3))

    print(f"workload: {args.periods:g} periods at tol {args.tol:g}"
          f" ({nsteps} accepted steps)")
    print(f"selected kernel [{label}]: {hot*1e3:9.2f} ms"
          + (f"  (first-call compile {compile_s:.2f} s)" if NUMBA_ENABLED else ""))
    print(f"pure-Python reference:     {pure*1e3:9.2f} ms")
    if NUMBA_ENABLED and hot > 0:
        print(f"speedup: {pure/hot:.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
