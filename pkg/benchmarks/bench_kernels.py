"""Timing comparison of the compiled kernels against the NumPy fallback.

Run after an editable install:

    python benchmarks/bench_kernels.py [--sizes 256,1024,4096] [--reps 2000]

The two backends share one formula tree, so besides the timing table this
script asserts the explicit step and the reduction agree bitwise (the implicit
solve uses a different tridiagonal factorization and only agrees to ~1e-13).
"""

from __future__ import annotations

import argparse
import importlib
import os
import sys
import time

import numpy as np

os.environ.pop("GPME1D_FORCE_FALLBACK", None)
from gpme1d._kernels import BACKEND, _fallback  # noqa: E402

if BACKEND != "compiled":
    sys.exit("compiled backend unavailable; nothing to compare")
_core = importlib.import_module("gpme1d._kernels._core")


def _problem(n: int, rng: np.random.Generator):
    x = np.linspace(-2.0, 2.0, n)
    v = np.maximum(2.0 / 3.0 - x * x / 6.0, 0.0)
    v += 1e-3 * rng.random(n) * (v > 0)
    sigma = v.copy()
    return v, sigma


def _time(fn, reps: int) -> float:
    best = np.inf
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        best = min(best, (time.perf_counter() - t0) / reps)
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="256,1024,4096")
    ap.add_argument("--reps", type=int, default=2000)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(12345)

    dt, eps = 1e-5, 0.01
    print(f"{'n':>6} {'kernel':<18} {'compiled':>12} {'fallback':>12} {'speedup':>8}")
    for n in sizes:
        v, sigma = _problem(n, rng)
        kl, kr = 2, n - 3
        dx = 4.0 / (n - 1)
        sig_i = np.ascontiguousarray(sigma[kl : kr + 1])

        out_c = _core.explicit_interior(v, sig_i, kl, kr, dt, dx, eps)
        out_f = _fallback.explicit_interior(v, sig_i, kl, kr, dt, dx, eps)
        assert np.array_equal(out_c, out_f), "explicit step: backends disagree"
        stats_c = _core.state_stats(v, dx)
        stats_f = _fallback.state_stats(v, dx)
        assert stats_c == stats_f, "state stats: backends disagree"

        sol_c = _core.implicit_interior(v, sig_i, kl, kr, dt, dx, eps)
        sol_f = _fallback.implicit_interior(v, sig_i, kl, kr, dt, dx, eps)
        scale = np.abs(sol_f).max()
        assert np.abs(sol_c - sol_f).max() <= 1e-12 * max(scale, 1.0), "implicit solve drifted"

        for name, cf, ff, arg in (
            ("explicit_interior", _core.explicit_interior, _fallback.explicit_interior, (v, sig_i, kl, kr, dt, dx, eps)),
            ("implicit_interior", _core.implicit_interior, _fallback.implicit_interior, (v, sig_i, kl, kr, dt, dx, eps)),
            ("state_stats", _core.state_stats, _fallback.state_stats, (v, dx)),
        ):
            reps = max(args.reps // 10, 50) if name == "implicit_interior" else args.reps
            t_c = _time(lambda: cf(*arg), reps)
            t_f = _time(lambda: ff(*arg), reps)
            print(f"{n:>6} {name:<18} {t_c * 1e6:>10.1f}us {t_f * 1e6:>10.1f}us {t_f / t_c:>7.1f}x")


if __name__ == "__main__":
    main()
