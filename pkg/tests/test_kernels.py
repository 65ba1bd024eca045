"""Backend parity and kernel-level contracts.

The compiled extension is built with FP contraction disabled so the explicit
update and the stats reduction agree *bitwise* with the NumPy fallback; the
implicit solve goes through different elimination orders and only gets a
relative tolerance.
"""

import os

import numpy as np
import pytest

from gpme1d import _kernels as kern
from gpme1d._kernels import _fallback

_core = pytest.importorskip(
    "gpme1d._kernels._core", reason="compiled extension not built"
)

DT = 7.389162561576354e-05
DX = 0.01
EPS = 0.01


def make_problem(n=400, seed=0):
    rng = np.random.default_rng(seed)
    x = np.linspace(-2.0, 2.0, n)
    v = np.maximum(2.0 / 3.0 - x * x / 6.0, 0.0)
    v += 1e-3 * rng.random(n)
    v[:5] = 0.0
    v[-5:] = 0.0
    kl, kr = 20, n - 21
    sig = np.ascontiguousarray(v[kl : kr + 1])  # sigma(v) = v for m = 2
    return np.ascontiguousarray(v), sig, kl, kr


def test_backend_selected():
    assert kern.BACKEND in ("compiled", "python")
    if not os.environ.get("GPME1D_FORCE_FALLBACK"):
        assert kern.BACKEND == "compiled"  # _core imported above, so it must win


@pytest.mark.parametrize("seed", [0, 1, 7])
def test_explicit_bitwise_parity(seed):
    v, sig, kl, kr = make_problem(seed=seed)
    a = _core.explicit_interior(v, sig, kl, kr, DT, DX, EPS)
    b = _fallback.explicit_interior(v, sig, kl, kr, DT, DX, EPS)
    assert np.array_equal(np.asarray(a), np.asarray(b))


@pytest.mark.parametrize("seed", [0, 1, 7])
def test_stats_bitwise_parity(seed):
    v, _, _, _ = make_problem(seed=seed)
    assert tuple(_core.state_stats(v, DX)) == tuple(_fallback.state_stats(v, DX))


@pytest.mark.parametrize("seed", [0, 1])
def test_implicit_parity(seed):
    v, sig, kl, kr = make_problem(seed=seed)
    a = np.asarray(_core.implicit_interior(v, sig, kl, kr, DT, DX, EPS))
    b = np.asarray(_fallback.implicit_interior(v, sig, kl, kr, DT, DX, EPS))
    scale = np.abs(b).max()
    assert np.abs(a - b).max() <= 1e-12 * scale


def test_explicit_matches_pointwise_formula():
    v, sig, kl, kr = make_problem()
    out = np.asarray(kern.explicit_interior(v, sig, kl, kr, DT, DX, EPS))
    for i, k in enumerate(range(kl, kr + 1)):
        lap = (v[k - 1] - 2.0 * v[k] + v[k + 1]) / (DX * DX)
        grad = (v[k + 1] - v[k - 1]) / (2.0 * DX)
        expect = v[k] + DT * ((sig[i] + EPS) * lap + grad * grad)
        assert out[i] == pytest.approx(expect, abs=1e-14)


def test_stats_match_numpy_reductions():
    v, _, _, _ = make_problem(seed=3)
    v_min, v_max, max_w, min_Z = kern.state_stats(v, DX)
    assert v_min == v.min()
    assert v_max == v.max()
    assert max_w == pytest.approx(np.abs(np.diff(v)).max() / DX, rel=1e-15)
    lap = (v[:-2] - 2.0 * v[1:-1] + v[2:]) / (DX * DX)
    assert min_Z == pytest.approx(lap.min(), rel=1e-12, abs=1e-12)


def test_implicit_solves_documented_system():
    # residual of (I + dt sigma A / dx^2) w = rhs, boundary values folded into rhs
    v, sig, kl, kr = make_problem(seed=5)
    w = np.asarray(kern.implicit_interior(v, sig, kl, kr, DT, DX, EPS))
    lam = DT * sig / (DX * DX)
    vk, vm, vp = v[kl:kr + 1], v[kl - 1:kr], v[kl + 1:kr + 2]
    rhs = vk + DT * (EPS * (vm - 2.0 * vk + vp) / (DX * DX) + ((vp - vm) / (2.0 * DX)) ** 2)
    rhs[0] += lam[0] * v[kl - 1]
    rhs[-1] += lam[-1] * v[kr + 1]
    lhs = (1.0 + 2.0 * lam) * w
    lhs[:-1] -= lam[:-1] * w[1:]
    lhs[1:] -= lam[1:] * w[:-1]
    assert np.abs(lhs - rhs).max() <= 1e-12 * max(1.0, np.abs(rhs).max())


def test_constant_state_is_fixed_point():
    n = 50
    v = np.full(n, 0.4)
    sig = np.full(n - 20, 0.4)
    out_e = np.asarray(kern.explicit_interior(v, sig, 10, n - 11, DT, DX, EPS))
    assert np.all(out_e == 0.4)
    out_i = np.asarray(kern.implicit_interior(v, sig, 10, n - 11, DT, DX, EPS))
    np.testing.assert_allclose(out_i, 0.4, rtol=1e-13)


def test_zero_sigma_reduces_implicit_to_explicit():
    # sigma = 0 leaves only the explicit viscosity and gradient terms on both paths
    v, _, kl, kr = make_problem(seed=9)
    zeros = np.zeros(kr - kl + 1)
    a = np.asarray(kern.implicit_interior(v, zeros, kl, kr, DT, DX, EPS))
    b = np.asarray(kern.explicit_interior(v, zeros, kl, kr, DT, DX, EPS))
    np.testing.assert_allclose(a, b, rtol=0.0, atol=1e-14)


def test_fallback_forced_by_env():
    import subprocess
    import sys

    code = "import gpme1d._kernels as k; print(k.BACKEND)"
    env = dict(os.environ, GPME1D_FORCE_FALLBACK="1")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env)
    assert out.stdout.strip() == "python"
