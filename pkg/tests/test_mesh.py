"""Admissible (dt, eps) selection and grid geometry.

The frozen values below were hand-computed from the admissibility formulas before
the implementation existed:

    strict:  eps = g0 dx (27 + 9 s1 + 3 S1 + dx S2/4),
             beta = 1 / (2(sigma_max + eps) + g0 dx (4 + 3 S1) + g0^2 dx^2 S2/2)
    relaxed: eps = g0 dx (1 + S1/2), beta = 1 / (2(sigma_max + eps))
"""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gpme1d.mesh import (
    CflMode,
    MeshConfig,
    build_grid,
    build_mesh,
    cfl_relaxed,
    cfl_strict,
    snap_ceil,
    snap_floor,
)
from gpme1d.nonlinearity import PerturbedPme, Pme

DX = 0.01
G0 = 2.0 / 3.0
M = 2.0 / 3.0


@pytest.fixture(scope="module")
def pme_bounds():
    return Pme(2.0).structural_bounds(M)


def test_strict_frozen_values(pme_bounds):
    # eps = (2/3)(0.01)(27 + 9 + 3) = 0.26, beta = 1/(2(2/3 + 0.26) + (2/3)(0.01)(7)) = 1/1.9
    dt, eps = cfl_strict(pme_bounds, G0, M, DX)
    assert eps == pytest.approx(0.26, rel=1e-14)
    assert dt / (DX * DX) == pytest.approx(1.0 / 1.9, rel=1e-14)


def test_relaxed_frozen_values(pme_bounds):
    # eps = (2/3)(0.01)(1.5) = 0.01, beta = 1/(2(2/3 + 0.01))
    dt, eps = cfl_relaxed(pme_bounds, G0, M, DX)
    assert eps == pytest.approx(0.01, rel=1e-14)
    assert dt / (DX * DX) == pytest.approx(0.73892, rel=1e-5)
    assert dt / (DX * DX) == pytest.approx(1.0 / (2.0 * (M + eps)), rel=1e-15)


def test_strict_perturbed_frozen_values():
    # s1=1, S1=2, S2=1: eps = 0.01 (27 + 9 + 6 + 0.0025) = 0.420025
    b = PerturbedPme(2.0, 0.5).structural_bounds(1.0)
    dt, eps = cfl_strict(b, 1.0, 1.0, DX)
    assert eps == pytest.approx(0.420025, rel=1e-14)
    denom = 2.0 * (1.5 + eps) + 1.0 * DX * (4.0 + 6.0) + DX * DX * 0.5
    assert dt == pytest.approx(DX * DX / denom, rel=1e-14)


@pytest.mark.parametrize("fn", [cfl_strict, cfl_relaxed])
def test_flat_data_substitutes_eps_dx(pme_bounds, fn):
    # gamma0 = 0 collapses the admissible eps interval; eps = dx keeps the scheme parabolic
    _, eps = fn(pme_bounds, 0.0, 1.0, DX)
    assert eps == DX


def test_relaxed_eps_linear_in_dx(pme_bounds):
    _, e1 = cfl_relaxed(pme_bounds, G0, M, DX)
    _, e2 = cfl_relaxed(pme_bounds, G0, M, 2.0 * DX)
    assert e2 == 2.0 * e1  # exact: scaling by 2 is lossless


@pytest.mark.parametrize("fn", [cfl_strict, cfl_relaxed])
def test_cfl_rejects_bad_args(pme_bounds, fn):
    with pytest.raises(ValueError):
        fn(pme_bounds, G0, M, 0.0)
    with pytest.raises(ValueError):
        fn(pme_bounds, -1.0, M, DX)
    with pytest.raises(ValueError):
        fn(pme_bounds, G0, -1.0, DX)


NL_STRATEGY = st.builds(
    PerturbedPme,
    st.floats(min_value=1.05, max_value=5.0),
    st.floats(min_value=0.0, max_value=2.0),
)


@given(
    nl=NL_STRATEGY,
    M_=st.floats(min_value=0.01, max_value=5.0),
    g0=st.floats(min_value=0.0, max_value=3.0),
    dx=st.floats(min_value=1e-4, max_value=0.5),
)
def test_strict_dt_never_exceeds_relaxed(nl, M_, g0, dx):
    b = nl.structural_bounds(M_)
    dt_s, eps_s = cfl_strict(b, g0, M_, dx)
    dt_r, eps_r = cfl_relaxed(b, g0, M_, dx)
    assert dt_s <= dt_r * (1.0 + 1e-15)
    assert eps_s >= eps_r * (1.0 - 1e-15)


@given(
    nl=NL_STRATEGY,
    M_=st.floats(min_value=0.01, max_value=5.0),
    g0=st.floats(min_value=0.0, max_value=3.0),
    dx=st.floats(min_value=1e-4, max_value=0.5),
    strict=st.booleans(),
)
def test_convexity_requirements(nl, M_, g0, dx, strict):
    """Both regimes satisfy the two inequalities the maximum principle rests on:
    beta (sigma_max + eps) <= 1/2 and g0 dx (1 + S1/2) <= eps."""
    b = nl.structural_bounds(M_)
    dt, eps = (cfl_strict if strict else cfl_relaxed)(b, g0, M_, dx)
    beta = dt / (dx * dx)
    assert beta * (b.sigma_max + eps) <= 0.5 + 1e-14
    assert g0 * dx * (1.0 + b.S1 / 2.0) <= eps * (1.0 + 1e-14)


# --- grid geometry ---


def test_build_grid_covers_reachable_set():
    x_min, x_max, n = build_grid((-2.0, 4.78), G0, 2.0, DX)
    pad = G0 * 2.0 + 2.0 * DX
    assert x_min <= -2.0 - pad + 1e-12
    assert x_max >= 4.78 + pad - 1e-12
    assert (x_min, x_max) == (-3.36, pytest.approx(6.14, rel=1e-14))
    assert n == round((x_max - x_min) / DX) + 1
    # endpoints snap to integer multiples of dx
    assert round(x_min / DX) * DX == x_min
    assert abs(round(x_max / DX) - x_max / DX) < 1e-9


def test_build_grid_zero_speed_pads_two_cells():
    x_min, x_max, n = build_grid((0.0, 1.0), 0.0, 5.0, 0.1)
    assert x_min == pytest.approx(-0.2, abs=1e-12)
    assert x_max == pytest.approx(1.2, abs=1e-12)
    assert n == 15


def test_build_grid_rejects_degenerate():
    with pytest.raises(ValueError):
        build_grid((0.0, 0.0), G0, 1.0, DX)
    with pytest.raises(ValueError):
        build_grid((1.0, 0.0), G0, 1.0, DX)
    with pytest.raises(ValueError):
        build_grid((0.0, 1.0), G0, -1.0, DX)
    with pytest.raises(ValueError):
        build_grid((0.0, 1.0), G0, 1.0, 0.0)


@pytest.mark.parametrize("y,up,down", [
    (2.0, 2, 2),
    (2.1, 3, 2),
    (2.9, 3, 2),
    (-2.5, -2, -3),
    (2.0 + 1e-10, 2, 2),   # within snap tolerance: counts as on the integer
    (2.0 - 1e-10, 2, 2),
    (-3.0 - 1e-10, -3, -3),
])
def test_snap_rounding(y, up, down):
    assert snap_ceil(y) == up
    assert snap_floor(y) == down


# --- MeshConfig and build_mesh ---


def test_mesh_identity_enforced():
    with pytest.raises(ValueError, match="dt must equal"):
        MeshConfig(dx=0.1, dt=0.001, beta=0.2, eps=0.1, x_min=0.0, x_max=1.0,
                   n_nodes=11, mode=CflMode.RELAXED, m_bound=1.0, gamma0=1.0)
    with pytest.raises(ValueError, match="n_nodes"):
        MeshConfig(dx=0.1, dt=0.2 * 0.1 * 0.1, beta=0.2, eps=0.1, x_min=0.0,
                   x_max=1.0, n_nodes=12, mode=CflMode.RELAXED, m_bound=1.0, gamma0=1.0)


def test_nodes_are_exact_index_products():
    nl = Pme(2.0)
    mesh = build_mesh(nl, M, G0, (-2.0, 2.0), 1.0, DX)
    x = mesh.nodes()
    assert x.shape == (mesh.n_nodes,)
    assert x[0] == mesh.x_min
    ks = np.arange(mesh.n_nodes)
    assert np.array_equal(x, (mesh.j0 + ks) * DX)
    assert mesh.node(3) == x[3]
    # the origin lands exactly on a node for this aligned hull
    assert 0.0 in x


def test_build_mesh_defaults_and_modes():
    nl = Pme(2.0)
    mesh = build_mesh(nl, M, G0, (-2.0, 2.0), 1.0, DX)
    assert mesh.mode is CflMode.RELAXED
    assert mesh.certified
    assert mesh.dt == mesh.beta * mesh.dx * mesh.dx
    strict = build_mesh(nl, M, G0, (-2.0, 2.0), 1.0, DX, mode=CflMode.STRICT)
    assert strict.dt < mesh.dt
    assert strict.eps > mesh.eps


def test_overrides_clear_certification():
    nl = Pme(2.0)
    mesh = build_mesh(nl, M, G0, (-2.0, 2.0), 1.0, DX, dt_override=1e-5)
    assert not mesh.certified
    assert mesh.dt == pytest.approx(1e-5, rel=1e-12)
    mesh = build_mesh(nl, M, G0, (-2.0, 2.0), 1.0, DX, eps_override=0.5)
    assert not mesh.certified
    assert mesh.eps == 0.5


def test_implicit_mesh_dt_linear_in_dx():
    nl = Pme(2.0)
    mesh = build_mesh(nl, M, G0, (-2.0, 2.0), 1.0, DX, stepper="implicit", beta_impl=0.1)
    assert mesh.dt == pytest.approx(0.1 * DX, rel=1e-12)
    assert mesh.certified  # implicit dt is a policy choice, not an override
    # default beta_impl scales with 1/gamma0
    default = build_mesh(nl, M, G0, (-2.0, 2.0), 1.0, DX, stepper="implicit")
    assert default.dt == pytest.approx((0.1 / G0) * DX, rel=1e-12)


def test_build_mesh_rejects_unknown_stepper():
    with pytest.raises(ValueError, match="stepper"):
        build_mesh(Pme(2.0), M, G0, (-2.0, 2.0), 1.0, DX, stepper="rk4")
