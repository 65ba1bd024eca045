"""One-patch front-tracking stepper.

A patch is a compactly supported pressure profile v >= 0 with tracked support
endpoints (interfaces) zeta_l <= zeta_r. Nodes strictly between the interfaces and
the nearest scheme node form boundary layers of width s in [dx, 2dx]; scheme nodes
[K_l, K_r] are updated by the finite-difference stencil, interfaces move with the
one-sided slope law d(zeta)/dt = -+ v_K / s, and layer nodes are refilled by linear
interpolation between the new interface (value 0) and the new v_K. Everything
outside the interfaces is identically zero.

Index bookkeeping uses global node indices j (node position = j*dx exactly) so that
patches sharing a mesh agree bitwise on node coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels as kern
from .mesh import MeshConfig, snap_ceil, snap_floor
from .nonlinearity import Nonlinearity

# fp slack for the always-on breach checks; invariants themselves are exact claims.
NEG_TOL = 1e-13
MAX_TOL = 1e-12
W_TOL = 1e-12


class InvariantViolation(RuntimeError):
    """A certified run produced a state outside its proven invariants."""

    def __init__(self, check: str, value: float, bound: float, step: int, node: int | None = None):
        self.check = check
        self.value = value
        self.bound = bound
        self.step = step
        self.node = node
        where = f", node {node}" if node is not None else ""
        super().__init__(f"{check}: value {value!r} vs bound {bound!r} at step {step}{where}")


@dataclass(frozen=True)
class PatchState:
    """v on the full grid, interfaces, step counter n, time t = n*dt."""

    v: np.ndarray
    zeta_l: float
    zeta_r: float
    n: int
    t: float


@dataclass(frozen=True)
class LayerInfo:
    """Scheme range [K_l, K_r] (array indices) and layer widths s_l, s_r."""

    K_l: int
    K_r: int
    s_l: float
    s_r: float


@dataclass(frozen=True)
class StepReport:
    state: PatchState
    dzeta_l: float
    dzeta_r: float
    max_abs_w: float
    min_Z: float
    v_min: float
    v_max: float


def init_patch(v0: Callable, support: tuple[float, float], mesh: MeshConfig) -> PatchState:
    """Sample v0 on the nodes inside [a, b]; zero outside; interfaces at a, b.

    v0 must be >= 0 on [a, b]. The support must span at least 4 dx (otherwise there
    is no scheme node between the layers) and must sit inside the grid with two
    cells to spare.
    """
    a, b = support
    if not (a < b):
        raise ValueError(f"need a < b, got [{a}, {b}]")
    if b - a < 4.0 * mesh.dx:
        raise ValueError(f"support width {b - a} is narrower than 4*dx = {4.0 * mesh.dx}")
    if a - mesh.x_min < 2.0 * mesh.dx or mesh.x_max - b < 2.0 * mesh.dx:
        raise ValueError("support too close to the grid boundary")
    x = mesh.nodes()
    inside = (x >= a) & (x <= b)
    v = np.zeros(mesh.n_nodes)
    vals = np.asarray(v0(x[inside]), dtype=float)
    if np.any(vals < 0.0):
        raise ValueError("initial data must be nonnegative on its support")
    v[inside] = vals
    return PatchState(v=v, zeta_l=float(a), zeta_r=float(b), n=0, t=0.0)


def locate_layers(state: PatchState, mesh: MeshConfig) -> LayerInfo:
    """Find the scheme range and layer widths for the current interfaces.

    K_l is the smallest k with x_{k-1} >= zeta_l, K_r the largest with
    x_{k+1} <= zeta_r; then s_l = x_{K_l} - zeta_l and s_r = zeta_r - x_{K_r} lie in
    [dx, 2dx). Signals collapse when the scheme range is empty and guards the two
    extra cells the layer writes may touch.
    """
    dx = mesh.dx
    jl = snap_ceil(state.zeta_l / dx)  # global index of first node >= zeta_l
    jr = snap_floor(state.zeta_r / dx)  # global index of last node <= zeta_r
    K_l = jl + 1 - mesh.j0
    K_r = jr - 1 - mesh.j0
    if K_l > K_r:
        raise InvariantViolation("support collapsed", state.zeta_r - state.zeta_l, 2.0 * dx, state.n)
    if K_l - 2 < 0 or K_r + 2 > mesh.n_nodes - 1:
        raise InvariantViolation("interface reached grid boundary", state.zeta_l, mesh.x_min, state.n)
    s_l = (jl + 1) * dx - state.zeta_l
    s_r = state.zeta_r - (jr - 1) * dx
    return LayerInfo(K_l=K_l, K_r=K_r, s_l=s_l, s_r=s_r)


def advance_interfaces(state: PatchState, lay: LayerInfo, mesh: MeshConfig) -> tuple[float, float, float, float]:
    """New interface positions under d(zeta_l)/dt = -v_{K_l}/s_l, d(zeta_r)/dt = +v_{K_r}/s_r.

    Returns (zeta_l', zeta_r', dzeta_l, dzeta_r). The left interface never moves
    right, the right never left; speeds are bounded by v_K/s <= gamma0 as long as
    the Lipschitz bound holds.
    """
    dzl = -mesh.dt * state.v[lay.K_l] / lay.s_l
    dzr = mesh.dt * state.v[lay.K_r] / lay.s_r
    return state.zeta_l + dzl, state.zeta_r + dzr, dzl, dzr


def discrete_derivatives(state: PatchState, mesh: MeshConfig, k: int) -> tuple[float, float, float]:
    """(downwind slope w_k, centered slope wbar_k, second difference Z_k) at node k."""
    if k - 1 < 0 or k + 1 > mesh.n_nodes - 1:
        raise IndexError(f"node {k} has no two-sided stencil on a {mesh.n_nodes}-node grid")
    v = state.v
    dx = mesh.dx
    w = (v[k] - v[k - 1]) / dx
    wbar = (v[k + 1] - v[k - 1]) / (2.0 * dx)
    Z = (v[k - 1] - 2.0 * v[k] + v[k + 1]) / (dx * dx)
    return w, wbar, Z


def _assemble(
    interior: np.ndarray,
    lay: LayerInfo,
    zl1: float,
    zr1: float,
    mesh: MeshConfig,
) -> np.ndarray:
    """Write the next state: scheme values on [K_l, K_r], linear ramps on the layers,
    zero outside [zeta_l', zeta_r']."""
    dx = mesh.dx
    j0 = mesh.j0
    vn = np.zeros(mesh.n_nodes)
    vn[lay.K_l : lay.K_r + 1] = interior

    # Left layer: nodes x_j in [zeta_l', x_{K_l - 1}] get v_{K_l}' * (x_j - zeta_l')/(x_{K_l} - zeta_l').
    # Plain ceil here (no snap): a node missed or gained by one ulp of zeta_l'/dx
    # carries a value within one ulp of zero either way.
    jl_new = math.ceil(zl1 / dx)
    jl_hi = lay.K_l - 1 + j0  # global index of x_{K_l - 1}
    if jl_new <= jl_hi:
        js = np.arange(jl_new, jl_hi + 1, dtype=float)
        # distance clamped at 0: the ramp is nonnegative by construction
        vn[jl_new - j0 : jl_hi + 1 - j0] = interior[0] * (
            np.maximum(js * dx - zl1, 0.0) / ((jl_hi + 1) * dx - zl1)
        )
    # Right layer, mirrored.
    jr_new = math.floor(zr1 / dx)
    jr_lo = lay.K_r + 1 + j0
    if jr_lo <= jr_new:
        js = np.arange(jr_lo, jr_new + 1, dtype=float)
        vn[jr_lo - j0 : jr_new + 1 - j0] = interior[-1] * (
            np.maximum(zr1 - js * dx, 0.0) / (zr1 - (jr_lo - 1) * dx)
        )
    return vn


def _step(state: PatchState, mesh: MeshConfig, nl: Nonlinearity, interior_fn, enforce: str) -> StepReport:
    lay = locate_layers(state, mesh)
    v = state.v
    zl1, zr1, dzl, dzr = advance_interfaces(state, lay, mesh)
    # non-finite layer values make zl1/zr1 non-finite and would dodge the
    # boundary comparison below (NaN compares false)
    if not (math.isfinite(zl1) and math.isfinite(zr1)):
        raise InvariantViolation("non-finite pressure", zl1, mesh.x_min, state.n)
    # uncertified (overridden) time steps can fling an interface arbitrarily far;
    # refuse before the layer writes would leave the array
    if zl1 - mesh.x_min < mesh.dx or mesh.x_max - zr1 < mesh.dx:
        raise InvariantViolation("interface reached grid boundary", zl1, mesh.x_min, state.n)
    sig = np.ascontiguousarray(nl.sigma(v[lay.K_l : lay.K_r + 1]), dtype=float)
    interior = interior_fn(v, sig, lay.K_l, lay.K_r, mesh.dt, mesh.dx, mesh.eps)
    vn = _assemble(interior, lay, zl1, zr1, mesh)
    v_min, v_max, max_w, min_Z = kern.state_stats(vn, mesh.dx)
    n1 = state.n + 1
    report = StepReport(
        state=PatchState(v=vn, zeta_l=zl1, zeta_r=zr1, n=n1, t=n1 * mesh.dt),
        dzeta_l=dzl,
        dzeta_r=dzr,
        max_abs_w=max_w,
        min_Z=min_Z,
        v_min=v_min,
        v_max=v_max,
    )
    _enforce(report, mesh, enforce)
    return report


def _enforce(rep: StepReport, mesh: MeshConfig, enforce: str):
    M = mesh.m_bound
    scale = max(1.0, M)
    if math.isnan(rep.v_min) or math.isnan(rep.v_max):
        raise InvariantViolation("non-finite pressure", rep.v_max, M, rep.state.n)
    if enforce == "full":
        if rep.v_min < -NEG_TOL * scale:
            raise InvariantViolation("negative pressure", rep.v_min, 0.0, rep.state.n, _argmin(rep.state.v))
        if rep.v_max > M + MAX_TOL * scale:
            raise InvariantViolation("pressure above M", rep.v_max, M, rep.state.n, _argmax(rep.state.v))
        if rep.max_abs_w > mesh.gamma0 + W_TOL:
            raise InvariantViolation("Lipschitz bound", rep.max_abs_w, mesh.gamma0, rep.state.n)
    else:
        # implicit stepper: the explicit-scheme lemmas are not proved for it, so only
        # catch explosions here; full checks run report-only upstream.
        if rep.v_min < -1e-10 * scale or rep.v_max > 2.0 * scale:
            raise InvariantViolation("implicit step exploded", rep.v_max, M, rep.state.n)


def _argmin(v: np.ndarray) -> int:
    return int(np.argmin(v))


def _argmax(v: np.ndarray) -> int:
    return int(np.argmax(v))


def step_explicit(state: PatchState, mesh: MeshConfig, nl: Nonlinearity) -> StepReport:
    """One explicit step:

    v_k' = v_k + dt ( (sigma(v_k) + eps) Z_k + wbar_k^2 )  on [K_l, K_r],

    then interface motion and layer interpolation. Under the certified CFL the new
    value is the convex combination (1 - 2a) v_k + (a - b) v_{k-1} + (a + b) v_{k+1}
    with a = beta (sigma_k + eps), b = beta dx (w_{k+1} + w_k)/4, which is what the
    breach checks enforce (0 <= v <= M, |w| <= gamma0).
    """
    return _step(state, mesh, nl, kern.explicit_interior, "full")


def step_implicit(state: PatchState, mesh: MeshConfig, nl: Nonlinearity) -> StepReport:
    """One semi-implicit step (diffusion term implicit in v', viscosity and gradient
    explicit); interfaces and layers exactly as in step_explicit. Stable for
    dt = O(dx)."""
    return _step(state, mesh, nl, kern.implicit_interior, "sanity")
