"""Grid construction and time-step certification.

Two admissibility regimes are provided for the explicit stepper. The strict one
carries the constants under which every discrete estimate (maximum principle,
Lipschitz bound, interface speed, semiconvexity) is proved; the relaxed one keeps
only the constants needed for the maximum principle and Lipschitz bound and is the
regime used for production runs. In both, the artificial viscosity eps sits at the
smallest admissible value and dt = beta dx^2 at the largest.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .nonlinearity import Nonlinearity, StructuralBounds

# Interfaces within this many index units of a node count as on the node.
INDEX_SNAP = 1e-9


class CflMode(enum.Enum):
    STRICT = "strict"
    RELAXED = "relaxed"


def _beta_eps_strict(bounds: StructuralBounds, gamma0: float, dx: float) -> tuple[float, float]:
    if gamma0 == 0.0:
        eps = dx
    else:
        eps = gamma0 * dx * (27.0 + 9.0 * bounds.s1 + 3.0 * bounds.S1 + dx * bounds.S2 / 4.0)
    beta = 1.0 / (
        2.0 * (bounds.sigma_max + eps)
        + gamma0 * dx * (4.0 + 3.0 * bounds.S1)
        + gamma0 * gamma0 * dx * dx * bounds.S2 / 2.0
    )
    return beta, eps


def _beta_eps_relaxed(bounds: StructuralBounds, gamma0: float, dx: float) -> tuple[float, float]:
    eps = dx if gamma0 == 0.0 else gamma0 * dx * (1.0 + bounds.S1 / 2.0)
    beta = 1.0 / (2.0 * (bounds.sigma_max + eps))
    return beta, eps


def cfl_strict(bounds: StructuralBounds, gamma0: float, M: float, dx: float) -> tuple[float, float]:
    """Largest dt and smallest eps admissible under the full-estimate regime.

    eps  = gamma0 dx (27 + 9 s1 + 3 S1 + dx S2 / 4)
    beta = 1 / (2 (sigma(M) + eps) + gamma0 dx (4 + 3 S1) + gamma0^2 dx^2 S2 / 2)
    dt   = beta dx^2

    gamma0 = 0 makes the viscosity vanish; eps = dx is substituted so the scheme
    stays parabolic.
    """
    _check_cfl_args(gamma0, M, dx)
    beta, eps = _beta_eps_strict(bounds, gamma0, dx)
    return beta * dx * dx, eps


def cfl_relaxed(bounds: StructuralBounds, gamma0: float, M: float, dx: float) -> tuple[float, float]:
    """Largest dt and smallest eps under the maximum-principle-only regime.

    eps = gamma0 dx (1 + S1 / 2), beta = 1 / (2 (sigma(M) + eps)), dt = beta dx^2.
    """
    _check_cfl_args(gamma0, M, dx)
    beta, eps = _beta_eps_relaxed(bounds, gamma0, dx)
    return beta * dx * dx, eps


def _check_cfl_args(gamma0: float, M: float, dx: float):
    if dx <= 0.0:
        raise ValueError(f"need dx > 0, got {dx}")
    if gamma0 < 0.0:
        raise ValueError(f"need gamma0 >= 0, got {gamma0}")
    if M < 0.0:
        raise ValueError(f"need M >= 0, got {M}")


def snap_ceil(y: float) -> int:
    """Smallest integer >= y, snapping values within INDEX_SNAP of an integer."""
    r = round(y)
    if abs(y - r) <= INDEX_SNAP:
        return int(r)
    return int(math.ceil(y))


def snap_floor(y: float) -> int:
    r = round(y)
    if abs(y - r) <= INDEX_SNAP:
        return int(r)
    return int(math.floor(y))


def build_grid(hull: tuple[float, float], gamma0: float, T: float, dx: float) -> tuple[float, float, int]:
    """Uniform grid covering the initial support hull plus the reachable set.

    Interfaces move at speed <= gamma0, so [hull_left - gamma0 T, hull_right + gamma0 T]
    contains the support for all t <= T; two extra cells on each side keep the
    boundary-layer stencils off the grid edge. Endpoints snap outward to integer
    multiples of dx so that every node is exactly j*dx.
    """
    left, right = hull
    if not (left < right):
        raise ValueError(f"need a nonempty hull, got [{left}, {right}]")
    if T < 0.0:
        raise ValueError(f"need T >= 0, got {T}")
    _check_cfl_args(gamma0, 1.0, dx)
    pad = gamma0 * T + 2.0 * dx
    j_min = snap_floor((left - pad) / dx)
    j_max = snap_ceil((right + pad) / dx)
    return j_min * dx, j_max * dx, j_max - j_min + 1


@dataclass(frozen=True)
class MeshConfig:
    """A certified space-time discretization for one run.

    dt = beta dx^2 always holds as an identity. For the explicit stepper beta comes
    from the CFL bound of `mode`; for the implicit stepper dt = beta_impl dx and beta
    is just the stored ratio dt/dx^2. `certified` is False when dt or eps were
    overridden by hand.
    """

    dx: float
    dt: float
    beta: float
    eps: float
    x_min: float
    x_max: float
    n_nodes: int
    mode: CflMode
    m_bound: float
    gamma0: float
    certified: bool = True

    def __post_init__(self):
        if self.dt != self.beta * self.dx * self.dx:
            raise ValueError("dt must equal beta*dx^2 exactly")
        if round((self.x_max - self.x_min) / self.dx) + 1 != self.n_nodes:
            raise ValueError("n_nodes inconsistent with grid extent")

    @property
    def j0(self) -> int:
        """Global index of the first node: x_min = j0 * dx exactly."""
        return round(self.x_min / self.dx)

    def nodes(self) -> np.ndarray:
        # (j0 + k) * dx, not x_min + k*dx: keeps node coordinates exact products.
        return (self.j0 + np.arange(self.n_nodes, dtype=float)) * self.dx

    def node(self, k: int) -> float:
        return (self.j0 + k) * self.dx


def build_mesh(
    nl: Nonlinearity,
    M: float,
    gamma0: float,
    hull: tuple[float, float],
    T: float,
    dx: float,
    mode: CflMode = CflMode.RELAXED,
    stepper: str = "explicit",
    beta_impl: float | None = None,
    dt_override: float | None = None,
    eps_override: float | None = None,
) -> MeshConfig:
    """Assemble grid and certified (dt, eps) for a run over [0, T]."""
    _check_cfl_args(gamma0, M, dx)
    bounds = nl.structural_bounds(M)
    make = _beta_eps_strict if mode is CflMode.STRICT else _beta_eps_relaxed
    beta, eps = make(bounds, gamma0, dx)
    if stepper == "implicit":
        if beta_impl is None:
            beta_impl = 0.1 / gamma0 if gamma0 > 0.0 else 0.1
        beta = beta_impl / dx  # dt = beta_impl * dx
    elif stepper != "explicit":
        raise ValueError(f"unknown stepper {stepper!r}")

    certified = True
    if dt_override is not None:
        beta, certified = float(dt_override) / (dx * dx), False
    if eps_override is not None:
        eps, certified = float(eps_override), False

    x_min, x_max, n_nodes = build_grid(hull, gamma0, T, dx)
    return MeshConfig(
        dx=dx, dt=beta * dx * dx, beta=beta, eps=eps,
        x_min=x_min, x_max=x_max, n_nodes=n_nodes,
        mode=mode, m_bound=M, gamma0=gamma0, certified=certified,
    )
