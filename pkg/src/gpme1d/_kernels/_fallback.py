"""NumPy reference kernels. Formula trees match _core.pyx term for term so the two
backends agree bitwise on the explicit path (the extension is built with FP
contraction off)."""

import numpy as np
from scipy.linalg import solve_banded


def explicit_interior(v, sig, kl, kr, dt, dx, eps):
    """New values at k in [kl, kr]:

    v_k + dt ( (sigma_k + eps) (v_{k-1} - 2 v_k + v_{k+1}) / dx^2
               + ((v_{k+1} - v_{k-1}) / (2 dx))^2 ).
    """
    dx2 = dx * dx
    vk = v[kl : kr + 1]
    vm = v[kl - 1 : kr]
    vp = v[kl + 1 : kr + 2]
    lap = (vm - 2.0 * vk + vp) / dx2
    grad = (vp - vm) / (2.0 * dx)
    return vk + dt * ((sig + eps) * lap + grad * grad)


def implicit_interior(v, sig, kl, kr, dt, dx, eps):
    """Solve, for k in [kl, kr] with step-n boundary values at kl-1 and kr+1:

    (1 + 2 lam_k) w_k - lam_k w_{k-1} - lam_k w_{k+1}
        = v_k + dt eps (v_{k-1} - 2 v_k + v_{k+1}) / dx^2
              + dt ((v_{k+1} - v_{k-1}) / (2 dx))^2,     lam_k = dt sigma_k / dx^2.

    The matrix is strictly diagonally dominant for sigma >= 0.
    """
    dx2 = dx * dx
    vk = v[kl : kr + 1]
    vm = v[kl - 1 : kr]
    vp = v[kl + 1 : kr + 2]
    lam = dt * sig / dx2
    rhs = vk + dt * (eps * ((vm - 2.0 * vk + vp) / dx2)) + dt * ((vp - vm) / (2.0 * dx)) ** 2
    rhs[0] += lam[0] * v[kl - 1]
    rhs[-1] += lam[-1] * v[kr + 1]
    n = kr - kl + 1
    ab = np.zeros((3, n))
    ab[0, 1:] = -lam[:-1]  # superdiagonal
    ab[1, :] = 1.0 + 2.0 * lam
    ab[2, :-1] = -lam[1:]  # subdiagonal
    return solve_banded((1, 1), ab, rhs)


def state_stats(v, dx):
    """(min v, max v, max |one-sided slope|, min second difference / dx^2) over the grid."""
    d = np.diff(v)
    lap = (v[:-2] - 2.0 * v[1:-1] + v[2:]) / (dx * dx)
    return float(v.min()), float(v.max()), float(np.abs(d).max() / dx), float(lap.min())
