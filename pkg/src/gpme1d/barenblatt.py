"""Barenblatt pressure profiles: the exact-solution oracle.

A profile is the self-similar source solution of v_t = (m-1) v v_xx + |v_x|^2 in
pressure form,

    V(x, t) = (t0 + t)^{-1} ( C (t0 + t)^{2/(m+1)} - |x - x0|^2 / (2 (m+1)) )_+ ,

supported on |x - x0| <= sqrt(2 (m+1) C) (t0 + t)^{1/(m+1)}. Runs against the pme
nonlinearity are measured against these profiles; the crossing time of two profiles
gives the exact hole-filling time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq


@dataclass(frozen=True)
class BarenblattParams:
    m: float
    C: float
    x0: float
    t0: float

    def __post_init__(self):
        if self.m <= 1.0:
            raise ValueError(f"need m > 1, got {self.m}")
        if self.C <= 0.0:
            raise ValueError(f"need C > 0, got {self.C}")
        if self.t0 <= 0.0:
            raise ValueError(f"need t0 > 0, got {self.t0}")


def value(p: BarenblattParams, x, t):
    """Pressure V(x, t); vectorized in x (and t if broadcastable)."""
    tau = p.t0 + np.asarray(t, dtype=float)
    if np.any(tau <= 0.0):
        raise ValueError("need t0 + t > 0")
    x = np.asarray(x, dtype=float)
    core = p.C * tau ** (2.0 / (p.m + 1.0)) - (x - p.x0) ** 2 / (2.0 * (p.m + 1.0))
    out = np.maximum(core, 0.0) / tau
    return out if out.ndim else float(out)


def interfaces(p: BarenblattParams, t) -> tuple:
    """Support endpoints (zeta_l, zeta_r) = x0 -/+ sqrt(2 (m+1) C) (t0+t)^{1/(m+1)}."""
    tau = p.t0 + np.asarray(t, dtype=float)
    if np.any(tau <= 0.0):
        raise ValueError("need t0 + t > 0")
    r = math.sqrt(2.0 * (p.m + 1.0) * p.C) * tau ** (1.0 / (p.m + 1.0))
    if np.ndim(t):
        return p.x0 - r, p.x0 + r
    return float(p.x0 - r), float(p.x0 + r)


def lipschitz_bound(p: BarenblattParams, t: float) -> float:
    """sup_x |V_x(x, t)|, attained at the interfaces."""
    tau = p.t0 + t
    if tau <= 0.0:
        raise ValueError("need t0 + t > 0")
    return math.sqrt(2.0 * p.C / (p.m + 1.0)) * tau ** (1.0 / (p.m + 1.0) - 1.0)


def max_value(p: BarenblattParams, t: float = 0.0) -> float:
    """V(x0, t) = C (t0 + t)^{(1-m)/(m+1)}, the sup of the profile."""
    return float(value(p, p.x0, t))


def exact_filling(
    left: BarenblattParams,
    right: BarenblattParams,
    T_max: float = 1e3,
    method: str = "auto",
) -> tuple[float, float]:
    """Time and location at which two disjoint supports first touch.

    For equal m and t0 the crossing time is closed-form:

        T = ((x0_right - x0_left) / (R_left + R_right))^{m+1} - t0,
        R = sqrt(2 (m+1) C).

    Otherwise ("auto") the decreasing gap g(t) = zeta_l_right(t) - zeta_r_left(t)
    is bracketed on [0, T_max] and solved by a root finder; `method` can force
    either route ("closed" / "root"). No crossing by T_max is an error.
    """
    if left.x0 > right.x0:
        left, right = right, left
    gap0 = interfaces(right, 0.0)[0] - interfaces(left, 0.0)[1]
    if gap0 <= 0.0:
        raise ValueError(f"supports must start disjoint, gap={gap0}")

    matched = left.m == right.m and left.t0 == right.t0
    if method == "closed" or (method == "auto" and matched):
        if not matched:
            raise ValueError("closed form needs matching m and t0")
        m, t0 = left.m, left.t0
        R_l = math.sqrt(2.0 * (m + 1.0) * left.C)
        R_r = math.sqrt(2.0 * (m + 1.0) * right.C)
        T = ((right.x0 - left.x0) / (R_l + R_r)) ** (m + 1.0) - t0
        if T > T_max:
            raise ValueError(f"no crossing by T_max={T_max}")
        return T, float(interfaces(left, T)[1])
    if method not in ("auto", "root"):
        raise ValueError(f"unknown method {method!r}")

    def gap(t):
        return interfaces(right, t)[0] - interfaces(left, t)[1]

    if gap(T_max) > 0.0:
        raise ValueError(f"no crossing by T_max={T_max}")
    T = brentq(gap, 0.0, T_max, xtol=1e-14, rtol=8.9e-16)
    return float(T), float(interfaces(left, T)[1])
