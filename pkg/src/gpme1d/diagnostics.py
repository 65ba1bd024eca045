"""Run diagnostics: the provable invariants of the explicit scheme as checks.

Per-state checks (bounds, Lipschitz, semiconvexity) consume a PatchState plus the
mesh that certifies it; trace checks consume the per-step interface history. Each
check returns a DiagnosticReport carrying its worst margin (>= 0 means pass by that
much) and a witness of where the worst case occurred.

The semiconvexity floor z(t) solves z' = Lambda z + c z^2, z(0+) = -inf, with
Lambda = gamma0^2 S2 and c = 2 + s1:

    z(t) = -Lambda / (c (1 - exp(-Lambda t)))   (Lambda > 0)
    z(t) = -1 / (c t)                           (Lambda = 0)

That closed form is not taken on faith: ab_ode_residual verifies it against the ODE
in arbitrary precision (float64 cannot even represent the residual once
Lambda*t >~ 30, so mpmath does the differencing).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .mesh import MeshConfig
from .nonlinearity import StructuralBounds
from .patch import PatchState

AB_SLACK = 1e-8
W_SLACK = 1e-12
SPEED_SLACK = 1e-12
ENVELOPE_SLACK = 1e-9
HOLDER_GROWTH = 1.25


def ab_lower_bound(lam: float, c: float, t):
    """Semiconvexity floor z(t); vectorized in t. Requires t > 0, c > 0, lam >= 0."""
    if c <= 0.0:
        raise ValueError(f"need c > 0, got {c}")
    if lam < 0.0:
        raise ValueError(f"need lam >= 0, got {lam}")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0.0):
        raise ValueError("need t > 0")
    if lam == 0.0:
        out = -1.0 / (c * t_arr)
    else:
        # expm1 keeps small lam*t accurate: z = lam / (c * (e^{-lam t} - 1))
        out = lam / (c * np.expm1(-lam * t_arr))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class AbBound:
    lam: float
    c: float

    @classmethod
    def from_problem(cls, bounds: StructuralBounds, gamma0: float) -> "AbBound":
        return cls(lam=gamma0 * gamma0 * bounds.S2, c=2.0 + bounds.s1)

    def __call__(self, t):
        return ab_lower_bound(self.lam, self.c, t)


def ab_ode_residual(lam: float, c: float, t: float, rel_step: float = 1e-8) -> float:
    """Relative residual |z'(t) - F(z(t))| / |F(z(t))|, F(z) = lam z + c z^2, with z'
    by central differences. Evaluated with mpmath at a precision that grows with
    lam*t so the exponentially small residual scale stays representable."""
    if t <= 0.0 or c <= 0.0 or lam < 0.0:
        raise ValueError("need t > 0, c > 0, lam >= 0")
    extra = 0 if lam == 0.0 else int(lam * t / math.log(10.0)) + 2
    with mp.workdps(60 + extra):
        lam_, c_, t_ = mp.mpf(lam), mp.mpf(c), mp.mpf(t)

        def z(s):
            if lam == 0.0:
                return -1 / (c_ * s)
            return -lam_ / (c_ * (1 - mp.e ** (-lam_ * s)))

        h = t_ * mp.mpf(rel_step)
        dz = (z(t_ + h) - z(t_ - h)) / (2 * h)
        zt = z(t_)
        F = lam_ * zt + c_ * zt * zt
        return float(abs(dz - F) / abs(F))


@dataclass(frozen=True)
class DiagnosticReport:
    check: str
    passed: bool
    worst_margin: float
    witness: tuple | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "witness": list(self.witness) if self.witness is not None else None,
            "detail": self.detail,
        }


def check_linf_lipschitz(state: PatchState, mesh: MeshConfig) -> DiagnosticReport:
    """0 <= v <= M and |one-sided slopes| <= gamma0 + 1e-12."""
    v = state.v
    w = np.diff(v) / mesh.dx
    m_lo = float(v.min())
    m_hi = float(mesh.m_bound - v.max())
    m_w = float(mesh.gamma0 + W_SLACK - np.abs(w).max())
    worst = min(m_lo, m_hi, m_w)
    if worst == m_lo:
        witness = (int(np.argmin(v)), state.n)
    elif worst == m_hi:
        witness = (int(np.argmax(v)), state.n)
    else:
        witness = (int(np.argmax(np.abs(w))), state.n)
    return DiagnosticReport(
        check="linf_lipschitz", passed=worst >= 0.0, worst_margin=worst, witness=witness,
        detail=f"min_v={m_lo:.3e} M-max_v={m_hi:.3e} slope_margin={m_w:.3e}",
    )


def check_ab(state: PatchState, mesh: MeshConfig, bound: AbBound, t: float | None = None) -> DiagnosticReport:
    """Second differences above the semiconvexity floor: Z_k >= z(t) - 1e-8.

    `t` defaults to state.t; a merged run passes its restarted age here.
    """
    t_eval = state.t if t is None else t
    if t_eval <= 0.0:
        raise ValueError("semiconvexity floor needs t > 0")
    v = state.v
    Z = (v[:-2] - 2.0 * v[1:-1] + v[2:]) / (mesh.dx * mesh.dx)
    floor = bound(t_eval)
    k_rel = int(np.argmin(Z))
    worst = float(Z[k_rel] - (floor - AB_SLACK))
    return DiagnosticReport(
        check="ab_semiconvexity", passed=worst >= 0.0, worst_margin=worst,
        witness=(k_rel + 1, state.n),
        detail=f"min_Z={float(Z[k_rel]):.6e} floor={floor:.6e} t={t_eval:.6e}",
    )


def check_interface_speed(
    times: np.ndarray, zeta_l: np.ndarray, zeta_r: np.ndarray, gamma0: float
) -> DiagnosticReport:
    """Per-step interface speeds <= gamma0, monotone interfaces, and the reachability
    envelope |zeta(t) - zeta(0)| <= gamma0 t."""
    times = np.asarray(times, dtype=float)
    zl = np.asarray(zeta_l, dtype=float)
    zr = np.asarray(zeta_r, dtype=float)
    if times.shape != zl.shape or times.shape != zr.shape or times.size < 2:
        raise ValueError("need equal-length traces with at least two samples")
    dt = np.diff(times)
    if np.any(dt <= 0.0):
        raise ValueError("times must be strictly increasing")
    dzl = np.diff(zl)
    dzr = np.diff(zr)
    speed = np.maximum(np.abs(dzl), np.abs(dzr)) / dt
    m_speed = float(gamma0 + SPEED_SLACK - speed.max())
    m_monot = float(min(-dzl.max(), dzr.min()))  # zl nonincreasing, zr nondecreasing
    env = gamma0 * (times - times[0]) + ENVELOPE_SLACK
    m_env = float(min((env - (zl[0] - zl)).min(), (env - (zr - zr[0])).min()))
    worst = min(m_speed, m_monot, m_env)
    step = int(np.argmax(speed)) + 1
    return DiagnosticReport(
        check="interface_speed", passed=worst >= 0.0, worst_margin=worst, witness=(step,),
        detail=f"speed_margin={m_speed:.3e} monotone_margin={m_monot:.3e} envelope_margin={m_env:.3e}",
    )


def holder_quotient(times: np.ndarray, series: np.ndarray) -> float:
    """H = max over nodes and time pairs of |v(x, t1) - v(x, t2)| / sqrt(|t1 - t2|).

    `series` has shape (n_times, n_nodes).
    """
    times = np.asarray(times, dtype=float)
    series = np.asarray(series, dtype=float)
    if series.shape[0] != times.size or times.size < 2:
        raise ValueError("need one row per time, at least two times")
    H = 0.0
    for i in range(times.size - 1):
        dv = np.abs(series[i + 1 :] - series[i]).max(axis=1)
        dt = np.sqrt(times[i + 1 :] - times[i])
        H = max(H, float((dv / dt).max()))
    return H


def check_holder(h_by_refinement: list[float]) -> DiagnosticReport:
    """Refinement stability of the 1/2-Hoelder-in-time statistic: each refinement may
    grow H by less than 25%. (Boundedness itself is not falsifiable from one mesh.)"""
    if len(h_by_refinement) < 2:
        raise ValueError("need H from at least two refinements")
    worst = math.inf
    witness = None
    for i in range(len(h_by_refinement) - 1):
        coarse, fine = h_by_refinement[i], h_by_refinement[i + 1]
        margin = HOLDER_GROWTH * coarse - fine
        if margin < worst:
            worst, witness = margin, (i,)
    return DiagnosticReport(
        check="holder_refinement", passed=worst >= 0.0, worst_margin=float(worst), witness=witness,
        detail=f"H by refinement: {[f'{h:.6g}' for h in h_by_refinement]}",
    )
