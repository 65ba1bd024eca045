"""Error measurement against exact profiles and refinement-rate fitting.

For a single patch the reference is its Barenblatt profile; for two patches it is
the pointwise max of the two continued profiles, which is the exact solution up to
the filling time (norms are only taken up to T_star_h, so the reference is used at
most O(T_star_h - T_star) past its validity, where both profiles nearly vanish at
the filling point).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import barenblatt as bb
from .runner import RunResult

MIN_CADENCE = 20.0  # snapshots per unit time required of convergence runs


class SinglePatchOracle:
    def __init__(self, p: bb.BarenblattParams):
        self.p = p

    def v(self, x, t):
        return bb.value(self.p, x, t)

    def zetas(self, t):
        return bb.interfaces(self.p, t)

    def filling(self):
        return None


class TwoPatchOracle:
    def __init__(self, left: bb.BarenblattParams, right: bb.BarenblattParams):
        if left.x0 > right.x0:
            left, right = right, left
        self.left = left
        self.right = right

    def v(self, x, t):
        return np.maximum(bb.value(self.left, x, t), bb.value(self.right, x, t))

    def zetas(self, t):
        return bb.interfaces(self.left, t)[0], bb.interfaces(self.right, t)[1]

    def filling(self):
        return bb.exact_filling(self.left, self.right)


def oracle_for(result: RunResult):
    """Build the exact reference from the run's own Barenblatt data, if it has any."""
    if result.nl_name != "pme":
        raise ValueError(f"no exact reference for nonlinearity {result.nl_name!r}")
    ps = [s.barenblatt for s in result.specs]
    if any(p is None for p in ps):
        raise ValueError("run has no exact reference (non-Barenblatt initial data)")
    if result.problem == "single_patch":
        return SinglePatchOracle(ps[0])
    return TwoPatchOracle(ps[0], ps[1])


@dataclass(frozen=True)
class ErrorRecord:
    dx: float
    E_v: float
    E_zeta: float
    E_x: float | None = None
    E_t: float | None = None

    def metric(self, name: str) -> float | None:
        return getattr(self, name)


def measure_errors(result: RunResult, oracle=None, t_max: float | None = None) -> ErrorRecord:
    """Sup-norm errors over nodes x snapshot times (E_v) and over the interface trace
    (E_zeta), both restricted to t <= T_star_h when the run filled a hole (and to
    t <= t_max if given); plus filling-event errors for two-patch runs."""
    if oracle is None:
        oracle = oracle_for(result)
    if result.aborted is not None:
        raise ValueError(f"run aborted, errors are meaningless: {result.aborted}")
    cutoff = math.inf if t_max is None else t_max
    if result.T_star_h is not None:
        cutoff = min(cutoff, result.T_star_h)

    x = result.nodes()
    E_v = 0.0
    used = 0
    for t, v in result.snapshots:
        if t > cutoff + 1e-12:
            continue
        E_v = max(E_v, float(np.abs(v - oracle.v(x, t)).max()))
        used += 1
    if used == 0:
        raise ValueError("no snapshots at or before the cutoff; record some")

    tr = result.trace
    mask = tr["t"] <= cutoff + 1e-12
    zl_ex, zr_ex = oracle.zetas(tr["t"][mask])
    E_zeta = float(
        max(
            np.abs(tr["zeta_l"][mask] - zl_ex).max(),
            np.abs(tr["zeta_r"][mask] - zr_ex).max(),
        )
    )

    E_x = E_t = None
    fill = oracle.filling()
    if fill is not None and result.T_star_h is not None:
        T_star, x_star = fill
        E_t = abs(result.T_star_h - T_star)
        E_x = abs(result.x_star_h - x_star)
    return ErrorRecord(dx=result.mesh.dx, E_v=E_v, E_zeta=E_zeta, E_x=E_x, E_t=E_t)


@dataclass(frozen=True)
class RateFit:
    metric: str
    alpha: float  # slope of log E against log dx
    intercept: float
    n_points: int


def fit_rate(dxs: Sequence[float], errs: Sequence[float], metric: str = "E") -> RateFit:
    """Least-squares slope of log(err) vs log(dx); needs >= 3 positive samples."""
    dxs = np.asarray(dxs, dtype=float)
    errs = np.asarray(errs, dtype=float)
    if dxs.size < 3:
        raise ValueError("need at least 3 mesh levels for a rate")
    if np.any(dxs <= 0.0) or np.any(errs <= 0.0):
        raise ValueError("rates need positive dx and positive errors")
    slope, intercept = np.polyfit(np.log(dxs), np.log(errs), 1)
    return RateFit(metric=metric, alpha=float(slope), intercept=float(intercept), n_points=int(dxs.size))


def fit_rates(records: Sequence[ErrorRecord], metrics: Sequence[str] = ("E_v", "E_zeta", "E_x", "E_t")) -> dict[str, RateFit]:
    out = {}
    for name in metrics:
        vals = [(r.dx, r.metric(name)) for r in records if r.metric(name) is not None]
        if len(vals) >= 3:
            out[name] = fit_rate([d for d, _ in vals], [e for _, e in vals], metric=name)
    return out


def refinement_series(
    make_run: Callable[[float], RunResult],
    dx_list: Sequence[float],
    oracle=None,
    t_max: float | None = None,
) -> tuple[list[ErrorRecord], dict[str, RateFit]]:
    """Run the same problem at each dx and fit rates. Runs share no state, so the
    records follow the order of dx_list; at least 3 pairwise-distinct positive
    entries are required."""
    dxs = [float(d) for d in dx_list]
    if len(dxs) < 3:
        raise ValueError("need at least 3 mesh levels")
    if len(set(dxs)) != len(dxs) or any(d <= 0.0 for d in dxs):
        raise ValueError("mesh levels must be distinct and positive")
    records = [measure_errors(make_run(d), oracle=oracle, t_max=t_max) for d in dxs]
    return records, fit_rates(records)
