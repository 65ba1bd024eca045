"""Full-run orchestration: initial data -> mesh -> stepping loop -> trace/snapshots.

The runner owns the policy pieces the stepper should not know about: snapshot
scheduling, per-step margin accounting, and whether a semiconvexity failure aborts
the run (it does under the strict regime with a certified mesh, and is report-only
otherwise, in particular for every implicit run).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels as kern
from . import barenblatt as bb
from .diagnostics import AB_SLACK, AbBound, DiagnosticReport, check_interface_speed, check_linf_lipschitz
from .hole_filling import HoleFillingRun, Phase, init_two_patch, step_run
from .mesh import CflMode, MeshConfig, build_mesh, snap_ceil
from .nonlinearity import Nonlinearity
from .patch import InvariantViolation, PatchState, StepReport, init_patch, step_explicit, step_implicit


@dataclass(frozen=True)
class PatchSpec:
    """Initial data for one patch: profile, support, and its certificates M, gamma0."""

    v0: Callable
    support: tuple[float, float]
    M: float
    gamma0: float
    barenblatt: bb.BarenblattParams | None = None

    @classmethod
    def from_barenblatt(cls, p: bb.BarenblattParams) -> "PatchSpec":
        return cls(
            v0=lambda x: bb.value(p, x, 0.0),
            support=bb.interfaces(p, 0.0),
            M=bb.max_value(p, 0.0),
            gamma0=bb.lipschitz_bound(p, 0.0),
            barenblatt=p,
        )

    @classmethod
    def from_table(cls, x, v, support=None, M=None, gamma0=None) -> "PatchSpec":
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.size < 2:
            raise ValueError("need matching 1-d sample arrays")
        if np.any(np.diff(x) <= 0.0):
            raise ValueError("sample positions must be strictly increasing")
        if np.any(v < 0.0):
            raise ValueError("sampled pressure must be nonnegative")
        if support is None:
            support = (float(x[0]), float(x[-1]))
        if M is None:
            M = float(v.max())
        if gamma0 is None:
            gamma0 = float(np.abs(np.diff(v) / np.diff(x)).max())
        return cls(v0=lambda q: np.interp(q, x, v), support=support, M=M, gamma0=gamma0)


@dataclass
class RunResult:
    mesh: MeshConfig
    problem: str
    nl_name: str
    stepper: str
    snapshots: list[tuple[float, np.ndarray]]
    snapshot_map: dict[float, float]  # requested -> actual step time
    trace: dict[str, np.ndarray]
    T_star_h: float | None
    x_star_h: float | None
    margins: dict[str, float]
    diagnostics: list[DiagnosticReport]
    backend: str
    final: PatchState
    ab_bound: AbBound | None = None
    aborted: str | None = None
    specs: list[PatchSpec] = field(default_factory=list)

    def nodes(self) -> np.ndarray:
        return self.mesh.nodes()

    def all_passed(self) -> bool:
        return self.aborted is None and all(r.passed for r in self.diagnostics)


class _MarginTracker:
    """Worst-case margins over the whole run; >= 0 means the invariant held."""

    def __init__(self, mesh: MeshConfig, ab: AbBound | None):
        self.mesh = mesh
        self.ab = ab
        self.min_v = math.inf
        self.m_minus_max_v = math.inf
        self.w_margin = math.inf
        self.speed_margin = math.inf
        self.monotone_margin = math.inf
        self.ab_margin = math.inf if ab is not None else None

    def absorb(self, rep: StepReport, ab_t: float | None):
        m = self.mesh
        self.min_v = min(self.min_v, rep.v_min)
        self.m_minus_max_v = min(self.m_minus_max_v, m.m_bound - rep.v_max)
        self.w_margin = min(self.w_margin, m.gamma0 + 1e-12 - rep.max_abs_w)
        speed = max(abs(rep.dzeta_l), abs(rep.dzeta_r)) / m.dt
        self.speed_margin = min(self.speed_margin, m.gamma0 + 1e-12 - speed)
        self.monotone_margin = min(self.monotone_margin, -rep.dzeta_l, rep.dzeta_r)
        if self.ab is not None and ab_t is not None and ab_t > 0.0:
            self.ab_margin = min(self.ab_margin, rep.min_Z - (self.ab(ab_t) - AB_SLACK))

    def as_dict(self) -> dict[str, float]:
        out = {
            "min_v": self.min_v,
            "M_minus_max_v": self.m_minus_max_v,
            "lipschitz": self.w_margin,
            "interface_speed": self.speed_margin,
            "interface_monotone": self.monotone_margin,
        }
        if self.ab_margin is not None:
            out["ab_semiconvexity"] = self.ab_margin
        return out


def _snapshot_steps(snapshot_times, dt: float, n_steps: int) -> dict[int, float]:
    """Map step index -> requested time (first step at or past each request)."""
    out: dict[int, float] = {}
    for t_req in sorted(set(float(t) for t in snapshot_times)):
        if t_req < 0.0:
            raise ValueError(f"snapshot time {t_req} < 0")
        n = min(max(snap_ceil(t_req / dt), 0), n_steps)
        out.setdefault(n, t_req)
    return out


def cadence_times(T: float, cadence: float) -> list[float]:
    """Snapshot schedule with `cadence` samples per unit time, endpoints included."""
    if cadence <= 0.0:
        raise ValueError("cadence must be positive")
    k = int(math.floor(T * cadence + 1e-9))
    times = [i / cadence for i in range(k + 1)]
    if times[-1] < T:
        times.append(T)
    return times


def _resolve_ab(ab: str, mesh: MeshConfig, stepper: str) -> str:
    if ab not in ("auto", "fatal", "report", "off"):
        raise ValueError(f"unknown ab mode {ab!r}")
    if ab != "auto":
        return ab
    if stepper == "implicit" or not mesh.certified:
        return "report"
    return "fatal" if mesh.mode is CflMode.STRICT else "report"


def run_single_patch(
    nl: Nonlinearity,
    spec: PatchSpec,
    dx: float,
    T: float,
    mode: CflMode = CflMode.RELAXED,
    stepper: str = "explicit",
    snapshot_times=(),
    beta_impl: float | None = None,
    dt_override: float | None = None,
    eps_override: float | None = None,
    ab: str = "auto",
) -> RunResult:
    mesh = build_mesh(
        nl, spec.M, spec.gamma0, spec.support, T, dx, mode=mode,
        stepper=stepper, beta_impl=beta_impl,
        dt_override=dt_override, eps_override=eps_override,
    )
    state = init_patch(spec.v0, spec.support, mesh)
    step = step_explicit if stepper == "explicit" else step_implicit
    bound = AbBound.from_problem(nl.structural_bounds(spec.M), spec.gamma0)
    ab_mode = _resolve_ab(ab, mesh, stepper)
    tracker = _MarginTracker(mesh, bound if ab_mode != "off" else None)

    n_steps = snap_ceil(T / mesh.dt)
    snap_at = _snapshot_steps(snapshot_times, mesh.dt, n_steps)
    snapshots: list[tuple[float, np.ndarray]] = []
    snapshot_map: dict[float, float] = {}
    if 0 in snap_at:
        snapshots.append((0.0, state.v.copy()))
        snapshot_map[snap_at[0]] = 0.0

    times = [0.0]
    zl_tr = [state.zeta_l]
    zr_tr = [state.zeta_r]
    aborted = None
    try:
        for n in range(1, n_steps + 1):
            rep = step(state, mesh, nl)
            state = rep.state
            tracker.absorb(rep, state.t)
            if ab_mode == "fatal" and tracker.ab_margin is not None and tracker.ab_margin < 0.0:
                raise InvariantViolation("ab_semiconvexity", rep.min_Z, bound(state.t), n)
            times.append(state.t)
            zl_tr.append(state.zeta_l)
            zr_tr.append(state.zeta_r)
            if n in snap_at:
                snapshots.append((state.t, state.v.copy()))
                snapshot_map[snap_at[n]] = state.t
    except InvariantViolation as err:
        aborted = str(err)

    trace = {"t": np.array(times), "zeta_l": np.array(zl_tr), "zeta_r": np.array(zr_tr)}
    diagnostics = [
        check_linf_lipschitz(state, mesh),
        check_interface_speed(trace["t"], trace["zeta_l"], trace["zeta_r"], mesh.gamma0),
    ]
    return RunResult(
        mesh=mesh, problem="single_patch", nl_name=nl.name, stepper=stepper,
        snapshots=snapshots, snapshot_map=snapshot_map, trace=trace,
        T_star_h=None, x_star_h=None, margins=tracker.as_dict(),
        diagnostics=diagnostics, backend=kern.BACKEND, final=state,
        ab_bound=bound, aborted=aborted, specs=[spec],
    )


def run_two_patch(
    nl: Nonlinearity,
    spec_hat: PatchSpec,
    spec_check: PatchSpec,
    dx: float,
    T: float,
    mode: CflMode = CflMode.RELAXED,
    stepper: str = "explicit",
    snapshot_times=(),
    beta_impl: float | None = None,
    dt_override: float | None = None,
    eps_override: float | None = None,
    ab: str = "auto",
) -> RunResult:
    """Two patches on one shared mesh; see hole_filling for the merge rule.

    The mesh is certified for the pointwise max of the two profiles: M and gamma0
    are the maxima of the per-patch certificates, so the shared dt/eps are admissible
    for both patches and for the merged state.
    """
    M = max(spec_hat.M, spec_check.M)
    gamma0 = max(spec_hat.gamma0, spec_check.gamma0)
    hull = (
        min(spec_hat.support[0], spec_check.support[0]),
        max(spec_hat.support[1], spec_check.support[1]),
    )
    mesh = build_mesh(
        nl, M, gamma0, hull, T, dx, mode=mode,
        stepper=stepper, beta_impl=beta_impl,
        dt_override=dt_override, eps_override=eps_override,
    )
    state_hat = init_patch(spec_hat.v0, spec_hat.support, mesh)
    state_check = init_patch(spec_check.v0, spec_check.support, mesh)
    run = init_two_patch(state_hat, state_check, mesh)
    step = step_explicit if stepper == "explicit" else step_implicit
    bound = AbBound.from_problem(nl.structural_bounds(M), gamma0)
    ab_mode = _resolve_ab(ab, mesh, stepper)
    tracker = _MarginTracker(mesh, bound if ab_mode != "off" else None)

    n_steps = snap_ceil(T / mesh.dt)
    snap_at = _snapshot_steps(snapshot_times, mesh.dt, n_steps)
    snapshots: list[tuple[float, np.ndarray]] = []
    snapshot_map: dict[float, float] = {}
    if 0 in snap_at:
        snapshots.append((0.0, run.combined_v()))
        snapshot_map[snap_at[0]] = 0.0

    times = [0.0]
    zl_tr = [state_hat.zeta_l]
    zr_tr = [state_check.zeta_r]
    hat_r_tr = [state_hat.zeta_r]
    check_l_tr = [state_check.zeta_l]
    merge_t = None
    aborted = None
    try:
        n = 1
        while n <= n_steps:
            run = step_run(run, mesh, nl, stepper=step)
            if run.phase is Phase.TWO_PATCHES:
                tracker.absorb(run.report_hat, run.t)
                tracker.absorb(run.report_check, run.t)
            elif run.report_merged is None:
                # merge was just declared; predictions were discarded, time did not advance
                merge_t = run.T_star_h
                continue
            else:
                age = run.t - merge_t if merge_t is not None else run.t
                tracker.absorb(run.report_merged, age)
            if ab_mode == "fatal" and tracker.ab_margin is not None and tracker.ab_margin < 0.0:
                raise InvariantViolation("ab_semiconvexity", tracker.ab_margin, 0.0, n)
            zl, zr = run.outer_interfaces()
            times.append(run.t)
            zl_tr.append(zl)
            zr_tr.append(zr)
            if run.phase is Phase.TWO_PATCHES:
                hat_r_tr.append(run.patch_hat.zeta_r)
                check_l_tr.append(run.patch_check.zeta_l)
            if n in snap_at:
                snapshots.append((run.t, run.combined_v()))
                snapshot_map[snap_at[n]] = run.t
            n += 1
    except InvariantViolation as err:
        aborted = str(err)

    # the inner traces are shorter than t: they terminate at T_star_h
    trace = {
        "t": np.array(times),
        "zeta_l": np.array(zl_tr),
        "zeta_r": np.array(zr_tr),
        "zeta_hat_r": np.array(hat_r_tr),
        "zeta_check_l": np.array(check_l_tr),
    }
    final = run.merged if run.phase is Phase.MERGED else None
    state_for_diag = final if final is not None else PatchState(
        run.combined_v(), run.patch_hat.zeta_l, run.patch_check.zeta_r, run.n, run.t
    )
    diagnostics = [
        check_linf_lipschitz(state_for_diag, mesh),
        check_interface_speed(trace["t"], trace["zeta_l"], trace["zeta_r"], mesh.gamma0),
    ]
    return RunResult(
        mesh=mesh, problem="two_patch", nl_name=nl.name, stepper=stepper,
        snapshots=snapshots, snapshot_map=snapshot_map, trace=trace,
        T_star_h=run.T_star_h, x_star_h=run.x_star_h, margins=tracker.as_dict(),
        diagnostics=diagnostics, backend=kern.BACKEND, final=state_for_diag,
        ab_bound=bound, aborted=aborted, specs=[spec_hat, spec_check],
    )
