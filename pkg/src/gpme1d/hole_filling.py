"""Two-patch evolution with merge detection.

Both patches live on one shared mesh and share dt and eps, so their states stay
comparable nodewise. Each step first *predicts* both one-patch updates. While the
predicted gap between the inner interfaces stays above one cell the predictions are
committed; once it would close to within dx the predictions are discarded, the
current time is recorded as the discrete hole-filling time T_star_h, the midpoint of
the inner interfaces as the filling location x_star_h, and the run continues as a
single merged patch: the nodewise max of the two current profiles under the outer
interfaces. The gap test is pairwise-local, so chains of more than two patches
reduce to the same primitive.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .mesh import MeshConfig
from .nonlinearity import Nonlinearity
from .patch import PatchState, StepReport, step_explicit


class Phase(enum.Enum):
    TWO_PATCHES = "two_patches"
    MERGED = "merged"


@dataclass(frozen=True)
class HoleFillingRun:
    patch_hat: PatchState  # left patch
    patch_check: PatchState  # right patch
    merged: PatchState | None
    T_star_h: float | None
    x_star_h: float | None
    phase: Phase
    # observability: reports from the last committed step (None right after a merge)
    report_hat: StepReport | None = None
    report_check: StepReport | None = None
    report_merged: StepReport | None = None

    def combined_v(self) -> np.ndarray:
        if self.phase is Phase.MERGED:
            return self.merged.v
        return np.maximum(self.patch_hat.v, self.patch_check.v)

    def outer_interfaces(self) -> tuple[float, float]:
        if self.phase is Phase.MERGED:
            return self.merged.zeta_l, self.merged.zeta_r
        return self.patch_hat.zeta_l, self.patch_check.zeta_r

    @property
    def t(self) -> float:
        return self.merged.t if self.phase is Phase.MERGED else self.patch_hat.t

    @property
    def n(self) -> int:
        return self.merged.n if self.phase is Phase.MERGED else self.patch_hat.n


def init_two_patch(hat: PatchState, check: PatchState, mesh: MeshConfig) -> HoleFillingRun:
    """Start a two-patch run; the right patch must start strictly to the right of the left."""
    if hat.zeta_l > check.zeta_l:
        hat, check = check, hat
    gap = check.zeta_l - hat.zeta_r
    if gap <= 0.0:
        raise ValueError(f"supports must be disjoint with positive distance, gap={gap}")
    if hat.n != check.n:
        raise ValueError("patches must share the step counter")
    if hat.v.shape[0] != mesh.n_nodes or check.v.shape[0] != mesh.n_nodes:
        raise ValueError("patches must live on the given mesh")
    return HoleFillingRun(
        patch_hat=hat, patch_check=check, merged=None,
        T_star_h=None, x_star_h=None, phase=Phase.TWO_PATCHES,
    )


def step_run(run: HoleFillingRun, mesh: MeshConfig, nl: Nonlinearity, stepper=step_explicit) -> HoleFillingRun:
    """Advance one step: predict both patches, commit while the predicted inner gap
    exceeds dx, otherwise declare filling at the *current* time (predictions are
    discarded, no time advances) and switch to the merged phase."""
    if run.phase is Phase.MERGED:
        return step_merged(run, mesh, nl, stepper)
    rep_hat = stepper(run.patch_hat, mesh, nl)
    rep_check = stepper(run.patch_check, mesh, nl)
    if rep_check.state.zeta_l - rep_hat.state.zeta_r > mesh.dx:
        return replace(
            run,
            patch_hat=rep_hat.state, patch_check=rep_check.state,
            report_hat=rep_hat, report_check=rep_check, report_merged=None,
        )
    merged = PatchState(
        v=np.maximum(run.patch_hat.v, run.patch_check.v),
        zeta_l=run.patch_hat.zeta_l,
        zeta_r=run.patch_check.zeta_r,
        n=run.patch_hat.n,
        t=run.patch_hat.t,
    )
    return replace(
        run,
        merged=merged,
        T_star_h=run.patch_hat.t,
        x_star_h=0.5 * (run.patch_hat.zeta_r + run.patch_check.zeta_l),
        phase=Phase.MERGED,
        report_hat=None, report_check=None, report_merged=None,
    )


def step_merged(run: HoleFillingRun, mesh: MeshConfig, nl: Nonlinearity, stepper=step_explicit) -> HoleFillingRun:
    if run.phase is not Phase.MERGED:
        raise ValueError("run has not merged yet")
    rep = stepper(run.merged, mesh, nl)
    return replace(run, merged=rep.state, report_merged=rep)
