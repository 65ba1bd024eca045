"""Interface-tracking finite differences for degenerate diffusion in one dimension.

The solver advances the pressure form of the porous-medium family,

    v_t = sigma(v) v_xx + (v_x)^2,

on compactly supported data, moving the support endpoints with the interface law
zeta' = -v_x and rebuilding the O(dx) boundary layer by interpolation each step.
Hot loops live in a compiled extension with a pure-NumPy fallback; see
`gpme1d._kernels.BACKEND` for which one is active.
"""

from ._kernels import BACKEND
from .barenblatt import BarenblattParams, exact_filling
from .convergence import ErrorRecord, RateFit, fit_rates, measure_errors, oracle_for, refinement_series
from .diagnostics import AbBound, ab_lower_bound
from .hole_filling import HoleFillingRun, Phase
from .mesh import CflMode, MeshConfig, build_grid, build_mesh, cfl_relaxed, cfl_strict
from .nonlinearity import Nonlinearity, PerturbedPme, Pme, StructuralBounds, make_nonlinearity
from .patch import InvariantViolation, PatchState, init_patch, step_explicit, step_implicit
from .runner import PatchSpec, RunResult, run_single_patch, run_two_patch

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AbBound",
    "BarenblattParams",
    "CflMode",
    "ErrorRecord",
    "HoleFillingRun",
    "InvariantViolation",
    "MeshConfig",
    "Nonlinearity",
    "PatchSpec",
    "PatchState",
    "PerturbedPme",
    "Phase",
    "Pme",
    "RateFit",
    "RunResult",
    "StructuralBounds",
    "ab_lower_bound",
    "build_grid",
    "build_mesh",
    "cfl_relaxed",
    "cfl_strict",
    "exact_filling",
    "fit_rates",
    "init_patch",
    "make_nonlinearity",
    "measure_errors",
    "oracle_for",
    "refinement_series",
    "run_single_patch",
    "run_two_patch",
    "step_explicit",
    "step_implicit",
]
