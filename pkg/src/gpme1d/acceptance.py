"""Self-contained acceptance suite: eight checks at desk scale.

Each criterion prints one PASS/FAIL line. Expensive runs are shared: the
two-patch refinement series feeds criteria 1 and 2, the single-patch series
feeds 3 and 7, and so on. The whole suite is deterministic.

Reference constants below marked "reported" are independently published
estimates for the same benchmark configuration; they gate the acceptance
windows, not our output.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import barenblatt as bb
from .convergence import MIN_CADENCE, fit_rate, measure_errors, oracle_for
from .diagnostics import ab_lower_bound, ab_ode_residual
from .mesh import CflMode
from .nonlinearity import Nonlinearity, PerturbedPme, Pme
from .runner import PatchSpec, RunResult, cadence_times, run_single_patch, run_two_patch

# The benchmark pair: one tall patch at the origin, one shallow patch whose
# left interface starts 3 - 3/2^(2/3) ~ 1.110 away, both with unit age.
HAT = bb.BarenblattParams(m=2.0, C=4.0 / 6.0, x0=0.0, t0=1.0)
CHECK = bb.BarenblattParams(m=2.0, C=1.0 / 6.0, x0=3.0 * 2.0 ** (1.0 / 3.0), t0=1.0)

T_FILL_EXACT = 1.0
X_FILL_EXACT = 2.0 * 2.0 ** (1.0 / 3.0)
# reported estimates for this configuration at dx=0.01 (relaxed CFL)
T_FILL_REPORTED = 1.0205
X_FILL_REPORTED = 2.5236

DX_SERIES = (0.04, 0.02, 0.01)
T_TWO_PATCH = 1.25
T_SINGLE = 2.0


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    runtime: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number} ({self.name}): {tag}  {self.detail}  [{self.runtime:.1f}s]"


class RunCache:
    """Builds each shared run once per suite invocation."""

    def __init__(self):
        self._store: dict = {}

    def get(self, key, builder):
        if key not in self._store:
            self._store[key] = builder()
        return self._store[key]

    def two_patch(self, dx: float) -> RunResult:
        def build():
            r = run_two_patch(
                Pme(2.0), PatchSpec.from_barenblatt(HAT), PatchSpec.from_barenblatt(CHECK),
                dx=dx, T=T_TWO_PATCH, mode=CflMode.RELAXED,
                snapshot_times=cadence_times(T_TWO_PATCH, MIN_CADENCE),
            )
            _require_clean(r)
            return r

        return self.get(("two_patch", dx), build)

    def single(self, dx: float) -> RunResult:
        def build():
            r = run_single_patch(
                Pme(2.0), PatchSpec.from_barenblatt(HAT),
                dx=dx, T=T_SINGLE, mode=CflMode.RELAXED,
                snapshot_times=cadence_times(T_SINGLE, MIN_CADENCE),
            )
            _require_clean(r)
            return r

        return self.get(("single", dx), build)

    def single_strict(self, nl: Nonlinearity, dx: float = 0.02) -> RunResult:
        def build():
            return run_single_patch(
                nl, PatchSpec.from_barenblatt(HAT),
                dx=dx, T=T_SINGLE, mode=CflMode.STRICT,
                snapshot_times=(0.0, T_SINGLE),
            )

        return self.get(("strict", nl.name, dx), build)

    def implicit(self, dx: float) -> RunResult:
        def build():
            r = run_single_patch(
                Pme(2.0), PatchSpec.from_barenblatt(HAT),
                dx=dx, T=1.0, stepper="implicit", beta_impl=0.1,
                snapshot_times=cadence_times(1.0, MIN_CADENCE),
            )
            _require_clean(r)
            return r

        return self.get(("implicit", dx), build)


def _require_clean(r: RunResult) -> None:
    if r.aborted is not None:
        raise AssertionError(f"run aborted: {r.aborted}")


def _decreasing(vals) -> bool:
    return all(a > b for a, b in zip(vals, vals[1:]))


def _criterion_1(cache: RunCache):
    r = cache.two_patch(0.01)
    if r.T_star_h is None:
        return False, f"no filling event before t={T_TWO_PATCH}"
    e_t = abs(r.T_star_h - T_FILL_EXACT)
    e_x = abs(r.x_star_h - X_FILL_EXACT)
    windows_ok = e_t <= 0.05 and e_x <= 0.02
    reported_ok = (
        abs(T_FILL_REPORTED - T_FILL_EXACT) <= 0.05
        and abs(X_FILL_REPORTED - X_FILL_EXACT) <= 0.02
    )
    detail = (
        f"T_star_h={r.T_star_h:.6f} (|err|={e_t:.4f} <= 0.05: {e_t <= 0.05}), "
        f"x_star_h={r.x_star_h:.6f} (|err|={e_x:.4f} <= 0.02: {e_x <= 0.02})"
    )
    if not reported_ok:
        detail += "; reported reference values fall outside the windows"
    return windows_ok and reported_ok, detail


def _criterion_2(cache: RunCache):
    recs = [measure_errors(cache.two_patch(dx)) for dx in DX_SERIES]
    if any(rec.E_t is None for rec in recs):
        return False, "some refinement never filled"
    e_t = [rec.E_t for rec in recs]
    e_x = [rec.E_x for rec in recs]
    a_t = fit_rate(DX_SERIES, e_t, "E_t").alpha
    a_x = fit_rate(DX_SERIES, e_x, "E_x").alpha
    ok = _decreasing(e_t) and _decreasing(e_x) and a_t > 0.0 and a_x > 0.0
    detail = (
        f"E_t={['%.4f' % e for e in e_t]} alpha={a_t:.2f}; "
        f"E_x={['%.4f' % e for e in e_x]} alpha={a_x:.2f}"
    )
    return ok, detail


def _criterion_3(cache: RunCache):
    recs = [measure_errors(cache.single(dx)) for dx in DX_SERIES]
    e_v = [rec.E_v for rec in recs]
    e_z = [rec.E_zeta for rec in recs]
    a_z = fit_rate(DX_SERIES, e_z, "E_zeta").alpha
    ok = _decreasing(e_v) and _decreasing(e_z) and a_z >= 0.5
    detail = (
        f"E_v={['%.5f' % e for e in e_v]}, "
        f"E_zeta={['%.5f' % e for e in e_z]} alpha={a_z:.2f}"
    )
    return ok, detail


def _invariant_suite(r: RunResult):
    """Zero-violation gate used by criteria 4 and 8."""
    if r.aborted is not None:
        return False, f"aborted: {r.aborted}"
    bad = {k: m for k, m in r.margins.items() if m < 0.0}
    diag_bad = [d.check for d in r.diagnostics if not d.passed]
    ok = not bad and not diag_bad
    worst = min(r.margins.values())
    detail = f"worst margin {worst:.3e} ({min(r.margins, key=r.margins.get)})"
    if bad:
        detail = "violated: " + ", ".join(f"{k}={m:.3e}" for k, m in bad.items())
    if diag_bad:
        detail += "; diagnostics failed: " + ", ".join(diag_bad)
    return ok, detail


def _criterion_4(cache: RunCache):
    return _invariant_suite(cache.single_strict(Pme(2.0)))


def _criterion_5(cache: RunCache):
    ts = np.logspace(-3.0, 3.0, 100)
    worst = -1.0
    worst_case = None
    for lam, c in ((0.0, 3.0), (1.0, 3.0), (0.5, 3.5)):
        for t in ts:
            res = ab_ode_residual(lam, c, float(t))
            if res > worst:
                worst, worst_case = res, (lam, c, float(t))
    ode_ok = worst <= 1e-8

    # the m=2 case must be -1/(3t) exactly, including at the bit level
    nl = Pme(2.0)
    bounds = nl.structural_bounds(2.0 / 3.0)
    lam = (2.0 / 3.0) ** 2 * bounds.S2
    c = 2.0 + bounds.s1
    exact_ok = lam == 0.0 and c == 3.0 and all(
        ab_lower_bound(lam, c, float(t)) == -1.0 / (3.0 * float(t)) for t in ts
    )
    ok = ode_ok and exact_ok
    detail = f"max ODE residual {worst:.2e} at (lam,c,t)={worst_case}; m=2 closed form exact: {exact_ok}"
    return ok, detail


def _pde_residual_max(p: bb.BarenblattParams, nl: Nonlinearity, n_t: int, n_x: int, h: float = 1e-4):
    """Central-difference residual of the pressure equation on interior samples."""
    worst = 0.0
    for t in np.linspace(0.25, 2.0, n_t):
        zl, zr = bb.interfaces(p, t)
        half = 0.45 * (zr - zl)
        xs = np.linspace(p.x0 - half, p.x0 + half, n_x)
        v = bb.value(p, xs, t)
        v_t = (bb.value(p, xs, t + h) - bb.value(p, xs, t - h)) / (2.0 * h)
        v_p = bb.value(p, xs + h, t)
        v_m = bb.value(p, xs - h, t)
        v_xx = (v_p - 2.0 * v + v_m) / (h * h)
        v_x = (v_p - v_m) / (2.0 * h)
        resid = np.abs(v_t - nl.sigma(v) * v_xx - v_x * v_x)
        worst = max(worst, float(resid.max()))
    return worst


def _criterion_6(cache: RunCache):
    nl = Pme(2.0)
    resid = max(
        _pde_residual_max(HAT, nl, n_t=10, n_x=50),
        _pde_residual_max(CHECK, nl, n_t=10, n_x=50),
    )
    resid_ok = resid <= 1e-6

    fill_ok = True
    worst_fill = 0.0
    for method in ("closed", "root"):
        T, x = bb.exact_filling(HAT, CHECK, method=method)
        err = max(abs(T - T_FILL_EXACT), abs(x - X_FILL_EXACT))
        worst_fill = max(worst_fill, err)
        fill_ok = fill_ok and err <= 1e-10
    detail = f"max PDE residual {resid:.2e} over 1000 points; filling error {worst_fill:.2e} (both routes)"
    return resid_ok and fill_ok, detail


def _criterion_7(cache: RunCache):
    expl = measure_errors(cache.single(0.02), t_max=1.0).E_v
    impl = [measure_errors(cache.implicit(dx)).E_v for dx in DX_SERIES]
    ratio = impl[1] / expl
    ok = ratio <= 5.0 and _decreasing(impl)
    detail = (
        f"implicit E_v={['%.5f' % e for e in impl]} vs explicit {expl:.5f} at dx=0.02 "
        f"(ratio {ratio:.2f} <= 5)"
    )
    return ok, detail


def _criterion_8(cache: RunCache):
    return _invariant_suite(cache.single_strict(PerturbedPme(2.0, 0.5)))


CRITERIA = (
    (1, "hole-filling reproduction", _criterion_1),
    (2, "filling-time convergence", _criterion_2),
    (3, "single-patch accuracy", _criterion_3),
    (4, "invariant suite", _criterion_4),
    (5, "semiconvexity floor construction", _criterion_5),
    (6, "oracle self-consistency", _criterion_6),
    (7, "stepper cross-check", _criterion_7),
    (8, "generalized nonlinearity smoke test", _criterion_8),
)


def run_criteria(only=None, verbose: bool = True) -> list[CriterionResult]:
    """Run the acceptance criteria (all by default, or the numbers in `only`)."""
    if only is not None:
        wanted = set(only)
        unknown = wanted - {n for n, _, _ in CRITERIA}
        if unknown:
            raise ValueError(f"unknown criterion numbers: {sorted(unknown)}")
    cache = RunCache()
    results = []
    for number, name, fn in CRITERIA:
        if only is not None and number not in wanted:
            continue
        t0 = time.perf_counter()
        try:
            passed, detail = fn(cache)
        except Exception as err:  # a crashed criterion is a failed criterion
            passed, detail = False, f"raised {type(err).__name__}: {err}"
        res = CriterionResult(number, name, passed, detail, time.perf_counter() - t0)
        results.append(res)
        if verbose:
            print(res.line(), flush=True)
    return results
