"""Acceptance criteria at full scale, one test per criterion.

Expensive runs are shared through a module-scoped cache, so the criteria here
see the same warm-cache behaviour as `gpme1d validate`. Each test prints the
criterion's pass/fail line and enforces its runtime budget.

Known limitation, kept honest: criterion 2 asserts that the filling-time error
E_t decreases under mesh refinement along with E_x. In this implementation E_x
refines cleanly but E_t does not (the discrete filling time crosses the exact
one near dx = 0.03, so |error| is not monotone on the pinned series). The
criterion is asserted as specified and is expected to FAIL; see README.
"""

import time

import pytest

from gpme1d.acceptance import CRITERIA, CriterionResult, RunCache, run_criteria

BUDGETS = {1: 120.0, 2: 600.0, 3: 300.0}  # seconds; everything else gets 120
DEFAULT_BUDGET = 120.0


@pytest.fixture(scope="module")
def cache():
    return RunCache()


@pytest.mark.parametrize(
    "number,name,fn",
    CRITERIA,
    ids=[f"{n:02d}_{name.replace(' ', '_')}" for n, name, _ in CRITERIA],
)
def test_criterion(number, name, fn, cache):
    t0 = time.perf_counter()
    passed, detail = fn(cache)
    elapsed = time.perf_counter() - t0
    res = CriterionResult(number, name, passed, detail, elapsed)
    print(res.line())

    budget = BUDGETS.get(number, DEFAULT_BUDGET)
    assert elapsed <= budget, f"criterion {number} took {elapsed:.1f}s > {budget:.0f}s"
    assert passed, res.line()


def test_filling_event_regression_anchor(cache):
    # pinned output of this implementation at dx=0.01 (relaxed CFL); any drift
    # here means the scheme's arithmetic changed, not just its accuracy
    r = cache.two_patch(0.01)
    assert r.T_star_h == pytest.approx(1.003374384236453, abs=1e-9)
    assert r.x_star_h == pytest.approx(2.5217497864007514, abs=1e-9)


def test_run_criteria_selection():
    results = run_criteria(only=[5], verbose=False)
    assert [r.number for r in results] == [5]
    assert results[0].passed
    assert "PASS" in results[0].line()
    with pytest.raises(ValueError, match="unknown"):
        run_criteria(only=[5, 42])
