"""Nonlinearity evaluators and their structural bounds.

The bounds are analytic claims, so they are checked two ways: frozen values for
the concrete families, and dense sampling of sigma' / sigma'' against (s1, S1, S2)
over several pressure ranges.
"""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gpme1d.nonlinearity import (
    Nonlinearity,
    PerturbedPme,
    Pme,
    StructuralBounds,
    make_nonlinearity,
    pme_pressure_from_density,
    structural_bounds,
)

M_GRID = (0.1, 0.5, 1.0, 2.0)


def test_pme_bounds_m2():
    b = Pme(2.0).structural_bounds(2.0 / 3.0)
    assert b.s1 == 1.0
    assert b.S1 == 1.0
    assert b.S2 == 0.0
    assert b.sigma_max == pytest.approx(2.0 / 3.0, rel=1e-15)


def test_pme_bounds_zero_range():
    # sigma is linear, so M = 0 only collapses sigma_max
    b = Pme(2.0).structural_bounds(0.0)
    assert b.sigma_max == 0.0
    assert b.s1 == b.S1 == 1.0


def test_perturbed_bounds():
    b = PerturbedPme(2.0, 0.5).structural_bounds(1.0)
    assert (b.s1, b.S1, b.S2) == (1.0, 2.0, 1.0)
    assert b.sigma_max == pytest.approx(1.5, rel=1e-15)


def test_sigma_values():
    nl = PerturbedPme(3.0, 0.25)
    assert nl.sigma(0.0) == 0.0
    assert nl.sigma(2.0) == pytest.approx(2.0 * 2.0 + 0.25 * 4.0, rel=1e-15)
    assert Pme(2.0).sigma(0.5) == pytest.approx(0.5, rel=1e-15)
    np.testing.assert_allclose(Pme(3.0).sigma(np.array([0.0, 1.0])), [0.0, 2.0])


@pytest.mark.parametrize("name,params,cls", [
    ("pme", {"m": 3.0}, Pme),
    ("perturbed_pme", {"m": 2.0, "alpha": 0.5}, PerturbedPme),
])
def test_registry_builds(name, params, cls):
    nl = make_nonlinearity(name, **params)
    assert isinstance(nl, cls)
    assert nl.name == name
    assert nl.params() == params


def test_registry_rejects_unknown():
    with pytest.raises(ValueError, match="unknown nonlinearity"):
        make_nonlinearity("cubic")


@pytest.mark.parametrize("bad", [1.0, 0.5, -2.0])
def test_m_must_exceed_one(bad):
    with pytest.raises(ValueError):
        Pme(bad)
    with pytest.raises(ValueError):
        PerturbedPme(bad, 0.1)


def test_alpha_nonnegative():
    with pytest.raises(ValueError):
        PerturbedPme(2.0, -0.1)


@pytest.mark.parametrize("kwargs", [
    dict(s1=0.0, S1=1.0, S2=0.0, sigma_max=1.0),
    dict(s1=2.0, S1=1.0, S2=0.0, sigma_max=1.0),
    dict(s1=1.0, S1=1.0, S2=-1.0, sigma_max=1.0),
    dict(s1=1.0, S1=1.0, S2=0.0, sigma_max=-1.0),
])
def test_structural_bounds_validation(kwargs):
    with pytest.raises(ValueError):
        StructuralBounds(**kwargs)


def test_base_class_is_abstract():
    nl = Nonlinearity()
    for call in (lambda: nl.sigma(1.0), lambda: nl.dsigma(1.0),
                 lambda: nl.d2sigma(1.0), lambda: nl.structural_bounds(1.0),
                 lambda: nl.params()):
        with pytest.raises(NotImplementedError):
            call()


@pytest.mark.parametrize("m,u,expected", [(2.0, 1.0, 2.0), (2.0, 0.0, 0.0), (3.0, 2.0, 6.0)])
def test_pressure_from_density(m, u, expected):
    assert pme_pressure_from_density(m, u) == pytest.approx(expected, abs=1e-15)


def test_pressure_from_density_rejects():
    with pytest.raises(ValueError):
        pme_pressure_from_density(1.0, 1.0)
    with pytest.raises(ValueError):
        pme_pressure_from_density(2.0, -1.0)


def test_pressure_from_density_vectorized():
    out = pme_pressure_from_density(2.0, np.array([0.0, 1.0, 2.0]))
    np.testing.assert_allclose(out, [0.0, 2.0, 4.0])


ALL_NLS = [Pme(2.0), Pme(3.5), PerturbedPme(2.0, 0.5), PerturbedPme(2.0, 0.0), PerturbedPme(4.0, 1.5)]


@pytest.mark.parametrize("nl", ALL_NLS, ids=lambda nl: f"{nl.name}{tuple(nl.params().values())}")
@pytest.mark.parametrize("M", M_GRID)
def test_bounds_dominate_sampled_derivatives(nl, M):
    # 10^4 samples of [0, M]: analytic bounds must dominate the evaluators pointwise
    r = np.linspace(0.0, M, 10_000)
    b = nl.structural_bounds(M)
    d1 = np.asarray(nl.dsigma(r))
    d2 = np.abs(np.asarray(nl.d2sigma(r)))
    assert d1.min() >= b.s1 - 1e-12
    assert d1.max() <= b.S1 + 1e-12
    assert d2.max() <= b.S2 + 1e-12
    sig = np.asarray(nl.sigma(r))
    assert sig.max() <= b.sigma_max + 1e-12
    assert np.all(np.diff(sig) > 0.0)  # strictly increasing for r > 0
    assert nl.sigma(0.0) == 0.0


@given(
    m=st.floats(min_value=1.05, max_value=6.0),
    alpha=st.floats(min_value=0.0, max_value=3.0),
    r=st.floats(min_value=0.0, max_value=5.0),
)
def test_dsigma_matches_difference_quotient(m, alpha, r):
    nl = PerturbedPme(m, alpha)
    h = 1e-5 * max(1.0, r)
    r = max(r, h)  # keep the central stencil inside the domain
    fd = (nl.sigma(r + h) - nl.sigma(r - h)) / (2.0 * h)
    assert nl.dsigma(r) == pytest.approx(fd, rel=1e-6, abs=1e-6)


@given(
    m=st.floats(min_value=1.05, max_value=6.0),
    alpha=st.floats(min_value=0.0, max_value=3.0),
    M=st.floats(min_value=0.01, max_value=5.0),
)
def test_bounds_consistent(m, alpha, M):
    b = structural_bounds(PerturbedPme(m, alpha), M)
    assert 0.0 < b.s1 <= b.S1
    assert b.S2 >= 0.0
    assert b.sigma_max >= 0.0
