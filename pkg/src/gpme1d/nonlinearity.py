"""Diffusion nonlinearities for the pressure-form equation v_t = sigma(v) v_xx + |v_x|^2.

The stepper and the CFL arithmetic only see a nonlinearity through sigma and the
structural bounds (s1, S1, S2, sigma_max) taken over the invariant pressure range
[0, M], so new families plug in by subclassing Nonlinearity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class StructuralBounds:
    """Bounds on sigma over [0, M]: s1 <= sigma' <= S1, |sigma''| <= S2, sigma <= sigma_max."""

    s1: float
    S1: float
    S2: float
    sigma_max: float

    def __post_init__(self):
        if not (0.0 < self.s1 <= self.S1):
            raise ValueError(f"need 0 < s1 <= S1, got s1={self.s1}, S1={self.S1}")
        if self.S2 < 0.0:
            raise ValueError(f"need S2 >= 0, got {self.S2}")
        if self.sigma_max < 0.0:
            raise ValueError(f"need sigma_max >= 0, got {self.sigma_max}")


class Nonlinearity:
    """Base class: sigma must be C^2, nondecreasing, with sigma(0) = 0."""

    name: str = "base"

    def sigma(self, r):
        raise NotImplementedError

    def dsigma(self, r):
        raise NotImplementedError

    def d2sigma(self, r):
        raise NotImplementedError

    def structural_bounds(self, M: float) -> StructuralBounds:
        raise NotImplementedError

    def params(self) -> dict:
        raise NotImplementedError


class Pme(Nonlinearity):
    """sigma(r) = (m-1) r, the pressure-form porous medium nonlinearity."""

    name = "pme"

    def __init__(self, m: float):
        if m <= 1.0:
            raise ValueError(f"need m > 1, got m={m}")
        self.m = float(m)

    def sigma(self, r):
        return (self.m - 1.0) * np.asarray(r, dtype=float) if np.ndim(r) else (self.m - 1.0) * r

    def dsigma(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.m - 1.0) if np.ndim(r) else self.m - 1.0

    def d2sigma(self, r):
        return np.zeros_like(np.asarray(r, dtype=float)) if np.ndim(r) else 0.0

    def structural_bounds(self, M: float) -> StructuralBounds:
        if M < 0.0:
            raise ValueError(f"need M >= 0, got {M}")
        c = self.m - 1.0
        return StructuralBounds(s1=c, S1=c, S2=0.0, sigma_max=c * M)

    def params(self) -> dict:
        return {"m": self.m}


class PerturbedPme(Nonlinearity):
    """sigma(r) = (m-1) r + alpha r^2: a convex perturbation with sigma'' = 2 alpha."""

    name = "perturbed_pme"

    def __init__(self, m: float, alpha: float):
        if m <= 1.0:
            raise ValueError(f"need m > 1, got m={m}")
        if alpha < 0.0:
            raise ValueError(f"need alpha >= 0, got alpha={alpha}")
        self.m = float(m)
        self.alpha = float(alpha)

    def sigma(self, r):
        return (self.m - 1.0) * r + self.alpha * r * r

    def dsigma(self, r):
        return (self.m - 1.0) + 2.0 * self.alpha * r

    def d2sigma(self, r):
        return np.full_like(np.asarray(r, dtype=float), 2.0 * self.alpha) if np.ndim(r) else 2.0 * self.alpha

    def structural_bounds(self, M: float) -> StructuralBounds:
        if M < 0.0:
            raise ValueError(f"need M >= 0, got {M}")
        # sigma' increasing on [0, M], so the extremes sit at the endpoints.
        return StructuralBounds(
            s1=self.m - 1.0,
            S1=self.m - 1.0 + 2.0 * self.alpha * M,
            S2=2.0 * self.alpha,
            sigma_max=(self.m - 1.0) * M + self.alpha * M * M,
        )

    def params(self) -> dict:
        return {"m": self.m, "alpha": self.alpha}


def make_nonlinearity(name: str, **params) -> Nonlinearity:
    """Build a nonlinearity from its config name ("pme" or "perturbed_pme")."""
    if name == "pme":
        return Pme(m=params.pop("m", 2.0), **params)
    if name == "perturbed_pme":
        return PerturbedPme(m=params.pop("m", 2.0), alpha=params.pop("alpha", 0.0), **params)
    raise ValueError(f"unknown nonlinearity {name!r}")


def structural_bounds(nl: Nonlinearity, M: float) -> StructuralBounds:
    return nl.structural_bounds(M)


def pme_pressure_from_density(m: float, u) -> float:
    """Pressure v = m u^(m-1) / (m-1) associated with a density u >= 0."""
    if m <= 1.0:
        raise ValueError(f"need m > 1, got m={m}")
    u = np.asarray(u, dtype=float) if np.ndim(u) else u
    if np.any(np.asarray(u) < 0.0):
        raise ValueError("need u >= 0")
    return m * u ** (m - 1.0) / (m - 1.0)
