"""Generalized characteristic functions ``Phi(t) = int omega(t x) lambda(dx)``
and the Levy-Khintchine evaluator for infinitely decomposable laws."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convolutions import ConvSpec, kappa, omega, omega_breakpoints
from .measures import (
    DiracMix,
    Empirical,
    GridDensity,
    Measure,
    Mixture,
    SamplerBacked,
    as_generator,
    quadrature,
)

__all__ = [
    "LevyTriple",
    "DivergenceError",
    "gcf",
    "gcf_with_error",
    "upsilon",
    "check_x0",
    "lk_gcf",
    "lk_integrand",
]


class DivergenceError(ArithmeticError):
    """A Levy-Khintchine integral did not evaluate to a finite number."""


@dataclass(frozen=True)
class LevyTriple:
    """``(A, m)`` with cutoff ``x0``; ``m`` is ``m_mass`` times the probability law ``m_law``."""

    spec: ConvSpec
    A: float = 0.0
    m_law: Measure | None = None
    m_mass: float = 0.0
    x0: float = 1.0

    def __post_init__(self):
        if self.A < 0:
            raise ValueError("A must be nonnegative")
        if self.m_mass < 0 or not math.isfinite(self.m_mass):
            raise ValueError("m must be a finite measure")
        if self.m_mass > 0 and self.m_law is None:
            raise ValueError("m_mass > 0 needs m_law")
        if self.A > 0 and math.isinf(kappa(self.spec)):
            raise ValueError("a Gaussian-type part needs a finite exponent")
        check_x0(self.spec, self.x0)
        if isinstance(self.m_law, DiracMix) and self.m_mass > 0 and self.m_law.atom(0.0) > 0:
            raise ValueError("m may not charge 0")

    @property
    def has_jumps(self) -> bool:
        return self.m_mass > 0


def gcf_with_error(spec: ConvSpec, lam: Measure, t: float, rng=None, n: int = 100_000):
    """``(Phi_lam(t), standard error)``; the error is 0 for exact representations."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if isinstance(lam, (DiracMix, GridDensity, Mixture)):
        bps = omega_breakpoints(spec, t)
        val = quadrature(lam, lambda x: omega(spec, t * np.abs(x)), bps)
        return val, 0.0
    if isinstance(lam, Empirical):
        x = lam.samples
    elif isinstance(lam, SamplerBacked):
        x = lam.sample(as_generator(rng), n)
    else:
        x = lam.sample(as_generator(rng), n)
    vals = np.asarray(omega(spec, t * np.abs(x)), dtype=float)
    se = float(np.std(vals, ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
    return float(np.mean(vals)), se


def gcf(spec: ConvSpec, lam: Measure, t: float, rng=None, n: int = 100_000) -> float:
    return gcf_with_error(spec, lam, t, rng, n)[0]


def check_x0(spec: ConvSpec, x0: float, n: int = 512) -> None:
    """Raise unless ``omega < 1`` on ``(0, x0]`` (checked on a grid)."""
    if not x0 > 0:
        raise ValueError("x0 must be positive")
    if spec.kind == "max":
        raise ValueError("the max kernel equals 1 near 0, so no admissible x0 exists")
    # cosine kernels touch 1 only at isolated points a grid would miss
    period = None
    if spec.kind == "symmetric":
        period = (2 * math.pi) ** (1.0 / spec.param)
    elif spec.kind == "kingman" and spec.param == -0.5:
        period = 2 * math.pi
    if period is not None and x0 >= period:
        raise ValueError(f"omega reaches 1 at {period} for {spec}")
    grid = x0 * np.linspace(1.0 / n, 1.0, n)
    if np.any(np.asarray(omega(spec, grid)) >= 1.0):
        raise ValueError(f"omega reaches 1 inside (0, {x0}] for {spec}")


def upsilon(spec: ConvSpec, x, x0: float = 1.0):
    """``1 - omega(x)`` below ``x0`` and ``1 - omega(x0)`` above."""
    check_x0(spec, x0)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be nonnegative")
    out = 1.0 - np.asarray(omega(spec, np.minimum(x, x0)), dtype=float)
    return float(out) if out.ndim == 0 else out


def lk_integrand(triple: LevyTriple, t: float):
    """``x -> (omega(t x) - 1) / upsilon(x)``, continued to small ``x`` by its limit."""
    spec, x0 = triple.spec, triple.x0
    floor = 1e-6 * x0

    def h(x):
        x = np.maximum(np.asarray(x, dtype=float), floor)
        num = np.asarray(omega(spec, t * x), dtype=float) - 1.0
        den = 1.0 - np.asarray(omega(spec, np.minimum(x, x0)), dtype=float)
        return num / den

    return h


def lk_gcf(triple: LevyTriple, t: float) -> float:
    """``exp(-A t**kappa + int (omega(t x) - 1) / upsilon(x) m(dx))``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    k = kappa(triple.spec)
    expo = -triple.A * t**k if triple.A > 0 else 0.0
    if triple.has_jumps:
        bps = omega_breakpoints(triple.spec, t) + (triple.x0,)
        integral = quadrature(triple.m_law, lk_integrand(triple, t), bps)
        if not math.isfinite(integral):
            raise DivergenceError(f"L-K integral is {integral} at t={t} for {triple.spec}")
        expo += triple.m_mass * integral
    return math.exp(expo)
