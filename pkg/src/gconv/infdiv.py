"""Generalized compound Poisson laws ``Exp(a lambda) = e^{-a} sum a^k/k! lambda^{*k}``
and convolution powers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .convolutions import ConvSpec, convolve, kernel_sample
from .gcf import gcf
from .measures import DiracMix, GridDensity, Measure, Symmetrized, as_generator, dirac, mixture

__all__ = [
    "CompoundPoissonSpec",
    "cpoisson_sample",
    "cpoisson_measure",
    "default_kmax",
    "kendall_cpoisson_measure",
    "kendall_cpoisson_cdf",
    "conv_power_gcf",
    "kingman_weak_poisson_cf",
]

MAX_ATOMS = 200_000


@dataclass(frozen=True)
class CompoundPoissonSpec:
    spec: ConvSpec
    a: float
    jump: Measure

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("intensity must be positive")


def cpoisson_sample(cp: CompoundPoissonSpec, rng, size: int) -> np.ndarray:
    """``N ~ Poisson(a)`` jumps folded left to right through the kernel, starting at 0."""
    g = as_generator(rng)
    counts = g.poisson(cp.a, size)
    state = np.zeros(size)
    for k in range(1, int(counts.max(initial=0)) + 1):
        live = np.flatnonzero(counts >= k)
        state[live] = kernel_sample(cp.spec, state[live], cp.jump.sample(g, live.size), g)
    return state


def default_kmax(a: float) -> int:
    return int(math.ceil(a + 12.0 * math.sqrt(a) + 20.0))


def kendall_cpoisson_cdf(alpha: float, a: float, x):
    """CDF of ``Exp(a delta_1)`` under the Kendall convolution."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        v = a * np.where(x >= 1, x, 1.0) ** (-alpha)
        upper = (1.0 + v) * np.exp(-v)
    out = np.where(x < 0, 0.0, np.where(x < 1, math.exp(-a), upper))
    return float(out) if out.ndim == 0 else out


def kendall_cpoisson_measure(alpha: float, a: float, scale: float = 1.0, symmetric: bool = False,
                             n: int = 20001, tail: float = 1e-12) -> Measure:
    """Closed form of ``Exp(a delta_scale)`` under Kendall(alpha).

    Atoms ``e^{-a} delta_0 + a e^{-a} delta_1`` plus density
    ``a^2 alpha u^{-2 alpha - 1} exp(-a u^{-alpha})`` on ``(1, inf)``, all scaled
    by ``scale``. ``symmetric=True`` returns the law of a fair random sign times it.
    """
    if not (alpha > 0 and a > 0 and scale > 0):
        raise ValueError("alpha, a and scale must be positive")
    cont_mass = 1.0 - math.exp(-a) * (1.0 + a)
    upper = (tail / max(a * a / 2.0, 1e-300)) ** (-1.0 / (2 * alpha))
    upper = max(upper, 10.0)
    u = np.geomspace(1.0, upper, n)
    dens = a * a * alpha * u ** (-2 * alpha - 1) * np.exp(-a * u ** (-alpha))
    beyond = 1.0 - float(kendall_cpoisson_cdf(alpha, a, upper))
    cont = GridDensity(scale * u, dens / scale, tail_mass=beyond / cont_mass, tail_index=2 * alpha)
    atoms = DiracMix.from_pairs([(0.0, math.exp(-a) / (1 - cont_mass)),
                                 (scale, a * math.exp(-a) / (1 - cont_mass))])
    out = mixture([(1 - cont_mass, atoms), (cont_mass, cont)])
    return Symmetrized(out) if symmetric else out


def cpoisson_measure(cp: CompoundPoissonSpec, k_max: int | None = None) -> tuple[Measure, float]:
    """Truncated series ``e^{-a} sum_{k<=k_max} a^k/k! jump^{*k}``, renormalized.

    Returns the measure and the truncated Poisson mass. Atomic kernels with an
    atomic jump law are summed exactly; Kendall with a point-mass jump uses its
    closed form (no truncation).
    """
    spec, a, jump = cp.spec, cp.a, cp.jump
    if k_max is None:
        k_max = default_kmax(a)
    if spec.kind == "kendall" and isinstance(jump, DiracMix) and jump.points.size == 1:
        x = float(jump.points[0])
        if x == 0:
            return dirac(0.0), 0.0
        return kendall_cpoisson_measure(spec.param, a, x), 0.0
    if not (spec.atomic and isinstance(jump, DiracMix)):
        raise NotImplementedError(
            f"no exact series for {spec} with {type(jump).__name__} jumps; use cpoisson_sample")
    weights = stats.poisson.pmf(np.arange(k_max + 1), a)
    truncated = float(stats.poisson.sf(k_max, a))
    power: DiracMix = dirac(0.0)
    pairs = [(0.0, weights[0])]
    for k in range(1, k_max + 1):
        power = convolve(spec, power, jump)
        if power.points.size > MAX_ATOMS:
            raise MemoryError("convolution power has too many atoms")
        pairs.extend((p, weights[k] * q) for p, q in zip(power.points, power.weights))
    total = sum(w for _, w in pairs)
    return DiracMix.from_pairs([(p, w / total) for p, w in pairs]), truncated


def conv_power_gcf(spec: ConvSpec, lam: Measure, r: float, t: float, rng=None) -> float:
    """``Phi_{lam^{*r}}(t) = Phi_lam(t)**r`` for infinitely divisible ``lam``."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    if r == 0:
        return 1.0
    base = gcf(spec, lam, t, rng)
    if base <= 0:
        raise ValueError(f"Phi(t)={base} is not positive; lam is not infinitely divisible here")
    return base**r


def kingman_weak_poisson_cf(c: float, t):
    """``exp(-c(1 - sinc t)) (1 - c sinc t + c cos t)`` with ``sinc t = sin t / t``."""
    if not c > 0:
        raise ValueError("c must be positive")
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < 1e-4
    tt = np.where(small, 1.0, t)
    sinc = np.where(small, 1.0 - t * t / 6.0 + t**4 / 120.0, np.sin(tt) / tt)
    out = np.exp(-c * (1.0 - sinc)) * (1.0 - c * sinc + c * np.cos(t))
    return float(out) if out.ndim == 0 else out
