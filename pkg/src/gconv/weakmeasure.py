"""Weak generalized random measures on the half-line, weak Levy and Poisson
processes, and their associated classical processes ``Y_t = S_t * chi_t``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import interpolate, stats

from .infdiv import CompoundPoissonSpec, cpoisson_sample, default_kmax, kendall_cpoisson_measure
from .measures import (
    DiracMix,
    GridDensity,
    Measure,
    as_generator,
    dirac,
    ks_distance,
    ks_distance_cdf,
    mixture,
)
from .processes import PathRecord
from .stable import symmetric_stable_sample
from .convolutions import stable_sample
from .weakstable import (
    SpectralMeasure,
    WeakLevyTriple,
    WeaklyStableLaw,
    mu_sample,
    representable_pair,
)

__all__ = [
    "CompoundPoissonBase",
    "StableBase",
    "WeakRandomMeasureSpec",
    "KSReport",
    "sample_cell",
    "weak_measure_eval",
    "weak_levy_path",
    "weak_poisson_path",
    "weak_poisson_dist",
    "compound_uniform_measure",
    "sphere3_weak_poisson_density",
    "uniform_conv_power_density",
    "uniform_conv_power_cdf",
    "subordination_check",
]


@dataclass(frozen=True)
class CompoundPoissonBase:
    """``lambda^{(r)} = Exp(r * rate * jump)``: jumps at ``rate`` per unit of control."""

    rate: float = 1.0
    jump: Measure = field(default_factory=lambda: dirac(1.0))

    def triple(self, law: WeaklyStableLaw) -> WeakLevyTriple:
        """The weak Levy-Khintchine data of one unit of control (atomic jump laws only)."""
        if not isinstance(self.jump, DiracMix):
            raise NotImplementedError("spectral data needs an atomic jump law")
        atoms = tuple((float(p), self.rate * float(w)) for p, w in zip(self.jump.points, self.jump.weights))
        return WeakLevyTriple(law, 0.0, SpectralMeasure(atoms=atoms))


@dataclass(frozen=True)
class StableBase:
    """``lambda^{(r)} = T_{scale * r**(1/q)} sigma_q`` for the generated convolution."""

    q: float
    scale: float = 1.0

    def triple(self, law: WeaklyStableLaw) -> WeakLevyTriple:
        if self.q != law.kappa:
            raise NotImplementedError("only the exponent q = kappa has a pure Gaussian-type triple")
        return WeakLevyTriple(law, self.scale**self.q)


@dataclass(frozen=True)
class WeakRandomMeasureSpec:
    """Control measure ``c * Lebesgue`` on ``[0, inf)``."""

    law: WeaklyStableLaw
    base: CompoundPoissonBase | StableBase = field(default_factory=CompoundPoissonBase)
    c: float = 1.0

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("control intensity must be nonnegative")
        if isinstance(self.base, StableBase) and not 0 < self.base.q <= self.law.kappa:
            raise ValueError("stable base needs 0 < q <= kappa(mu)")

    def control(self, lo: float, hi: float) -> float:
        return self.c * (hi - lo)


@dataclass(frozen=True)
class KSReport:
    statistic: float
    threshold: float
    samples: int

    @property
    def passed(self) -> bool:
        return self.statistic < self.threshold


def _fold(law, pair, s, chi, thetas, g):
    """Fold the columns of ``thetas`` into ``(s, chi)`` with fresh draws from ``mu``."""
    n = s.size
    for k in range(thetas.shape[1]):
        s, chi = pair.split(s, chi, thetas[:, k], mu_sample(law, g, n))
    return s, chi


def sample_cell(spec: WeakRandomMeasureSpec, r: float, rng, size: int):
    """``(M(A), chi(A))`` for a cell of control ``r``; ``chi`` has shape ``(size, dim)``."""
    g = as_generator(rng)
    law, base = spec.law, spec.base
    if isinstance(base, StableBase):
        if r == 0:
            theta = np.zeros(size)
        else:
            theta = base.scale * r ** (1.0 / base.q) * stable_sample(law.conv_spec(), base.q, g, size)
        return theta, mu_sample(law, g, size)
    if law.kind == "kendallmu":
        # one cell needs no pair: M(A) is compound Poisson under the generated convolution
        theta = cpoisson_sample(CompoundPoissonSpec(law.conv_spec(), base.rate * r, base.jump), g, size)
        return theta, mu_sample(law, g, size)
    pair = representable_pair(law)
    counts = g.poisson(base.rate * r, size)
    kmax = int(counts.max(initial=0))
    jumps = np.zeros((size, max(kmax, 1)))
    for k in range(kmax):
        live = counts > k
        jumps[live, k] = base.jump.sample(g, int(live.sum()))
    # the first jump seeds the chain; zero padding leaves (S, chi) unchanged
    x1 = mu_sample(law, g, size)
    s, chi = pair.split(jumps[:, 0], x1, np.zeros(size), x1)
    return _fold(law, pair, s, chi, jumps[:, 1:], g)


def weak_measure_eval(spec: WeakRandomMeasureSpec, cells, rng, size: int):
    """Independent ``(M(A_i), chi(A_i))`` over disjoint cells ``[(lo, hi), ...]``."""
    cells = [(float(a), float(b)) for a, b in cells]
    for (a, b), (c, d) in zip(sorted(cells), sorted(cells)[1:]):
        if c < b:
            raise ValueError("cells must be disjoint")
    g = as_generator(rng)
    thetas = np.zeros((size, len(cells)))
    chis = np.zeros((size, len(cells), spec.law.dim))
    for i, (a, b) in enumerate(cells):
        if b < a:
            raise ValueError("cell with hi < lo")
        thetas[:, i], chis[:, i] = sample_cell(spec, spec.control(a, b), g, size)
    return thetas, chis


def weak_levy_path(spec: WeakRandomMeasureSpec, grid, rng, n_paths: int = 1):
    """``S_t = M([0, t))`` folded cell by cell and the associated ``Y_t = S_t * chi_t``."""
    g = as_generator(rng)
    times = np.asarray(grid, dtype=float)
    if times[0] != 0:
        raise ValueError("grid must start at 0")
    law = spec.law
    pair = representable_pair(law)
    S = np.zeros((n_paths, times.size))
    Y = np.zeros((n_paths, times.size, law.dim))
    s = np.zeros(n_paths)
    chi = mu_sample(law, g, n_paths)
    for k in range(1, times.size):
        th, x = sample_cell(spec, spec.control(times[k - 1], times[k]), g, n_paths)
        s, chi = pair.split(s, chi, th, x)
        S[:, k] = s
        Y[:, k] = s[:, None] * chi
    return PathRecord(times, S), PathRecord(times, Y)


def weak_poisson_path(law: WeaklyStableLaw, c: float, grid, rng, n_paths: int = 1):
    """The weak Poisson process with intensity ``c`` (unit jumps) and its associated process."""
    return weak_levy_path(WeakRandomMeasureSpec(law, CompoundPoissonBase(1.0, dirac(1.0)), c),
                          grid, rng, n_paths)


# ---------------------------------------------------------------------------
# closed forms


def uniform_conv_power_density(n: int, x):
    """Density of the sum of ``n`` independent Uniform[-1, 1] variables.

    The sum equals ``2 S - n`` with ``S`` Irwin-Hall, whose density is the
    cardinal B-spline on knots ``0..n``; de Boor evaluation stays stable for
    every ``n`` where the alternating binomial sum does not.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    x = np.asarray(x, dtype=float)
    spline = _cardinal_bspline(n)
    s = 0.5 * (x + n)
    out = np.where((s >= 0) & (s <= n), 0.5 * np.nan_to_num(spline(np.clip(s, 0, n))), 0.0)
    out = np.maximum(out, 0.0)
    return float(out) if out.ndim == 0 else out


def uniform_conv_power_cdf(n: int, x):
    if n < 1:
        raise ValueError("n must be at least 1")
    x = np.asarray(x, dtype=float)
    anti = _cardinal_bspline(n).antiderivative()
    s = np.clip(0.5 * (x + n), 0, n)
    out = np.clip(np.nan_to_num(anti(s)), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


_SPLINES: dict[int, interpolate.BSpline] = {}


def _cardinal_bspline(n: int) -> interpolate.BSpline:
    if n not in _SPLINES:
        _SPLINES[n] = interpolate.BSpline.basis_element(np.arange(n + 1.0), extrapolate=False)
    return _SPLINES[n]


def _series_grid(n_max: int, per_unit: int = 200) -> np.ndarray:
    return np.linspace(-n_max - 1.0, n_max + 1.0, 2 * (n_max + 1) * per_unit + 1)


def compound_uniform_measure(a: float, n_max: int | None = None, per_unit: int = 200) -> Measure:
    """``e^{-a} sum_n a^n/n! U^{*n}``: the classical compound Poisson law of Uniform[-1, 1] jumps."""
    if not a > 0:
        return dirac(0.0)
    n_max = n_max or default_kmax(a)
    x = _series_grid(n_max, per_unit)
    w = stats.poisson.pmf(np.arange(n_max + 1), a)
    dens = sum(w[n] * uniform_conv_power_density(n, x) for n in range(1, n_max + 1))
    return mixture([(w[0], dirac(0.0)), (1.0 - w[0], GridDensity(x, dens))])


def sphere3_weak_poisson_density(a: float, x, n_max: int | None = None):
    """Continuous part of ``exp(a w) * (delta_0 - a w + a lambda_0)``, ``w`` = Uniform[-1, 1]."""
    n_max = n_max or default_kmax(a)
    x = np.asarray(x, dtype=float)
    w = stats.poisson.pmf(np.arange(n_max + 2), a)
    out = np.zeros_like(x)
    for n in range(1, n_max + 1):
        fn = uniform_conv_power_density(n, x)
        shifted = uniform_conv_power_density(n, x - 1.0) + uniform_conv_power_density(n, x + 1.0)
        out += w[n] * fn + 0.5 * a * w[n] * shifted
    for n in range(0, n_max + 1):
        out -= a * w[n] * uniform_conv_power_density(n + 1, x)
    return out


def weak_poisson_dist(law: WeaklyStableLaw, c: float, t: float, k_max: int | None = None) -> Measure:
    """Law of ``eps * S_t`` for the weak Poisson process of intensity ``c``.

    ``eps`` is an independent fair sign for the symmetric Kendall and sphere
    cases; the symmetric stable case returns the law of ``S_t`` itself.
    """
    a = c * t
    if a < 0:
        raise ValueError("c * t must be nonnegative")
    if a == 0:
        return dirac(0.0)
    k_max = k_max or default_kmax(a)
    if law.kind == "sas":
        k = np.arange(k_max + 1)
        w = stats.poisson.pmf(k, a)
        return DiracMix(k ** (1.0 / law.param), w / w.sum())
    if law.kind == "kendallmu":
        return kendall_cpoisson_measure(law.param, a, symmetric=True)
    if law.kind == "sphere" and law.dim == 3:
        x = _series_grid(k_max + 1)
        dens = np.maximum(sphere3_weak_poisson_density(a, x, k_max), 0.0)
        atoms = DiracMix.from_pairs([(0.0, 1.0 / (1.0 + a)), (-1.0, 0.5 * a / (1.0 + a)),
                                     (1.0, 0.5 * a / (1.0 + a))])
        atom_mass = math.exp(-a) * (1.0 + a)
        return mixture([(atom_mass, atoms), (1.0 - atom_mass, GridDensity(x, dens))])
    raise NotImplementedError(f"no closed-form weak Poisson law for {law}")


def subordination_check(alpha: float, beta: float, grid=(0.0, 0.5, 1.0), N: int = 100_000,
                        rng=None, threshold: float = 0.01) -> KSReport:
    """Associated process of ``T(t)^(1/alpha)`` against the symmetric ``alpha*beta``-stable law.

    ``T`` is a ``beta``-stable subordinator and ``mu`` the symmetric
    ``alpha``-stable law; ``Y_T`` should be ``T^(1/(alpha beta))`` times a
    variable with characteristic function ``exp(-|t|^(alpha beta))``.
    """
    if not (0 < alpha <= 2 and 0 < beta <= 1):
        raise ValueError("need alpha in (0, 2] and beta in (0, 1]")
    g = as_generator(rng)
    law = WeaklyStableLaw.symmetric_stable(alpha)
    spec = WeakRandomMeasureSpec(law, StableBase(alpha * beta), 1.0)
    _, Y = weak_levy_path(spec, grid, g, N)
    horizon = float(np.asarray(grid)[-1])
    y = Y.states[:, -1, 0] / horizon ** (1.0 / (alpha * beta))
    q = alpha * beta
    if q == 1:
        ks = ks_distance_cdf(y, lambda z: 0.5 + np.arctan(z) / np.pi)
    else:
        ks = ks_distance(y, symmetric_stable_sample(q, g, N))
    return KSReport(ks, threshold, N)
