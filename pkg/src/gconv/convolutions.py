"""Catalog of generalized convolutions on the half-line.

Each member is fixed by its point-mass kernel ``delta_x * delta_y``; the
kernel gives exact measures, vectorized samplers, the transform kernel
``omega``, the characteristic exponent ``kappa`` and the stable laws
``sigma_p`` whose generalized characteristic function is ``exp(-t**p)``.

Supported kinds and parameters:

========== ========== ==============================================
kind       parameter  kernel
========== ========== ==============================================
classic    --         delta_{x+y}
symmetric  alpha > 0  1/2 delta_{|x^a-y^a|^(1/a)} + 1/2 delta_{(x^a+y^a)^(1/a)}
pstable    p > 0      delta_{(x^p+y^p)^(1/p)}
kendall    alpha > 0  T_y[(x/y)^a pi_{2a} + (1-(x/y)^a) delta_1], x <= y
kingman    s > -1/2   law of sqrt(x^2 + y^2 + 2 x y theta_s)
max        --         delta_{max(x,y)}
========== ========== ==============================================
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .measures import (
    DiracMix,
    Empirical,
    GridDensity,
    Measure,
    as_generator,
    dirac,
    mixture,
)
from .stable import positive_stable_sample

__all__ = [
    "ConvSpec",
    "NoClosedForm",
    "kernel_measure",
    "kernel_sample",
    "omega",
    "omega_breakpoints",
    "one_minus_omega",
    "kappa",
    "stable_density",
    "stable_cdf",
    "stable_sample",
    "stable_measure",
    "convolve",
    "pareto_grid",
    "kingman_theta_sample",
    "kingman_theta_density",
]

KINDS = ("classic", "symmetric", "pstable", "kendall", "kingman", "max")
_PARAM_NAME = {"symmetric": "a", "pstable": "p", "kendall": "a", "kingman": "s"}
# kinds whose point-mass kernel is purely atomic
_ATOMIC = ("classic", "symmetric", "pstable", "max")


class NoClosedForm(ValueError):
    """No closed-form expression for the requested (spec, parameter) pair."""


@dataclass(frozen=True)
class ConvSpec:
    """One algebra from the catalog. Use the class constructors or :meth:`parse`."""

    kind: str
    param: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown convolution kind {self.kind!r}")
        if self.kind in ("classic", "max"):
            if self.param is not None:
                raise ValueError(f"{self.kind} takes no parameter")
            return
        if self.param is None:
            raise ValueError(f"{self.kind} needs a parameter")
        v = float(self.param)
        object.__setattr__(self, "param", v)
        if self.kind == "kingman":
            if not v >= -0.5:
                raise ValueError("Kingman needs s >= -1/2")
        elif not (v > 0 and math.isfinite(v)):
            raise ValueError(f"{self.kind} needs a positive finite parameter")

    @classmethod
    def classic(cls):
        return cls("classic")

    @classmethod
    def max(cls):
        return cls("max")

    @classmethod
    def symmetric(cls, alpha: float = 1.0):
        return cls("symmetric", alpha)

    @classmethod
    def pstable(cls, p: float):
        return cls("pstable", p)

    @classmethod
    def kendall(cls, alpha: float):
        return cls("kendall", alpha)

    @classmethod
    def kingman(cls, s: float):
        return cls("kingman", s)

    @classmethod
    def parse(cls, text: str) -> "ConvSpec":
        """Parse ``kendall:a=0.7``, ``pstable:p=1.5``, ``kingman:s=0.5``, ``max`` ..."""
        m = re.fullmatch(r"\s*([a-z]+)\s*(?::\s*([a-z]+)\s*=\s*([-+0-9.eE]+))?\s*", text)
        if not m:
            raise ValueError(f"cannot parse convolution spec {text!r}")
        kind, key, val = m.groups()
        if kind not in KINDS:
            raise ValueError(f"unknown convolution kind {kind!r}")
        if key is None:
            return cls(kind)
        if key != _PARAM_NAME.get(kind):
            raise ValueError(f"{kind} expects parameter {_PARAM_NAME.get(kind)!r}, got {key!r}")
        return cls(kind, float(val))

    def __str__(self):
        if self.param is None:
            return self.kind
        return f"{self.kind}:{_PARAM_NAME[self.kind]}={self.param:g}"

    @property
    def atomic(self) -> bool:
        return self.kind in _ATOMIC or (self.kind == "kingman" and self.param == -0.5)


# ---------------------------------------------------------------------------
# kernels


def pareto_grid(scale: float, index: float, n: int = 4001, tail: float = 1e-9) -> GridDensity:
    """``T_scale`` of the Pareto law with density ``index * x**(-index-1)`` on ``[1, inf)``."""
    upper = tail ** (-1.0 / index)
    z = np.geomspace(1.0, upper, n)
    dens = index * z ** (-index - 1.0) / scale
    return GridDensity(scale * z, dens, tail_mass=tail, tail_index=index)


def kingman_theta_density(s: float, u):
    u = np.asarray(u, dtype=float)
    c = math.exp(special.gammaln(s + 1) - special.gammaln(s + 0.5)) / math.sqrt(math.pi)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(np.abs(u) < 1, c * (1 - u * u) ** (s - 0.5), 0.0)


def kingman_theta_sample(s: float, rng, size: int) -> np.ndarray:
    """theta_s = 2B - 1, B ~ Beta(s+1/2, s+1/2); Rademacher when s = -1/2."""
    g = as_generator(rng)
    if s == -0.5:
        return g.choice([-1.0, 1.0], size=size)
    a = g.standard_gamma(s + 0.5, size)
    b = g.standard_gamma(s + 0.5, size)
    return (a - b) / (a + b)


def _check_nonneg(*vals):
    for v in vals:
        if np.any(np.asarray(v) < 0):
            raise ValueError("kernel arguments must be nonnegative")


def kernel_measure(spec: ConvSpec, x: float, y: float, n_grid: int = 4001) -> Measure:
    """The exact law ``delta_x * delta_y``."""
    _check_nonneg(x, y)
    x, y = float(x), float(y)
    if x == 0 or y == 0:
        return dirac(max(x, y))
    k, a = spec.kind, spec.param
    if k == "classic":
        return dirac(x + y)
    if k == "max":
        return dirac(max(x, y))
    if k == "pstable":
        return dirac(_pnorm(x, y, a))
    if k == "symmetric":
        lo = abs(x**a - y**a) ** (1.0 / a)
        return DiracMix.from_pairs([(lo, 0.5), (_pnorm(x, y, a), 0.5)])
    if k == "kendall":
        small, big = sorted((x, y))
        w = (small / big) ** a
        cont = pareto_grid(big, 2 * a, n_grid)
        return mixture([(w, cont), (1 - w, dirac(big))])
    # kingman
    if a == -0.5:
        return DiracMix.from_pairs([(abs(x - y), 0.5), (x + y, 0.5)])
    # theta grid clustered at +-1 where the density of theta may blow up
    u = np.linspace(0.0, 1.0, n_grid)
    edge = 1e-6 if a < 0.5 else 0.0
    theta = -np.cos(np.pi * (edge + (1 - 2 * edge) * u))
    r = np.sqrt(np.maximum(x * x + y * y + 2 * x * y * theta, 0.0))
    r, idx = np.unique(r, return_index=True)
    dens = kingman_theta_density(a, theta[idx]) * r / (x * y)
    return GridDensity(r, np.nan_to_num(dens, posinf=0.0))


def _pnorm(x, y, p):
    big = np.maximum(x, y)
    small = np.minimum(x, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(big > 0, small / np.where(big > 0, big, 1.0), 0.0)
    return big * (1.0 + ratio**p) ** (1.0 / p)


def kernel_sample(spec: ConvSpec, x, y, rng, size: int | None = None) -> np.ndarray:
    """Draws from ``delta_x * delta_y``, vectorized over broadcast ``x`` and ``y``."""
    _check_nonneg(x, y)
    g = as_generator(rng)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast_shapes(x.shape, y.shape) if size is None else (size,)
    x = np.broadcast_to(x, shape)
    y = np.broadcast_to(y, shape)
    k, a = spec.kind, spec.param
    if k == "classic":
        return x + y
    if k == "max":
        return np.maximum(x, y).copy()
    if k == "pstable":
        return _pnorm(x, y, a)
    if k == "symmetric":
        sign = g.choice([-1.0, 1.0], size=shape)
        return np.abs(x**a + sign * y**a) ** (1.0 / a)
    if k == "kendall":
        big = np.maximum(x, y)
        small = np.minimum(x, y)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(big > 0, (small / np.where(big > 0, big, 1.0)) ** a, 0.0)
        jump = g.random(shape) < w
        u = g.random(shape)
        return np.where(jump, big * (1.0 - u) ** (-1.0 / (2 * a)), big)
    theta = kingman_theta_sample(a, g, int(np.prod(shape))).reshape(shape)
    return np.sqrt(np.maximum(x * x + y * y + 2 * x * y * theta, 0.0))


# ---------------------------------------------------------------------------
# transform kernel and exponent


_KINGMAN_QUAD_MAX = 40.0


@lru_cache(maxsize=64)
def _jacobi_rule(s: float, n: int):
    nodes, weights = special.roots_jacobi(n, s - 0.5, s - 0.5)
    return nodes, weights / weights.sum()


def _kingman_omega(s: float, t: np.ndarray) -> np.ndarray:
    if s == -0.5:
        return np.cos(t)
    out = np.empty_like(t)
    small = t <= _KINGMAN_QUAD_MAX
    if np.any(small):
        ts = t[small]
        nodes, weights = _jacobi_rule(s, 48 + int(math.ceil(ts.max())))
        out[small] = np.cos(np.multiply.outer(ts, nodes)) @ weights
    if np.any(~small):
        # same integral in closed form; the quadrature rule would need O(t) nodes
        tl = t[~small]
        out[~small] = np.exp(special.gammaln(s + 1) + s * np.log(2.0 / tl)) * special.jv(s, tl)
    return out


def omega(spec: ConvSpec, t):
    """Kernel ``Omega(t)`` of the generalized characteristic function."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("omega needs t >= 0")
    k, a = spec.kind, spec.param
    if k == "classic":
        out = np.exp(-t_arr)
    elif k == "pstable":
        out = np.exp(-(t_arr**a))
    elif k == "kendall":
        out = np.clip(1.0 - t_arr**a, 0.0, None)
    elif k == "max":
        out = (t_arr <= 1.0).astype(float)
    elif k == "symmetric":
        # E cos(t^a * theta) with theta = +-1 equiprobable
        out = np.cos(t_arr**a)
    else:
        out = _kingman_omega(a, t_arr.ravel()).reshape(t_arr.shape)
    return float(out) if np.ndim(t) == 0 else out


def one_minus_omega(spec: ConvSpec, t):
    """``1 - omega(t)`` without cancellation for small ``t``."""
    t_arr = np.asarray(t, dtype=float)
    k, a = spec.kind, spec.param
    if k == "classic":
        out = -np.expm1(-t_arr)
    elif k == "pstable":
        out = -np.expm1(-(t_arr**a))
    elif k == "symmetric":
        out = 2.0 * np.sin(0.5 * t_arr**a) ** 2
    elif k == "kingman" and a != -0.5:
        out = 1.0 - np.asarray(omega(spec, t_arr), dtype=float)
        small = t_arr < 0.5
        if np.any(small):
            # alternating Bessel series; 12 terms are exact to double precision below 0.5
            q = (t_arr[small] / 2.0) ** 2
            term = np.ones_like(q)
            acc = np.zeros_like(q)
            for j in range(1, 13):
                term = -term * q / (j * (j + a))
                acc -= term
            out = np.where(small, 0.0, out)
            out[small] = acc
    elif k == "kingman":
        out = 2.0 * np.sin(0.5 * t_arr) ** 2
    else:
        out = 1.0 - np.asarray(omega(spec, t_arr), dtype=float)
    return float(out) if np.ndim(t) == 0 else out


def omega_breakpoints(spec: ConvSpec, t: float) -> tuple[float, ...]:
    """Points where ``x -> omega(spec, t*x)`` is not smooth."""
    if spec.kind in ("kendall", "max") and t > 0:
        return (1.0 / t,)
    return ()


def kappa(spec: ConvSpec) -> float:
    k, a = spec.kind, spec.param
    return {
        "classic": 1.0,
        "pstable": a,
        "kendall": a,
        "kingman": 2.0,
        "max": math.inf,
        "symmetric": 2.0 * (a or 1.0),
    }[k]


# ---------------------------------------------------------------------------
# stable laws sigma_p


def _check_p(spec: ConvSpec, p: float):
    if not 0 < p <= kappa(spec) or (math.isinf(p)):
        if not (spec.kind == "max" and math.isinf(p)):
            raise ValueError(f"p={p} outside (0, kappa={kappa(spec)}] for {spec}")


def stable_density(spec: ConvSpec, p: float, x):
    """Closed-form density of ``sigma_p`` where one is known.

    Kendall (any ``p <= alpha``) and Max (finite ``p``) give the density of
    ``sigma_p`` itself. For Kingman (``p`` in {1, 2}) the classical formulas
    are densities of the *squared* radial variable: if ``V`` has this
    density, ``sqrt(V)`` has generalized characteristic function
    ``exp(-t)`` (``p=1``) and ``exp(-t**2/2)`` (``p=2``).
    """
    _check_p(spec, p)
    x = np.asarray(x, dtype=float)
    k, a = spec.kind, spec.param
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        pos = x > 0
        xp = np.where(pos, x, 1.0)
        if k == "max" and math.isfinite(p):
            val = p * xp ** (-p - 1) * np.exp(-(xp ** (-p)))
        elif k == "kendall":
            val = p * xp ** (-p - 1) * (1 - p / a + (p / a) * xp ** (-p)) * np.exp(-(xp ** (-p)))
        elif k == "kingman" and p == 1:
            s = a
            c = math.exp(special.gammaln(s + 1.5) - special.gammaln(s + 1)) / math.sqrt(math.pi)
            val = c * xp**s / (1 + xp) ** (s + 1.5)
        elif k == "kingman" and p == 2:
            s = a
            val = xp**s * np.exp(-xp / 2) / (2 ** (s + 1) * math.gamma(s + 1))
        else:
            raise NoClosedForm(f"no closed-form stable density for {spec} at p={p}")
        out = np.where(pos, np.nan_to_num(val, nan=0.0, posinf=0.0), 0.0)
    return float(out) if out.ndim == 0 else out


def stable_cdf(spec: ConvSpec, p: float, x):
    """Closed-form CDF of ``sigma_p`` for the Kendall and Max algebras."""
    _check_p(spec, p)
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        y = np.where(x > 0, np.where(x > 0, x, 1.0) ** (-p), np.inf)
        if spec.kind == "max":
            out = np.exp(-y)
        elif spec.kind == "kendall":
            r = p / spec.param
            out = ((1 - r) + r * (1 + y)) * np.exp(-y)
        else:
            raise NoClosedForm(f"no closed-form stable CDF for {spec}")
        out = np.where(x > 0, np.nan_to_num(out, nan=0.0), 0.0)
    return float(out) if out.ndim == 0 else out


def stable_sample(spec: ConvSpec, p: float, rng, size: int) -> np.ndarray:
    """Draws from ``sigma_p``, the law with generalized characteristic function ``exp(-t**p)``.

    Below the exponent ``kappa`` every algebra uses the subordination
    ``sigma_p = sigma_kappa scaled by S**(1/kappa)`` with ``S`` one-sided
    ``p/kappa``-stable; Kendall and Max use their exact closed forms.
    """
    _check_p(spec, p)
    g = as_generator(rng)
    k, a = spec.kind, spec.param
    if k == "max":
        if math.isinf(p):
            return np.ones(size)
        return g.standard_exponential(size) ** (-1.0 / p)
    if k == "kendall":
        frechet = g.random(size) >= p / a
        e = np.where(frechet, g.standard_exponential(size), g.standard_gamma(2.0, size))
        return e ** (-1.0 / p)
    kap = kappa(spec)
    if k in ("classic", "pstable"):
        base = np.ones(size)
    elif k == "kingman":
        base = np.sqrt(2.0 * g.gamma(a + 1.0, 2.0, size))
    else:  # symmetric: omega = cos(t^a), base^a ~ |N(0, 2)|
        base = np.abs(g.normal(0.0, math.sqrt(2.0), size)) ** (1.0 / a)
    if p == kap:
        return base
    s = positive_stable_sample(p / kap, g, size)
    return base * s ** (1.0 / kap)


def stable_measure(spec: ConvSpec, p: float, n: int = 40001, tail: float = 1e-10) -> GridDensity:
    """``sigma_p`` tabulated on a log grid (Kendall and finite-p Max only)."""
    if spec.kind not in ("kendall", "max") or math.isinf(p):
        raise NoClosedForm(f"no tabulated stable law for {spec}")
    lo = 60.0 ** (-1.0 / p)
    hi = (tail / 2) ** (-1.0 / p)
    x = np.geomspace(lo, hi, n)
    mass_above = 1.0 - stable_cdf(spec, p, hi)
    mass_below = stable_cdf(spec, p, lo)
    return GridDensity(x, stable_density(spec, p, x), tail_mass=mass_above,
                       tail_index=p, lower_mass=mass_below)


# ---------------------------------------------------------------------------
# convolution of measures


def convolve(spec: ConvSpec, lam1: Measure, lam2: Measure, n: int = 100_000, rng=None) -> Measure:
    """``lam1 * lam2`` through the kernel identity.

    Two atomic inputs give an exact measure (atoms for atomic kernels, an
    atom/grid mixture for Kendall and Kingman). Anything else is estimated by
    ``n`` kernel draws and returned as :class:`Empirical`.
    """
    if isinstance(lam1, DiracMix) and isinstance(lam2, DiracMix):
        if spec.atomic:
            pairs = []
            for x, p in zip(lam1.points, lam1.weights):
                for y, q in zip(lam2.points, lam2.weights):
                    km = kernel_measure(spec, x, y)
                    pairs.extend((pt, p * q * w) for pt, w in zip(km.points, km.weights))
            return DiracMix.from_pairs(pairs)
        parts = [(p * q, kernel_measure(spec, x, y))
                 for x, p in zip(lam1.points, lam1.weights)
                 for y, q in zip(lam2.points, lam2.weights)]
        return mixture(parts)
    if rng is None:
        raise ValueError("Monte Carlo convolution needs an rng")
    g = as_generator(rng)
    xs = lam1.sample(g, n)
    ys = lam2.sample(g, n)
    return Empirical(kernel_sample(spec, xs, ys, g))
