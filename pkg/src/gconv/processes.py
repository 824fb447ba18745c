"""Markov chains with transitions ``P_{s,t}(x, .) = delta_x * lambda_{s,t}``, the
Chapman-Kolmogorov checker, and integral processes driven by step functions."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .convolutions import ConvSpec, kappa, kernel_sample, omega_breakpoints, stable_sample
from .gcf import LevyTriple, lk_integrand, upsilon
from .infdiv import CompoundPoissonSpec, cpoisson_sample
from .measures import DiracMix, GridDensity, Measure, Mixture, as_generator, format_number, quadrature

__all__ = [
    "PathRecord",
    "StepFunction",
    "IncrementFamily",
    "StableFamily",
    "CompoundPoissonFamily",
    "LevyFamily",
    "ConstantFamily",
    "ScaledFamily",
    "CKReport",
    "transition_sample",
    "simulate_levy",
    "ck_check",
    "levy_jump_law",
    "integral_process_gcf",
    "simulate_integral_process",
    "hill_estimator",
]


@dataclass(frozen=True, eq=False)
class PathRecord:
    """``states[i, k]`` is path ``i`` at ``times[k]`` (a trailing axis holds vector states)."""

    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or t.size < 1 or np.any(np.diff(t) <= 0) or t[0] < 0:
            raise ValueError("times must be strictly increasing and nonnegative")
        s = np.asarray(self.states, dtype=float)
        if s.ndim == 1:
            s = s[None, :]
        if s.shape[1] != t.size:
            raise ValueError("states do not match the time grid")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", s)

    @property
    def terminal(self) -> np.ndarray:
        return self.states[:, -1]

    def to_csv(self) -> str:
        rows = ["path_id,t,state"]
        for i, path in enumerate(self.states):
            rows.extend(f"{i},{format_number(t)},{format_number(v)}" for t, v in zip(self.times, path))
        return "\n".join(rows) + "\n"


_CELL = re.compile(r"\s*([-+0-9.eE]+)\s*@\s*\[\s*([-+0-9.eE]+)\s*,\s*([-+0-9.eE]+)\s*\)\s*")


@dataclass(frozen=True, eq=False)
class StepFunction:
    """``f = sum_k values[k] * 1[breakpoints[k], breakpoints[k+1])``, zero elsewhere."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if b.ndim != 1 or b.size != v.size + 1 or v.size < 1:
            raise ValueError("need n+1 breakpoints for n values")
        if b[0] < 0 or np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be nonnegative and strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, value: float, start: float, stop: float) -> "StepFunction":
        return cls([start, stop], [value])

    @classmethod
    def parse(cls, text: str) -> "StepFunction":
        """``"a1@[t0,t1);a2@[t1,t2)"`` with contiguous cells."""
        cells = [c for c in text.split(";") if c.strip()]
        if not cells:
            raise ValueError("empty step function")
        bps, vals = [], []
        for c in cells:
            m = _CELL.fullmatch(c)
            if not m:
                raise ValueError(f"cannot parse cell {c!r}")
            a, lo, hi = map(float, m.groups())
            if bps and lo != bps[-1]:
                raise ValueError("cells must be contiguous and in order")
            if not bps:
                bps.append(lo)
            bps.append(hi)
            vals.append(a)
        return cls(bps, vals)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        i = np.searchsorted(self.breakpoints, x, side="right") - 1
        inside = (i >= 0) & (i < self.values.size)
        return np.where(inside, self.values[np.clip(i, 0, self.values.size - 1)], 0.0)

    def cells(self):
        b = self.breakpoints
        return [(b[k], b[k + 1], self.values[k]) for k in range(self.values.size)]

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def scaled(self, c: float) -> "StepFunction":
        return StepFunction(self.breakpoints, c * self.values)

    def same_function(self, other: "StepFunction") -> bool:
        pts = np.union1d(self.breakpoints, other.breakpoints)
        mids = 0.5 * (pts[:-1] + pts[1:])
        return bool(np.allclose(self(mids), other(mids), rtol=0, atol=1e-12))

    def moment(self, k: float, s: float = -math.inf, t: float = math.inf) -> float:
        """``int_s^t |f|^k dx``."""
        lo = np.clip(self.breakpoints[:-1], s, t)
        hi = np.clip(self.breakpoints[1:], s, t)
        return float(np.sum(np.abs(self.values) ** k * (hi - lo)))


# ---------------------------------------------------------------------------
# increment families


class IncrementFamily(Protocol):
    spec: ConvSpec

    def sample(self, dt: float, rng, size: int) -> np.ndarray: ...


@dataclass(frozen=True)
class StableFamily:
    """``lambda_dt = T_{scale * dt**(1/p)} sigma_p``."""

    spec: ConvSpec
    p: float
    scale: float = 1.0

    def sample(self, dt, rng, size):
        if math.isinf(self.p):
            return np.full(size, self.scale)
        return self.scale * dt ** (1.0 / self.p) * stable_sample(self.spec, self.p, rng, size)


@dataclass(frozen=True)
class CompoundPoissonFamily:
    """``lambda_dt = Exp(rate * dt * jump)``."""

    spec: ConvSpec
    rate: float
    jump: Measure

    def sample(self, dt, rng, size):
        if dt * self.rate == 0:
            return np.zeros(size)
        return cpoisson_sample(CompoundPoissonSpec(self.spec, self.rate * dt, self.jump), rng, size)


@dataclass(frozen=True)
class ConstantFamily:
    """The same law for every step length (consistent only for ``delta_0``)."""

    spec: ConvSpec
    law: Measure

    def sample(self, dt, rng, size):
        return self.law.sample(rng, size)


@dataclass(frozen=True)
class ScaledFamily:
    base: IncrementFamily
    c: float

    @property
    def spec(self):
        return self.base.spec

    def sample(self, dt, rng, size):
        if self.c == 0:
            return np.zeros(size)
        return abs(self.c) * self.base.sample(dt, rng, size)


def _restrict(m: Measure, eps: float, weight) -> tuple[float, Measure | None]:
    """``(mass, law)`` of ``weight(x) m(dx)`` restricted to ``x >= eps``."""
    if isinstance(m, DiracMix):
        keep = m.points >= eps
        w = m.weights[keep] * weight(m.points[keep])
        if w.sum() <= 0:
            return 0.0, None
        return float(w.sum()), DiracMix(m.points[keep], w / w.sum())
    if isinstance(m, GridDensity):
        x = m.x[m.x >= eps]
        if eps > m.x[0]:
            x = np.concatenate([[eps], x[x > eps]])
        f = np.interp(x, m.x, m.density) * weight(x)
        body = float(np.trapezoid(f, x)) if x.size > 1 else 0.0
        tail = m.tail_mass * float(weight(np.array([m.x[-1]]))[0])
        total = body + tail
        if total <= 0:
            return 0.0, None
        return total, GridDensity(x, f, tail_mass=tail / total, tail_index=m.tail_index)
    if isinstance(m, Mixture):
        parts = [(w * mm, law) for w, c in zip(m.weights, m.components)
                 for mm, law in [_restrict(c, eps, weight)] if law is not None]
        total = sum(w for w, _ in parts)
        if total <= 0:
            return 0.0, None
        return total, Mixture(tuple(w / total for w, _ in parts), tuple(l for _, l in parts))
    raise TypeError(f"cannot restrict {type(m).__name__}")


def _default_eps(m: Measure) -> float:
    if isinstance(m, GridDensity):
        cdf = m.cdf(m.x)
        return float(m.x[min(np.searchsorted(cdf, 1e-3), m.x.size - 1)])
    return 0.0


def levy_jump_law(triple: LevyTriple, eps: float | None = None):
    """Rate and jump law of the Levy measure ``m(dx) / upsilon(x)`` restricted to ``x >= eps``.

    Returns ``(rate, law, eps)``; ``law`` is ``None`` when nothing is left.
    """
    if not triple.has_jumps:
        return 0.0, None, 0.0
    if eps is None:
        eps = _default_eps(triple.m_law)
    spec, x0 = triple.spec, triple.x0
    mass, law = _restrict(triple.m_law, eps, lambda x: 1.0 / upsilon(spec, np.maximum(x, 1e-300), x0))
    return triple.m_mass * mass, law, eps


@dataclass(frozen=True)
class LevyFamily:
    """Increments of the process with ``Phi_{lambda_dt} = lk_gcf(triple)**dt``.

    The Levy measure is truncated below ``eps`` (no small-jump compensation);
    :meth:`truncation_error` bounds the resulting error in the exponent.
    """

    triple: LevyTriple
    eps: float | None = None
    _jumps: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rate, law, eps = levy_jump_law(self.triple, self.eps)
        object.__setattr__(self, "_jumps", (rate, law))
        object.__setattr__(self, "eps", eps)

    @property
    def spec(self):
        return self.triple.spec

    @property
    def jump_rate(self) -> float:
        return self._jumps[0]

    def sample(self, dt, rng, size):
        g = as_generator(rng)
        spec, A = self.triple.spec, self.triple.A
        out = np.zeros(size)
        if A > 0:
            k = kappa(spec)
            out = (A * dt) ** (1.0 / k) * stable_sample(spec, k, g, size)
        rate, law = self._jumps
        if law is not None and rate > 0:
            jumps = cpoisson_sample(CompoundPoissonSpec(spec, rate * dt, law), g, size)
            out = kernel_sample(spec, out, jumps, g)
        return out

    def truncation_error(self, t: float) -> float:
        """``int_{x < eps} |omega(t x) - 1| / upsilon(x) m(dx)``, the exponent error per unit time."""
        tr = self.triple
        if not tr.has_jumps or self.eps <= 0:
            return 0.0
        h = lk_integrand(tr, t)
        bps = omega_breakpoints(tr.spec, t) + (tr.x0, self.eps)
        return tr.m_mass * quadrature(tr.m_law, lambda x: np.where(x < self.eps, np.abs(h(x)), 0.0), bps)


# ---------------------------------------------------------------------------
# simulation


def transition_sample(spec: ConvSpec, x, lam: Measure, rng, size: int | None = None) -> np.ndarray:
    """Draw from ``delta_x * lam``."""
    g = as_generator(rng)
    n = size if size is not None else max(np.size(x), 1)
    return kernel_sample(spec, np.broadcast_to(np.asarray(x, float), (n,)), lam.sample(g, n), g)


def simulate_levy(spec: ConvSpec, family: IncrementFamily, grid, rng, n_paths: int = 1,
                  x0: float = 0.0) -> PathRecord:
    """Chain on ``grid`` started at ``x0``: ``X_{k+1} = X_k * increment(grid[k+1] - grid[k])``."""
    g = as_generator(rng)
    times = np.asarray(grid, dtype=float)
    states = np.empty((n_paths, times.size))
    states[:, 0] = x0
    for k in range(1, times.size):
        inc = family.sample(times[k] - times[k - 1], g, n_paths)
        states[:, k] = kernel_sample(spec, states[:, k - 1], inc, g)
    return PathRecord(times, states)


@dataclass(frozen=True)
class CKReport:
    thresholds: np.ndarray
    one_step: np.ndarray
    two_step: np.ndarray
    sigma: np.ndarray
    max_diff: float
    passed: bool
    samples: int

    @property
    def z_max(self) -> float:
        d = np.abs(self.one_step - self.two_step)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(self.sigma > 0, d / self.sigma, np.where(d > 0, np.inf, 0.0))
        return float(z.max())


def ck_check(spec: ConvSpec, family: IncrementFamily, s: float, t: float, u: float, x: float,
             thresholds=None, N: int = 200_000, rng=None, level: float = 3.0) -> CKReport:
    """Compare ``P_{s,u}(x, (-inf, c])`` with ``int P_{s,t}(x, dy) P_{t,u}(y, (-inf, c])``.

    ECDFs of ``N`` one-step and ``N`` two-step draws are compared at each
    threshold against ``level`` binomial standard deviations of the difference.
    """
    if not s < t < u:
        raise ValueError("need s < t < u")
    g = as_generator(rng)
    xs = np.full(N, float(x))
    one = kernel_sample(spec, xs, family.sample(u - s, g, N), g)
    mid = kernel_sample(spec, xs, family.sample(t - s, g, N), g)
    two = kernel_sample(spec, mid, family.sample(u - t, g, N), g)
    if thresholds is None:
        thresholds = np.quantile(np.concatenate([one, two]), [0.1, 0.3, 0.5, 0.7, 0.9])
    c = np.asarray(thresholds, dtype=float)
    f1 = (one[:, None] <= c).mean(axis=0)
    f2 = (two[:, None] <= c).mean(axis=0)
    pooled = 0.5 * (f1 + f2)
    sigma = np.sqrt(2.0 * pooled * (1.0 - pooled) / N)
    diff = np.abs(f1 - f2)
    passed = bool(np.all(diff <= level * sigma))
    return CKReport(c, f1, f2, sigma, float(diff.max()), passed, N)


def integral_process_gcf(triple: LevyTriple, f: StepFunction, s: float, t: float, u: float) -> float:
    """``exp(-A u^k int_s^t f^k - int_s^t int (1 - omega(u f(x) r)) / upsilon(r) m(dr) dx)``."""
    if np.any(f.values < 0):
        raise ValueError("the integrand must be nonnegative")
    spec = triple.spec
    k = kappa(spec)
    expo = 0.0
    if triple.A > 0:
        expo -= triple.A * u**k * f.moment(k, s, t)
    if triple.has_jumps:
        for lo, hi, a in f.cells():
            ell = max(0.0, min(hi, t) - max(lo, s))
            if ell == 0 or a == 0:
                continue
            h = lk_integrand(triple, u * a)
            bps = omega_breakpoints(spec, u * a) + (triple.x0,)
            val = triple.m_mass * quadrature(triple.m_law, h, bps)
            if not math.isfinite(val):
                raise ArithmeticError(f"integral diverged on cell [{lo}, {hi})")
            expo += ell * val
    return math.exp(expo)


def simulate_integral_process(base, f: StepFunction, grid, rng, n_paths: int = 1) -> PathRecord:
    """Increments on ``[g_k, g_{k+1})`` are ``T_a`` of base increments where ``f = a`` there.

    ``base`` is a :class:`LevyTriple` or an increment family. The grid must
    contain every breakpoint of ``f`` lying inside it.
    """
    family = LevyFamily(base) if isinstance(base, LevyTriple) else base
    times = np.asarray(grid, dtype=float)
    inner = f.breakpoints[(f.breakpoints > times[0]) & (f.breakpoints < times[-1])]
    if not np.all(np.isin(inner, times)):
        raise ValueError("grid does not refine the breakpoints of f")
    g = as_generator(rng)
    spec = family.spec
    states = np.zeros((n_paths, times.size))
    for k in range(1, times.size):
        a = float(f(0.5 * (times[k - 1] + times[k])))
        if a == 0:
            inc = np.zeros(n_paths)
        else:
            inc = abs(a) * family.sample(times[k] - times[k - 1], g, n_paths)
        states[:, k] = kernel_sample(spec, states[:, k - 1], inc, g)
    return PathRecord(times, states)


def hill_estimator(samples, k: int | None = None) -> float:
    """Hill estimate of the tail index from the ``k`` largest positive values."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    x = x[x > 0]
    if x.size < 3:
        raise ValueError("too few positive samples")
    if k is None:
        k = max(10, int(math.sqrt(x.size)))
    k = min(k, x.size - 1)
    top = x[-k:]
    return float(1.0 / np.mean(np.log(top / x[-k - 1])))
