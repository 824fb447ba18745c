"""Weakly stable generators ``mu``, their representable ``(Theta, chi)`` pairs,
weak-sum chains and the weak Levy-Khintchine evaluator.

Draws from ``mu`` are always returned with shape ``(size, dim)``.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .convolutions import ConvSpec, omega, omega_breakpoints, one_minus_omega
from .measures import as_generator
from .stable import symmetric_stable_sample

__all__ = [
    "WeaklyStableLaw",
    "RepresentablePair",
    "SpectralMeasure",
    "WeakLevyTriple",
    "mu_cf",
    "mu_sample",
    "mu_one_minus_cf",
    "representable_pair",
    "weak_sum_chain",
    "weak_lk_cf",
    "kendall_stable_spectral",
    "sphere_stable_spectral",
    "fejer_sample",
]

LAW_KINDS = ("sas", "sphere", "kendallmu", "twopoint")


@dataclass(frozen=True)
class WeaklyStableLaw:
    kind: str
    param: float | None = None

    def __post_init__(self):
        if self.kind not in LAW_KINDS:
            raise ValueError(f"unknown weakly stable law {self.kind!r}")
        p = self.param
        if self.kind == "twopoint":
            if p is not None:
                raise ValueError("twopoint takes no parameter")
        elif self.kind == "sas" and not (p is not None and 0 < p <= 2):
            raise ValueError("symmetric stable needs p in (0, 2]")
        elif self.kind == "sphere" and not (p is not None and float(p).is_integer() and p >= 2):
            raise ValueError("sphere needs an integer dimension n >= 2")
        elif self.kind == "kendallmu" and not (p is not None and 0 < p <= 1):
            raise ValueError("Kendall generator needs alpha in (0, 1]")
        if p is not None:
            object.__setattr__(self, "param", float(p))

    @classmethod
    def two_point(cls):
        return cls("twopoint")

    @classmethod
    def symmetric_stable(cls, p: float):
        return cls("sas", p)

    @classmethod
    def sphere(cls, n: int):
        return cls("sphere", n)

    @classmethod
    def kendall(cls, alpha: float):
        return cls("kendallmu", alpha)

    @classmethod
    def parse(cls, text: str) -> "WeaklyStableLaw":
        """``sas:p=1.5``, ``sphere:n=3``, ``kendallmu:a=1`` or ``twopoint``."""
        m = re.fullmatch(r"\s*([a-z]+)\s*(?::\s*([a-z]+)\s*=\s*([-+0-9.eE]+))?\s*", text)
        if not m:
            raise ValueError(f"cannot parse law {text!r}")
        kind, key, val = m.groups()
        expected = {"sas": "p", "sphere": "n", "kendallmu": "a"}.get(kind)
        if key is None:
            return cls(kind)
        if key != expected:
            raise ValueError(f"{kind} expects parameter {expected!r}, got {key!r}")
        return cls(kind, float(val))

    def __str__(self):
        if self.param is None:
            return self.kind
        key = {"sas": "p", "sphere": "n", "kendallmu": "a"}[self.kind]
        return f"{self.kind}:{key}={self.param:g}"

    @property
    def dim(self) -> int:
        return int(self.param) if self.kind == "sphere" else 1

    @property
    def kappa(self) -> float:
        if self.kind == "sas":
            return self.param
        if self.kind == "kendallmu":
            return self.param
        return 2.0

    def conv_spec(self) -> ConvSpec:
        """The generalized convolution on the half-line that this law generates."""
        if self.kind == "sas":
            return ConvSpec.pstable(self.param)
        if self.kind == "kendallmu":
            return ConvSpec.kendall(self.param)
        if self.kind == "sphere":
            return ConvSpec.kingman((self.param - 2.0) / 2.0)
        return ConvSpec.kingman(-0.5)


def mu_cf(law: WeaklyStableLaw, t):
    """Characteristic function of ``<e_1, X>``; equals the kernel of ``law.conv_spec()``."""
    t = np.abs(np.asarray(t, dtype=float))
    return omega(law.conv_spec(), t)


def mu_one_minus_cf(law: WeaklyStableLaw, t):
    return one_minus_omega(law.conv_spec(), np.abs(np.asarray(t, dtype=float)))


def fejer_sample(rng, size: int) -> np.ndarray:
    """Density ``(1 - cos x) / (pi x^2)``, characteristic function ``(1 - |t|)_+``.

    Rejection from ``min(1/(2 pi), 2/(pi x^2))``: half its mass is uniform on
    ``[-2, 2]`` and half is ``+-2/U``.
    """
    g = as_generator(rng)
    out = np.empty(size)
    filled = 0
    while filled < size:
        m = int(1.3 * (size - filled)) + 16
        body = g.random(m) < 0.5
        x = np.where(body, g.uniform(-2.0, 2.0, m), 2.0 / (1.0 - g.random(m)))
        x = np.where(~body & (g.random(m) < 0.5), -x, x)
        env = np.minimum(1.0 / (2 * np.pi), 2.0 / (np.pi * x * x))
        with np.errstate(invalid="ignore", divide="ignore"):
            target = np.where(x == 0, 1.0 / (2 * np.pi), (1.0 - np.cos(x)) / (np.pi * x * x))
        keep = x[g.random(m) * env <= target]
        take = min(keep.size, size - filled)
        out[filled:filled + take] = keep[:take]
        filled += take
    return out


def mu_sample(law: WeaklyStableLaw, rng, size: int) -> np.ndarray:
    g = as_generator(rng)
    k = law.kind
    if k == "twopoint":
        x = g.choice([-1.0, 1.0], size=size)
    elif k == "sas":
        x = symmetric_stable_sample(law.param, g, size)
    elif k == "sphere":
        v = g.standard_normal((size, law.dim))
        return v / np.linalg.norm(v, axis=1, keepdims=True)
    else:
        # (1 - |t|^a)_+ is a scale mixture of Fejer laws: divide by R where
        # R = 1 with probability a, else R = U^(1/a)
        a = law.param
        f = fejer_sample(g, size)
        r = np.where(g.random(size) < a, 1.0, g.random(size) ** (1.0 / a))
        x = f / r
    return x.reshape(size, 1)


@dataclass(frozen=True)
class RepresentablePair:
    """Maps with ``s x + t y = theta(s, x, t, y) * chi(s, x, t, y)`` pointwise.

    ``x`` and ``y`` have shape ``(n, dim)``; ``s`` and ``t`` broadcast against ``n``.
    Where ``theta`` vanishes, ``chi`` returns ``x`` (``+1`` for the two-point law).
    """

    law: WeaklyStableLaw
    theta_fn: Callable = field(repr=False)

    def theta(self, s, x, t, y) -> np.ndarray:
        return self.split(s, x, t, y)[0]

    def chi(self, s, x, t, y) -> np.ndarray:
        return self.split(s, x, t, y)[1]

    def split(self, s, x, t, y):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y = np.atleast_2d(np.asarray(y, dtype=float))
        lead = np.broadcast_shapes(x.shape[:-1], y.shape[:-1], np.shape(s), np.shape(t))
        s = np.broadcast_to(np.asarray(s, dtype=float), lead)
        t = np.broadcast_to(np.asarray(t, dtype=float), lead)
        x = np.broadcast_to(x, lead + x.shape[-1:])
        y = np.broadcast_to(y, lead + y.shape[-1:])
        v = s[..., None] * x + t[..., None] * y
        th = np.asarray(self.theta_fn(s, x, t, y), dtype=float)
        zero = th == 0
        safe = np.where(zero, 1.0, th)
        chi = v / safe[..., None]
        if np.any(zero):
            fallback = np.ones_like(x) if self.law.kind == "twopoint" else x
            chi = np.where(zero[..., None], fallback, chi)
        return th, chi


def _theta_norm(s, x, t, y):
    return np.linalg.norm(s[..., None] * x + t[..., None] * y, axis=-1)


def representable_pair(law: WeaklyStableLaw) -> RepresentablePair:
    if law.kind in ("twopoint", "sphere"):
        return RepresentablePair(law, _theta_norm)
    if law.kind == "sas":
        p = law.param

        def theta(s, x, t, y):
            return (np.abs(s) ** p + np.abs(t) ** p) ** (1.0 / p)

        return RepresentablePair(law, theta)
    raise NotImplementedError("no constructive (Theta, chi) pair is known for the Kendall generator")


def weak_sum_chain(law: WeaklyStableLaw, pair: RepresentablePair, thetas, rng, size: int | None = None):
    """Fold ``theta_1 X_1, theta_2 X_2, ...`` through the pair.

    ``thetas`` has shape ``(n,)`` or ``(size, n)``. Returns ``S`` ``(size, n)``,
    ``chi`` and ``Z = S * chi`` (both ``(size, n, dim)``), where
    ``Z[:, k] == sum_{i<=k} theta_i X_i``.
    """
    g = as_generator(rng)
    th = np.asarray(thetas, dtype=float)
    if th.ndim == 1:
        th = np.broadcast_to(th, (size or 1, th.size))
    m, n = th.shape
    d = law.dim
    S = np.zeros((m, n))
    chi = np.zeros((m, n, d))
    xs = mu_sample(law, g, m * n).reshape(n, m, d)
    s_cur, c_cur = pair.split(th[:, 0], xs[0], np.zeros(m), xs[0])
    S[:, 0], chi[:, 0] = s_cur, c_cur
    for k in range(1, n):
        s_cur, c_cur = pair.split(s_cur, c_cur, th[:, k], xs[k])
        S[:, k], chi[:, k] = s_cur, c_cur
    return S, chi, S[..., None] * chi


@dataclass(frozen=True)
class SpectralMeasure:
    """A measure on ``(0, inf)``: atoms, an optional density and scaled copies of other spectral measures.

    ``components`` holds ``(weight, scale, measure)``: ``weight`` times the
    image of ``measure`` under ``s -> scale * s``.
    """

    atoms: tuple[tuple[float, float], ...] = ()
    density: Callable | None = field(default=None, repr=False)
    breakpoints: tuple[float, ...] = ()
    components: tuple[tuple[float, float, "SpectralMeasure"], ...] = ()

    def integrate(self, g: Callable[[float], float], kinks: tuple[float, ...] = ()) -> float:
        """``int g dnu``; ``kinks`` are points where ``g`` is not smooth."""
        total = sum(w * g(s) for s, w in self.atoms)
        if self.density is not None:
            # geometric cuts keep each piece short enough for oscillating integrands
            pts = sorted({0.0, *self.breakpoints, *kinks, *(4.0**k for k in range(-4, 9))})
            dens = self.density
            top = pts[-1]
            with warnings.catch_warnings():
                # far pieces of oscillating integrands trip roundoff notices at negligible size
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                for lo, hi in zip(pts[:-1], pts[1:]):
                    val, _ = integrate.quad(lambda s: g(s) * dens(s), lo, hi, limit=200,
                                            epsabs=1e-13, epsrel=1e-10)
                    total += val
                # s = top * e^v turns a power-law tail into an exponentially decaying one
                val, _ = integrate.quad(
                    lambda v: g(top * math.exp(v)) * dens(top * math.exp(v)) * top * math.exp(v),
                    0.0, 600.0, limit=200, epsabs=1e-13, epsrel=1e-10)
                total += val
        for w, c, m in self.components:
            total += w * m.integrate(lambda s, c=c: g(c * s), tuple(k / c for k in kinks))
        return total

    def scaled(self, weight: float, scale: float) -> "SpectralMeasure":
        return SpectralMeasure(components=((weight, scale, self),))

    @staticmethod
    def combine(parts) -> "SpectralMeasure":
        return SpectralMeasure(components=tuple(parts))


@dataclass(frozen=True)
class WeakLevyTriple:
    """``(A, nu)`` with ``nu`` the folded weak Levy measure on ``(0, inf)``."""

    law: WeaklyStableLaw
    A: float = 0.0
    nu: SpectralMeasure = field(default_factory=SpectralMeasure)

    def __post_init__(self):
        if self.A < 0:
            raise ValueError("A must be nonnegative")


def weak_lk_cf(triple: WeakLevyTriple, t: float) -> float:
    """``exp(-A |t|^kappa - int (1 - mu_cf(t s)) nu(ds))``."""
    law = triple.law
    t = abs(float(t))
    expo = -triple.A * t**law.kappa if triple.A else 0.0
    kinks = omega_breakpoints(law.conv_spec(), t)
    integral = triple.nu.integrate(lambda s: float(mu_one_minus_cf(law, t * s)), kinks)
    if not math.isfinite(integral):
        raise ArithmeticError(f"weak L-K integral diverged at t={t}")
    return math.exp(expo - integral)


def kendall_stable_spectral(alpha: float, p: float) -> SpectralMeasure:
    """``nu(ds) = p (alpha - p) / alpha * s^{-p-1} ds``: weak exponent ``|t|^p`` for the Kendall generator."""
    if not 0 < p < alpha:
        raise ValueError("need 0 < p < alpha")
    c = p * (alpha - p) / alpha
    return SpectralMeasure(density=lambda s: c * s ** (-p - 1.0))


def sphere_stable_spectral(n: int, p: float) -> SpectralMeasure:
    """``K r^{-p-1} dr`` with ``K`` fitted so the weak exponent is exactly ``|t|^p`` (sphere in R^n)."""
    if not 0 < p < 2:
        raise ValueError("need 0 < p < 2")
    law = WeaklyStableLaw.sphere(n)
    unit = SpectralMeasure(density=lambda r: r ** (-p - 1.0))
    k = 1.0 / unit.integrate(lambda r: float(mu_one_minus_cf(law, r)))
    return SpectralMeasure(density=lambda r: k * r ** (-p - 1.0))
