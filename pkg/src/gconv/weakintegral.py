"""Weak stochastic integrals of step functions against a weak random measure."""

from __future__ import annotations

import math

import numpy as np

from .measures import as_generator, ks_distance
from .processes import StepFunction
from .weakmeasure import KSReport, WeakRandomMeasureSpec, sample_cell
from .weakstable import (
    SpectralMeasure,
    WeakLevyTriple,
    mu_one_minus_cf,
    mu_sample,
    representable_pair,
)
from .convolutions import omega_breakpoints

__all__ = [
    "weak_integral_pair",
    "weak_integral_sample",
    "refinement_invariance_check",
    "weak_integral_cf",
    "pushforward_triple",
]


def weak_integral_pair(spec: WeakRandomMeasureSpec, f: StepFunction, rng, size: int):
    """``(I(f), chi)``: the weak sum of ``a_i M(A_i)`` over the cells of ``f``.

    ``I(f) * chi`` is the classical value ``sum_i a_i M(A_i) chi(A_i)``.
    """
    g = as_generator(rng)
    law = spec.law
    cells = [(lo, hi, a) for lo, hi, a in f.cells()]
    if law.kind == "kendallmu":
        if len(cells) != 1:
            raise NotImplementedError("the Kendall generator has no pair to fold several cells")
        lo, hi, a = cells[0]
        m, chi = sample_cell(spec, spec.control(lo, hi), g, size)
        return abs(a) * m, np.sign(a or 1.0) * chi
    pair = representable_pair(law)
    s = np.zeros(size)
    chi = mu_sample(law, g, size)
    for lo, hi, a in cells:
        m, y = sample_cell(spec, spec.control(lo, hi), g, size)
        s, chi = pair.split(s, chi, a * m, y)
    return s, chi


def weak_integral_sample(spec: WeakRandomMeasureSpec, f: StepFunction, rng, size: int) -> np.ndarray:
    return weak_integral_pair(spec, f, rng, size)[0]


def refinement_invariance_check(spec: WeakRandomMeasureSpec, f: StepFunction, refinement: StepFunction,
                                N: int = 100_000, rng=None, threshold: float = 0.015) -> KSReport:
    """KS distance between integrals built from two representations of one function."""
    if not f.same_function(refinement):
        raise ValueError("the two step functions differ")
    g = as_generator(rng)
    # rounding keeps ties on atoms that the two fold orders reach with different last bits
    a = np.round(weak_integral_sample(spec, f, g, N), 9)
    b = np.round(weak_integral_sample(spec, refinement, g, N), 9)
    return KSReport(ks_distance(a, b), threshold, N)


def _cell_exponent(triple: WeakLevyTriple, a: float, t: float) -> float:
    law = triple.law
    val = 0.0
    if triple.A:
        val += triple.A * abs(a * t) ** law.kappa
    at = abs(a * t)
    if at > 0:
        kinks = omega_breakpoints(law.conv_spec(), at)
        val += triple.nu.integrate(lambda s: float(mu_one_minus_cf(law, at * s)), kinks)
    return val


def weak_integral_cf(triple: WeakLevyTriple, c: float, f: StepFunction, t: float) -> float:
    """``E exp(i t I(f) X)`` for control ``c * Lebesgue``, summed exactly over the steps of ``f``."""
    expo = 0.0
    for lo, hi, a in f.cells():
        rho = c * (hi - lo)
        if rho and a:
            expo += rho * _cell_exponent(triple, a, t)
    if not math.isfinite(expo):
        raise ArithmeticError("weak integral exponent diverged")
    return math.exp(-expo)


def pushforward_triple(triple: WeakLevyTriple, c: float, f: StepFunction) -> WeakLevyTriple:
    """Weak Levy data of ``I(f)``: ``A * int |f|^kappa drho`` and ``nu`` pushed through ``f``."""
    k = triple.law.kappa
    A = triple.A * c * f.moment(k)
    parts = [(c * (hi - lo), abs(a), triple.nu) for lo, hi, a in f.cells() if a and hi > lo]
    return WeakLevyTriple(triple.law, A, SpectralMeasure.combine(parts))
