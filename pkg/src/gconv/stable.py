"""Samplers for classical stable laws, normalized to unit scale.

* one-sided (totally skewed) stable with Laplace transform ``exp(-t**beta)``;
* symmetric stable with characteristic function ``exp(-|t|**p)``.

Other scale conventions are obtained by explicit scale maps, see
:func:`laplace_scale_for` and :func:`cf_scale_for`.
"""

from __future__ import annotations

import numpy as np

from .measures import as_generator


def positive_stable_sample(beta: float, rng, size: int) -> np.ndarray:
    """Draws with Laplace transform ``E exp(-t S) = exp(-t**beta)``, ``0 < beta <= 1``.

    Kanter's representation of the Chambers-Mallows-Stuck transform.
    """
    if not 0 < beta <= 1:
        raise ValueError("beta must lie in (0, 1]")
    if beta == 1:
        return np.ones(size)
    g = as_generator(rng)
    u = g.uniform(0.0, np.pi, size)
    e = g.standard_exponential(size)
    a = np.sin(beta * u) / np.sin(u) ** (1.0 / beta)
    b = (np.sin((1.0 - beta) * u) / e) ** ((1.0 - beta) / beta)
    return a * b


def symmetric_stable_sample(p: float, rng, size: int) -> np.ndarray:
    """Draws with characteristic function ``exp(-|t|**p)``, ``0 < p <= 2``."""
    if not 0 < p <= 2:
        raise ValueError("p must lie in (0, 2]")
    g = as_generator(rng)
    v = g.uniform(-np.pi / 2, np.pi / 2, size)
    if p == 1:
        return np.tan(v)
    w = g.standard_exponential(size)
    return np.sin(p * v) / np.cos(v) ** (1.0 / p) * (np.cos((1.0 - p) * v) / w) ** ((1.0 - p) / p)


def laplace_scale_for(c: float, beta: float) -> float:
    """Factor ``k`` with ``k*S`` having Laplace transform ``exp(-c * t**beta)``."""
    return c ** (1.0 / beta)


def cf_scale_for(c: float, p: float) -> float:
    """Factor ``k`` with ``k*X`` having characteristic function ``exp(-c |t|**p)``."""
    return c ** (1.0 / p)
