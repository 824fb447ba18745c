"""Generalized convolutions, their stable and infinitely divisible laws, and weak stochastic integrals."""

from .convolutions import ConvSpec, kappa, kernel_measure, kernel_sample, omega, stable_density, stable_sample
from .gcf import LevyTriple, gcf, lk_gcf
from .infdiv import CompoundPoissonSpec, cpoisson_measure, cpoisson_sample
from .measures import DiracMix, Empirical, GridDensity, RngStream, dirac, ks_distance
from .processes import StepFunction, ck_check, simulate_levy
from .weakintegral import pushforward_triple, weak_integral_cf, weak_integral_sample
from .weakmeasure import CompoundPoissonBase, WeakRandomMeasureSpec, weak_levy_path, weak_poisson_path
from .weakstable import WeakLevyTriple, WeaklyStableLaw, representable_pair

__version__ = "0.1.0"

__all__ = [
    "ConvSpec", "kappa", "kernel_measure", "kernel_sample", "omega", "stable_density", "stable_sample",
    "LevyTriple", "gcf", "lk_gcf",
    "CompoundPoissonSpec", "cpoisson_measure", "cpoisson_sample",
    "DiracMix", "Empirical", "GridDensity", "RngStream", "dirac", "ks_distance",
    "StepFunction", "ck_check", "simulate_levy",
    "pushforward_triple", "weak_integral_cf", "weak_integral_sample",
    "CompoundPoissonBase", "WeakRandomMeasureSpec", "weak_levy_path", "weak_poisson_path",
    "WeakLevyTriple", "WeaklyStableLaw", "representable_pair",
]
