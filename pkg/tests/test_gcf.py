import math

import numpy as np
import pytest
from scipy import integrate

from gconv.convolutions import ConvSpec, omega, stable_measure
from gconv.gcf import LevyTriple, check_x0, gcf, gcf_with_error, lk_gcf, upsilon
from gconv.infdiv import CompoundPoissonSpec, cpoisson_sample
from gconv.measures import DiracMix, Empirical, GridDensity, SamplerBacked, dirac

T_GRID = np.linspace(0.0, 3.0, 13)


@pytest.mark.parametrize("text", ["classic", "kendall:a=0.7", "kingman:s=0.5", "max"])
def test_gcf_of_unit_atom_is_omega(text):
    spec = ConvSpec.parse(text)
    for t in T_GRID:
        assert gcf(spec, dirac(1.0), t) == pytest.approx(float(omega(spec, t)), abs=1e-14)


def test_gcf_of_zero_atom_is_one():
    for t in T_GRID:
        assert gcf(ConvSpec.kendall(0.5), dirac(0.0), t) == 1


def test_gcf_kendall_stable_grid_is_exponential():
    spec = ConvSpec.kendall(1.0)
    lam = stable_measure(spec, 1.0)
    for t in T_GRID:
        assert gcf(spec, lam, t) == pytest.approx(math.exp(-t), abs=1e-5)


def test_gcf_kendall_frechet_grid_matches_direct_integral():
    # the Frechet(1) law is not Kendall-stable; compare with t * int_0^{1/t} exp(-1/x) dx
    spec = ConvSpec.kendall(1.0)
    x = np.geomspace(1e-3, 1e6, 40001)
    lam = GridDensity(x, x**-2 * np.exp(-1 / x), tail_mass=-math.expm1(-1e-6), tail_index=1.0)
    for t in (0.5, 1.0, 2.0, 3.0):
        want = t * integrate.quad(lambda v: math.exp(-1 / v), 0, 1 / t)[0]
        assert gcf(spec, lam, t) == pytest.approx(want, abs=1e-5)


def test_gcf_weak_convergence_surrogate():
    spec = ConvSpec.kendall(1.0)
    target = stable_measure(spec, 1.0)
    errs = []
    for n in (50, 200, 800):
        lam = GridDensity(target.x[:: max(1, target.x.size // n)], target.density[:: max(1, target.x.size // n)],
                          tail_mass=target.tail_mass, tail_index=target.tail_index)
        errs.append(max(abs(gcf(spec, lam, t) - math.exp(-t)) for t in T_GRID))
    assert errs[-1] < errs[0] and errs[-1] < 1e-3


def test_gcf_monte_carlo_reports_error(rng):
    spec = ConvSpec.kendall(1.0)
    lam = Empirical(rng.random(100_000))
    v, se = gcf_with_error(spec, lam, 0.5)
    # E(1 - U/2) = 3/4
    assert abs(v - 0.75) < 4 * se + 1e-12 and 0 < se < 0.01


def test_gcf_sampler_draws_with_given_stream(rng):
    lam = SamplerBacked(lambda g, n: g.random(n))
    v, se = gcf_with_error(ConvSpec.classic(), lam, 1.0, rng, 200_000)
    assert abs(v - (1 - math.exp(-1))) < 4 * se


def test_upsilon_values():
    assert upsilon(ConvSpec.kendall(1.0), 0.5, 1.0) == pytest.approx(0.5)
    assert upsilon(ConvSpec.classic(), 0.0) == 0


def test_max_has_no_admissible_cutoff():
    with pytest.raises(ValueError):
        upsilon(ConvSpec.max(), 2.0, 1.0)
    with pytest.raises(ValueError):
        check_x0(ConvSpec.max(), 1.0)


def test_x0_outside_range_rejected():
    # cos(t) returns to 1 at 2 pi
    with pytest.raises(ValueError):
        check_x0(ConvSpec.symmetric(1.0), 7.0)
    with pytest.raises(ValueError):
        check_x0(ConvSpec.kingman(-0.5), 2 * math.pi)
    check_x0(ConvSpec.symmetric(1.0), 6.0)


@pytest.mark.parametrize("alpha", [0.4, 1.0])
def test_lk_pure_stable(alpha):
    tr = LevyTriple(ConvSpec.kendall(alpha), A=1.0)
    for t in (0.3, 1.0, 2.5):
        assert lk_gcf(tr, t) == pytest.approx(math.exp(-t**alpha), rel=1e-12)


@pytest.mark.parametrize("text", ["classic", "kendall:a=0.7", "kingman:s=0.5", "pstable:p=1.5"])
def test_lk_single_atom_is_poisson_exponent(text):
    spec = ConvSpec.parse(text)
    tr = LevyTriple(spec, A=0.0, m_law=dirac(1.0), m_mass=float(upsilon(spec, 1.0)))
    for t in (0.3, 1.0, 2.5):
        assert lk_gcf(tr, t) == pytest.approx(math.exp(float(omega(spec, t)) - 1), abs=1e-10)


def test_lk_matches_compound_poisson(rng):
    spec = ConvSpec.kendall(0.7)
    c = 1.3
    tr = LevyTriple(spec, m_law=dirac(1.0), m_mass=c * float(upsilon(spec, 1.0)))
    draws = cpoisson_sample(CompoundPoissonSpec(spec, c, dirac(1.0)), rng, 100_000)
    for t in (0.5, 1.0, 2.0):
        mc = float(np.mean(omega(spec, t * draws)))
        assert lk_gcf(tr, t) == pytest.approx(mc, abs=0.01)


def test_levy_triple_validation():
    with pytest.raises(ValueError):
        LevyTriple(ConvSpec.classic(), A=-1.0)
    with pytest.raises(ValueError):
        LevyTriple(ConvSpec.classic(), m_law=DiracMix([0.0, 1.0], [0.5, 0.5]), m_mass=1.0)
    with pytest.raises(ValueError):
        LevyTriple(ConvSpec.classic(), m_mass=1.0)
