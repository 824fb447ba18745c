import math

import numpy as np
import pytest

from gconv.convolutions import ConvSpec, omega, stable_measure
from gconv.gcf import LevyTriple, lk_gcf, upsilon
from gconv.measures import dirac, ks_distance
from gconv.processes import (
    CompoundPoissonFamily,
    ConstantFamily,
    LevyFamily,
    PathRecord,
    ScaledFamily,
    StableFamily,
    StepFunction,
    ck_check,
    hill_estimator,
    integral_process_gcf,
    simulate_integral_process,
    simulate_levy,
    transition_sample,
)


def test_step_function_parse_and_eval():
    f = StepFunction.parse("1@[0,1);2.5@[1,3)")
    assert f(np.array([-1, 0, 0.5, 1, 2.9, 3])).tolist() == [0, 1, 1, 2.5, 2.5, 0]
    assert f.moment(2) == pytest.approx(1 + 2 * 6.25)
    assert f.moment(1, 0.5, 2) == pytest.approx(0.5 + 2.5)


@pytest.mark.parametrize("bad", ["", "1@[0,1);2@[2,3)", "x@[0,1)", "1@[1,0)"])
def test_step_function_parse_rejects(bad):
    with pytest.raises(ValueError):
        StepFunction.parse(bad)


def test_step_function_same_function():
    f = StepFunction.parse("1@[0,2)")
    assert f.same_function(StepFunction.parse("1@[0,1);1@[1,2)"))
    assert not f.same_function(StepFunction.parse("1@[0,1);2@[1,2)"))


def test_path_record_csv():
    rec = PathRecord([0.0, 1.0], np.array([[0.0, 2.0], [0.0, 3.5]]))
    lines = rec.to_csv().splitlines()
    assert lines[0] == "path_id,t,state" and lines[1:] == ["0,0,0", "0,1,2", "1,0,0", "1,1,3.5"]


def test_path_record_rejects_unsorted_times():
    with pytest.raises(ValueError):
        PathRecord([1.0, 0.5], np.zeros((1, 2)))


def test_transition_identity_and_shift(rng):
    assert np.all(transition_sample(ConvSpec.kendall(0.5), 2.0, dirac(0.0), rng, 50) == 2.0)
    assert np.all(transition_sample(ConvSpec.classic(), 2.0, dirac(1.0), rng, 50) == 3.0)


def test_simulate_levy_starts_at_origin(rng):
    rec = simulate_levy(ConvSpec.classic(), CompoundPoissonFamily(ConvSpec.classic(), 1.0, dirac(1.0)),
                        [0, 1, 2], rng, 5)
    assert rec.states.shape == (5, 3) and np.all(rec.states[:, 0] == 0)
    assert np.all(np.diff(rec.states, axis=1) >= 0)


def test_ck_trivial_family_exact(rng):
    fam = ConstantFamily(ConvSpec.kendall(0.7), dirac(0.0))
    rep = ck_check(ConvSpec.kendall(0.7), fam, 0, 1, 2, 1.0, N=10_000, rng=rng)
    assert rep.max_diff == 0 and rep.passed


def test_ck_kendall_stable_family(rng):
    spec = ConvSpec.kendall(0.7)
    rep = ck_check(spec, StableFamily(spec, 0.7), 0, 1, 2, 1.0, N=200_000, rng=rng)
    assert rep.max_diff < 0.01 and rep.passed


def test_ck_classic_poisson(rng):
    spec = ConvSpec.classic()
    rep = ck_check(spec, CompoundPoissonFamily(spec, 1.5, dirac(1.0)), 0, 0.5, 1.5, 0.0, N=100_000, rng=rng)
    assert rep.passed and rep.z_max < 4


def test_ck_detects_inconsistent_family(rng):
    # constant delta_1 increments are not a convolution semigroup
    spec = ConvSpec.classic()
    rep = ck_check(spec, ConstantFamily(spec, dirac(1.0)), 0, 1, 2, 0.0, N=10_000, rng=rng)
    assert not rep.passed


def test_scaled_family(rng):
    spec = ConvSpec.classic()
    fam = ScaledFamily(CompoundPoissonFamily(spec, 1.0, dirac(1.0)), -2.0)
    assert set(np.unique(fam.sample(1.0, rng, 1000))) <= {0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0}


def test_integral_gcf_constant_integrand():
    alpha = 0.6
    tr = LevyTriple(ConvSpec.kendall(alpha), A=2.0)
    f = StepFunction.constant(1.0, 0.0, 3.0)
    assert integral_process_gcf(tr, f, 1.0, 2.5, 0.7) == pytest.approx(math.exp(-2 * 0.7**alpha * 1.5))


def test_integral_gcf_zero_integrand():
    tr = LevyTriple(ConvSpec.kendall(0.6), A=2.0, m_law=dirac(1.0), m_mass=1.0)
    assert integral_process_gcf(tr, StepFunction.constant(0.0, 0, 1), 0, 1, 1.3) == 1


@pytest.mark.parametrize("alpha", [0.5, 0.7, 1.0])
def test_integral_gcf_step_sum(alpha):
    tr = LevyTriple(ConvSpec.kendall(alpha), A=1.0)
    f = StepFunction.parse("1@[0,1);2@[1,2)")
    assert integral_process_gcf(tr, f, 0, 2, 1.0) == pytest.approx(math.exp(-(1 + 2**alpha)), rel=1e-12)


def test_integral_gcf_jump_part_matches_lk():
    spec = ConvSpec.kendall(0.7)
    tr = LevyTriple(spec, m_law=dirac(1.0), m_mass=float(upsilon(spec, 1.0)))
    f = StepFunction.constant(1.0, 0.0, 2.0)
    assert integral_process_gcf(tr, f, 0, 2, 0.8) == pytest.approx(lk_gcf(tr, 0.8) ** 2, rel=1e-12)


def test_integral_process_identity_integrand(rng):
    spec = ConvSpec.kendall(0.7)
    fam = StableFamily(spec, 0.7)
    f = StepFunction.constant(1.0, 0.0, 2.0)
    grid = [0.0, 1.0, 2.0]
    a = simulate_integral_process(fam, f, grid, rng, 100_000).terminal
    b = simulate_levy(spec, fam, grid, rng, 100_000).terminal
    assert ks_distance(a, b) < 0.015


def test_integral_process_matches_gcf(rng):
    spec = ConvSpec.kendall(0.7)
    tr = LevyTriple(spec, A=1.0)
    f = StepFunction.parse("1@[0,1);2@[1,2)")
    x = simulate_integral_process(tr, f, [0.0, 1.0, 2.0], rng, 100_000).terminal
    for u in (0.5, 1.0):
        assert float(np.mean(omega(spec, u * x))) == pytest.approx(integral_process_gcf(tr, f, 0, 2, u), abs=0.01)


def test_integral_process_grid_must_refine(rng):
    f = StepFunction.parse("1@[0,1);2@[1,2)")
    with pytest.raises(ValueError):
        simulate_integral_process(StableFamily(ConvSpec.classic(), 1.0), f, [0.0, 2.0], rng)


def test_levy_family_truncation_reported(rng):
    spec = ConvSpec.kendall(0.7)
    lam = stable_measure(spec, 0.7)
    fam = LevyFamily(LevyTriple(spec, m_law=lam, m_mass=1.0))
    assert fam.eps > 0 and fam.jump_rate > 0
    assert 0 < fam.truncation_error(1.0) < 1e-2
    draws = fam.sample(1.0, rng, 50_000)
    tr = fam.triple
    assert float(np.mean(omega(spec, draws))) == pytest.approx(lk_gcf(tr, 1.0), abs=0.01 + fam.truncation_error(1.0))


def test_hill_estimator_pareto(rng):
    x = rng.pareto(1.5, 200_000) + 1.0
    assert hill_estimator(x) == pytest.approx(1.5, rel=0.1)
