import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gconv.convolutions import (
    ConvSpec,
    NoClosedForm,
    convolve,
    kappa,
    kernel_measure,
    kernel_sample,
    omega,
    one_minus_omega,
    stable_cdf,
    stable_density,
    stable_sample,
)
from gconv.measures import DiracMix, dirac, ks_distance, ks_distance_cdf

SPECS = ["classic", "max", "symmetric:a=1", "pstable:p=1.5", "kendall:a=0.7", "kingman:s=0.5"]


@pytest.mark.parametrize("text", SPECS + ["kingman:s=-0.5", "kendall:a=1.5"])
def test_parse_roundtrip(text):
    spec = ConvSpec.parse(text)
    assert ConvSpec.parse(str(spec)) == spec


@pytest.mark.parametrize("bad", ["nope", "kendall:a=0", "pstable:p=inf", "kingman:s=-1", "pstable:q=1"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        ConvSpec.parse(bad)


def test_kernel_pstable_norm():
    m = kernel_measure(ConvSpec.pstable(2), 3, 4)
    assert isinstance(m, DiracMix) and m.points.tolist() == [5.0] and m.weights.tolist() == [1.0]


def test_kernel_symmetric_two_atoms():
    m = kernel_measure(ConvSpec.symmetric(1), 1, 1)
    assert m.points.tolist() == [0.0, 2.0] and np.allclose(m.weights, 0.5)


@pytest.mark.parametrize("alpha", [0.3, 0.7, 1.0])
def test_kernel_kendall_unit(alpha):
    m = kernel_measure(ConvSpec.kendall(alpha), 0, 1)
    assert m.points.tolist() == [1.0] and m.weights.tolist() == [1.0]


def test_kernel_kingman_minus_half_two_atoms():
    m = kernel_measure(ConvSpec.kingman(-0.5), 1.0, 3.0)
    assert m.points.tolist() == [2.0, 4.0] and np.allclose(m.weights, 0.5)


def test_kernel_rejects_negative():
    with pytest.raises(ValueError):
        kernel_measure(ConvSpec.classic(), -1, 1)


def test_kernel_sample_max_and_classic(rng):
    assert np.all(kernel_sample(ConvSpec.max(), 2, 3, rng, 100) == 3)
    assert np.all(kernel_sample(ConvSpec.classic(), 1.5, 2.5, rng, 100) == 4)


def test_kernel_sample_kendall_matches_pareto(rng):
    draws = kernel_sample(ConvSpec.kendall(1.0), 1.0, 1.0, rng, 100_000)
    # pi_2: Pareto with P(X > x) = x^-2 on [1, inf)
    assert ks_distance_cdf(draws, lambda x: np.where(x < 1, 0.0, 1 - np.maximum(x, 1) ** -2.0)) < 0.01


def test_kernel_sample_kingman_matches_measure(rng):
    spec = ConvSpec.kingman(0.5)
    draws = kernel_sample(spec, 1.0, 2.0, rng, 50_000)
    assert ks_distance_cdf(draws, kernel_measure(spec, 1.0, 2.0).cdf) < 0.015


def test_omega_values():
    assert omega(ConvSpec.kendall(1), 0.5) == pytest.approx(0.5)
    assert omega(ConvSpec.max(), 2.0) == 0
    assert omega(ConvSpec.classic(), 1.0) == pytest.approx(math.exp(-1))
    # the (1, 1) symmetric convolution is the cosine kernel
    assert omega(ConvSpec.symmetric(1), math.pi) == pytest.approx(-1)
    # Kingman s = 1/2 is the 3-dimensional sinc
    assert omega(ConvSpec.kingman(0.5), 2.0) == pytest.approx(math.sin(2) / 2, abs=1e-12)


@pytest.mark.parametrize("text", SPECS)
def test_omega_at_zero_is_one(text):
    assert omega(ConvSpec.parse(text), 0.0) == pytest.approx(1.0)


def test_omega_rejects_negative():
    with pytest.raises(ValueError):
        omega(ConvSpec.classic(), -1.0)


def test_kingman_omega_both_regimes_agree():
    spec = ConvSpec.kingman(0.5)
    for t in (39.9, 40.1, 200.0):
        assert omega(spec, t) == pytest.approx(math.sin(t) / t, abs=1e-10)


@given(st.floats(1e-8, 1e-2))
@settings(max_examples=30, deadline=None)
def test_one_minus_omega_small_t_no_cancellation(t):
    v = one_minus_omega(ConvSpec.kingman(0.5), t)
    # 1 - sin t / t = t^2/6 - t^4/120 + ...
    assert v == pytest.approx(t * t / 6 - t**4 / 120, rel=1e-9)


def test_kappa_values():
    assert kappa(ConvSpec.kendall(0.7)) == pytest.approx(0.7)
    assert kappa(ConvSpec.max()) == math.inf
    assert kappa(ConvSpec.kingman(1)) == 2
    assert kappa(ConvSpec.classic()) == 1
    assert kappa(ConvSpec.symmetric(0.5)) == pytest.approx(1.0)


def test_stable_density_closed_forms():
    assert stable_density(ConvSpec.max(), 1, 1.0) == pytest.approx(math.exp(-1))
    a, x = 0.7, 1.3
    # Kendall sigma_alpha is a mixture: its density adds the Frechet part to the atom-free term
    assert stable_density(ConvSpec.kendall(a), a, x) > a * x ** (-2 * a - 1) * math.exp(-x**-a) * 0.99
    s, x = 0.5, 2.0
    want = x**s * math.exp(-x / 2) / (2 ** (s + 1) * math.gamma(s + 1))
    assert stable_density(ConvSpec.kingman(s), 2, x) == pytest.approx(want)


def test_stable_density_unsupported():
    with pytest.raises(NoClosedForm):
        stable_density(ConvSpec.pstable(1.5), 1.0, 1.0)


def test_stable_sample_max_frechet(rng):
    draws = stable_sample(ConvSpec.max(), 1, rng, 100_000)
    assert ks_distance_cdf(draws, lambda x: np.exp(-1 / np.maximum(x, 1e-300))) < 0.01


def test_stable_sample_kendall_matches_closed_cdf(rng):
    spec = ConvSpec.kendall(1.0)
    draws = stable_sample(spec, 1.0, rng, 100_000)
    assert ks_distance_cdf(draws, lambda x: stable_cdf(spec, 1.0, x)) < 0.01
    # closed form (1 + 1/x) exp(-1/x)
    assert stable_cdf(spec, 1.0, 2.0) == pytest.approx(1.5 * math.exp(-0.5))


def test_stable_sample_kendall_gcf(rng):
    spec = ConvSpec.kendall(1.0)
    draws = stable_sample(spec, 0.5, rng, 1_000_000)
    for t in (0.5, 1.0, 2.0):
        est = float(np.mean(omega(spec, t * draws)))
        assert est == pytest.approx(math.exp(-t**0.5), abs=0.01)


@pytest.mark.parametrize("text,p", [("classic", 0.5), ("pstable:p=1.5", 1.0), ("kingman:s=0.5", 1.5),
                                    ("symmetric:a=1", 1.0), ("kingman:s=0.5", 2.0)])
def test_stable_sample_gcf_exponent(rng, text, p):
    spec = ConvSpec.parse(text)
    draws = stable_sample(spec, p, rng, 200_000)
    for t in (0.5, 1.0):
        est = float(np.mean(omega(spec, t * draws)))
        assert est == pytest.approx(math.exp(-t**p), abs=0.01)


def test_stable_sample_rejects_p_above_kappa(rng):
    with pytest.raises(ValueError):
        stable_sample(ConvSpec.kendall(0.5), 0.7, rng, 10)


def test_convolve_atomic():
    m = convolve(ConvSpec.classic(), dirac(1.0), dirac(1.0))
    assert m.points.tolist() == [2.0]
    m = convolve(ConvSpec.max(), DiracMix([0.0, 1.0], [0.5, 0.5]), dirac(1.0))
    assert m.points.tolist() == [1.0] and m.weights.tolist() == [1.0]


@given(st.floats(0, 50), st.floats(0, 50), st.floats(0.1, 1.0))
@settings(max_examples=60, deadline=None)
def test_kernel_commutes_and_respects_unit(x, y, a):
    for spec in (ConvSpec.symmetric(a), ConvSpec.pstable(1 + a)):
        m1, m2 = kernel_measure(spec, x, y), kernel_measure(spec, y, x)
        assert np.allclose(m1.points, m2.points) and np.allclose(m1.weights, m2.weights)
    m = kernel_measure(ConvSpec.pstable(1 + a), x, 0.0)
    assert m.points[0] == pytest.approx(x)


def test_kernel_homogeneity_kendall(rng):
    spec = ConvSpec.kendall(0.7)
    a = kernel_sample(spec, 2.0, 6.0, rng, 50_000)
    b = 2.0 * kernel_sample(spec, 1.0, 3.0, rng, 50_000)
    assert ks_distance(a, b) < 0.015
