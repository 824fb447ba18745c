import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from gconv.measures import empirical_cf, ks_distance
from gconv.weakstable import (
    SpectralMeasure,
    WeakLevyTriple,
    WeaklyStableLaw,
    fejer_sample,
    kendall_stable_spectral,
    mu_cf,
    mu_one_minus_cf,
    mu_sample,
    representable_pair,
    sphere_stable_spectral,
    weak_lk_cf,
    weak_sum_chain,
)


@pytest.mark.parametrize("text", ["sas:p=1.5", "sphere:n=3", "kendallmu:a=1", "twopoint"])
def test_law_parse_roundtrip(text):
    law = WeaklyStableLaw.parse(text)
    assert WeaklyStableLaw.parse(str(law)) == law


@pytest.mark.parametrize("bad", ["sas:p=2.5", "sphere:n=1", "kendallmu:a=1.5", "cauchy"])
def test_law_parse_rejects(bad):
    with pytest.raises(ValueError):
        WeaklyStableLaw.parse(bad)


def test_mu_cf_values():
    assert mu_cf(WeaklyStableLaw.kendall(1.0), 0.5) == pytest.approx(0.5)
    assert mu_cf(WeaklyStableLaw.two_point(), math.pi) == pytest.approx(-1.0)
    for t in (0.1, 1.0, 7.0):
        assert mu_cf(WeaklyStableLaw.sphere(3), t) == pytest.approx(math.sin(t) / t, abs=1e-12)
    assert mu_cf(WeaklyStableLaw.symmetric_stable(1.2), 2.0) == pytest.approx(math.exp(-(2.0**1.2)))


def test_mu_one_minus_cf_small_argument():
    law = WeaklyStableLaw.sphere(3)
    t = 1e-6
    assert mu_one_minus_cf(law, t) == pytest.approx(t * t / 6, rel=1e-9)


def test_gaussian_sample_cf(rng):
    x = mu_sample(WeaklyStableLaw.symmetric_stable(2.0), rng, 1_000_000)[:, 0]
    assert abs(empirical_cf(x, 1.0) - math.exp(-1)) < 0.005


@pytest.mark.parametrize("text", ["sas:p=0.8", "kendallmu:a=0.6", "kendallmu:a=1", "sphere:n=4", "twopoint"])
def test_samples_match_cf(rng, text):
    law = WeaklyStableLaw.parse(text)
    x = mu_sample(law, rng, 200_000)
    assert x.shape == (200_000, law.dim)
    for t in (0.5, 1.0, 2.0):
        assert abs(empirical_cf(x[:, 0], t) - mu_cf(law, t)) < 0.01


def test_sphere_samples_on_unit_sphere(rng):
    x = mu_sample(WeaklyStableLaw.sphere(5), rng, 1000)
    assert np.allclose(np.linalg.norm(x, axis=1), 1.0)


def test_fejer_density(rng):
    x = fejer_sample(rng, 200_000)
    # P(|X| <= 1) for density (1 - cos x) / (pi x^2)
    from scipy import integrate
    want = 2 * integrate.quad(lambda v: (1 - math.cos(v)) / (math.pi * v * v) if v else 1 / (2 * math.pi), 0, 1)[0]
    assert np.mean(np.abs(x) <= 1) == pytest.approx(want, abs=0.005)


def test_pair_gaussian_theta_is_euclidean():
    pair = representable_pair(WeaklyStableLaw.symmetric_stable(2.0))
    th, _ = pair.split(3.0, [[0.2]], 4.0, [[-1.0]])
    assert th[0] == pytest.approx(5.0)


def test_pair_two_point_cancellation():
    pair = representable_pair(WeaklyStableLaw.two_point())
    th, chi = pair.split(1.0, [[1.0]], 1.0, [[-1.0]])
    assert th[0] == 0 and chi[0, 0] == 1.0


def test_pair_sphere_identity():
    pair = representable_pair(WeaklyStableLaw.sphere(3))
    x = np.array([[0.0, 0.6, 0.8]])
    th, chi = pair.split(1.0, x, 0.0, [[1.0, 0.0, 0.0]])
    assert th[0] == pytest.approx(1.0) and np.allclose(chi, x)


def test_pair_kendall_unsupported():
    with pytest.raises(NotImplementedError):
        representable_pair(WeaklyStableLaw.kendall(0.5))


def test_weak_sum_chain_zero_thetas(rng):
    law = WeaklyStableLaw.sphere(3)
    S, chi, Z = weak_sum_chain(law, representable_pair(law), np.zeros(4), rng, 10)
    assert np.all(S == 0) and np.all(Z == 0)


def test_weak_sum_chain_tracks_classical_sum(rng):
    law = WeaklyStableLaw.sphere(3)
    pair = representable_pair(law)
    S, chi, Z = weak_sum_chain(law, pair, np.array([1.0, 2.0, 0.5]), rng, 500)
    assert np.allclose(np.linalg.norm(Z, axis=-1), np.abs(S))


@pytest.mark.parametrize("p", [0.7, 1.5, 2.0])
def test_sas_weak_stability(rng, p):
    law = WeaklyStableLaw.symmetric_stable(p)
    pair = representable_pair(law)
    n = 100_000
    x, y = mu_sample(law, rng, n), mu_sample(law, rng, n)
    s, t = 1.3, -0.4
    th, chi = pair.split(s, x, t, y)
    assert np.allclose(th, (abs(s) ** p + abs(t) ** p) ** (1 / p))
    assert ks_distance(th * chi[:, 0], th[0] * mu_sample(law, rng, n)[:, 0]) < 0.015


vec3 = hnp.arrays(np.float64, (5, 3), elements=st.floats(-10, 10))


@given(st.floats(-5, 5), vec3, st.floats(-5, 5), vec3)
@settings(max_examples=60, deadline=None)
def test_pair_reconstructs_linear_combination(s, x, t, y):
    pair = representable_pair(WeaklyStableLaw.sphere(3))
    th, chi = pair.split(s, x, t, y)
    assert np.all(th >= 0)
    assert np.allclose(th[:, None] * chi, s * x + t * y, atol=1e-9)


def test_weak_lk_pure_gaussian_part():
    law = WeaklyStableLaw.symmetric_stable(1.3)
    tr = WeakLevyTriple(law, A=1.0)
    for t in (0.2, 1.0, 3.0):
        assert weak_lk_cf(tr, t) == pytest.approx(math.exp(-(t**1.3)), rel=1e-12)


@pytest.mark.parametrize("alpha,p", [(1.0, 0.5), (0.8, 0.3), (1.0, 0.9)])
def test_weak_lk_kendall_spectral_identity(alpha, p):
    tr = WeakLevyTriple(WeaklyStableLaw.kendall(alpha), 0.0, kendall_stable_spectral(alpha, p))
    for t in (0.3, 1.0, 2.5):
        assert weak_lk_cf(tr, t) == pytest.approx(math.exp(-(t**p)), abs=1e-9)


def test_weak_lk_sphere_spectral_identity():
    tr = WeakLevyTriple(WeaklyStableLaw.sphere(3), 0.0, sphere_stable_spectral(3, 1.2))
    for t in (0.3, 1.0, 4.0):
        assert weak_lk_cf(tr, t) == pytest.approx(math.exp(-(t**1.2)), abs=1e-9)


def test_spectral_measure_atoms_and_scaling():
    nu = SpectralMeasure(atoms=((1.0, 2.0),))
    assert nu.integrate(lambda s: s * s) == pytest.approx(2.0)
    assert nu.scaled(0.5, 3.0).integrate(lambda s: s * s) == pytest.approx(9.0)
    both = SpectralMeasure.combine([(1.0, 1.0, nu), (1.0, 2.0, nu)])
    assert both.integrate(lambda s: s) == pytest.approx(2.0 + 4.0)
