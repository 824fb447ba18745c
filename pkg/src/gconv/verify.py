"""Statistical verification suite shared by the CLI and the acceptance tests.

Every check returns :class:`CheckResult` records; a record passes when its
statistic does not exceed its threshold. Each check draws from its own
stream derived from the suite seed, so results are reproducible and do not
depend on which other checks ran.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .convolutions import (
    ConvSpec,
    kernel_measure,
    kernel_sample,
    omega,
    omega_breakpoints,
    stable_measure,
)
from .gcf import LevyTriple
from .infdiv import CompoundPoissonSpec, cpoisson_sample, kendall_cpoisson_cdf, kingman_weak_poisson_cf
from .measures import DiracMix, RngStream, dirac, ks_distance, ks_distance_cdf, quadrature
from .processes import (
    CompoundPoissonFamily,
    StableFamily,
    StepFunction,
    ck_check,
    integral_process_gcf,
    simulate_integral_process,
)
from .weakintegral import (
    pushforward_triple,
    refinement_invariance_check,
    weak_integral_cf,
    weak_integral_pair,
)
from .weakmeasure import (
    CompoundPoissonBase,
    WeakRandomMeasureSpec,
    compound_uniform_measure,
    subordination_check,
    weak_poisson_dist,
    weak_poisson_path,
)
from .weakstable import (
    SpectralMeasure,
    WeakLevyTriple,
    WeaklyStableLaw,
    kendall_stable_spectral,
    mu_sample,
    representable_pair,
    sphere_stable_spectral,
    weak_lk_cf,
)

__all__ = ["CheckResult", "CRITERIA", "SUITES", "run_criterion", "run_suite", "CATALOG"]

CATALOG = (
    ConvSpec.classic(),
    ConvSpec.symmetric(1.0),
    ConvSpec.pstable(1.5),
    ConvSpec.kendall(0.7),
    ConvSpec.kingman(0.5),
    ConvSpec.max(),
)


@dataclass(frozen=True)
class CheckResult:
    test: str
    statistic: float
    threshold: float
    samples: int
    seed: int

    @property
    def passed(self) -> bool:
        return bool(self.statistic <= self.threshold)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = self.passed
        return {k: d[k] for k in ("test", "statistic", "threshold", "pass", "samples", "seed")}


def _snap(x):
    """Round away last-bit differences so atoms tie exactly in KS statistics."""
    return np.round(np.asarray(x, dtype=float), 9)


def _ks2(a, b) -> float:
    return ks_distance(_snap(a), _snap(b))


class _Streams:
    def __init__(self, seed: int, block: int):
        self.seed, self.block, self.k = seed, block, 0

    def next(self) -> np.random.Generator:
        self.k += 1
        return RngStream(self.seed, 1000 * self.block + self.k).generator()


# ---------------------------------------------------------------------------
# 1: kernel exactness


def _atoms_diff(m, points, weights) -> float:
    if not isinstance(m, DiracMix) or m.points.size != len(points):
        return math.inf
    return float(max(np.max(np.abs(m.points - points)), np.max(np.abs(m.weights - weights))))


def check_kernel_exactness(seed: int = 0) -> list[CheckResult]:
    cases = [
        ("kernel pstable:p=2 (3,4) = delta_5", ConvSpec.pstable(2), 3, 4, [5.0], [1.0]),
        ("kernel symmetric:a=1 (1,1) = (delta_0+delta_2)/2", ConvSpec.symmetric(1), 1, 1, [0.0, 2.0], [0.5, 0.5]),
        ("kernel max (2,3) = delta_3", ConvSpec.max(), 2, 3, [3.0], [1.0]),
    ]
    return [CheckResult(name, _atoms_diff(kernel_measure(spec, x, y), pts, ws), 0.0, 0, seed)
            for name, spec, x, y, pts, ws in cases]


# ---------------------------------------------------------------------------
# 2: associativity and homogeneity


def check_associativity_homogeneity(seed: int = 0, N: int = 200_000) -> list[CheckResult]:
    st = _Streams(seed, 2)
    out = []
    for spec in CATALOG:
        g = st.next()
        left = kernel_sample(spec, kernel_sample(spec, 1.0, 2.0, g, N), 3.0, g)
        right = kernel_sample(spec, 1.0, kernel_sample(spec, 2.0, 3.0, g, N), g)
        out.append(CheckResult(f"associativity {spec}", _ks2(left, right), 0.015, N, seed))
        g = st.next()
        scaled = 2.0 * kernel_sample(spec, kernel_sample(spec, 1.0, 2.0, g, N), 3.0, g)
        direct = kernel_sample(spec, kernel_sample(spec, 2.0, 4.0, g, N), 6.0, g)
        out.append(CheckResult(f"homogeneity {spec} a=2", _ks2(scaled, direct), 0.015, N, seed))
    return out


# ---------------------------------------------------------------------------
# 3: stable laws


def check_stable_identity(seed: int = 0) -> list[CheckResult]:
    out = []
    for spec, p in [(ConvSpec.kendall(1.0), 0.5), (ConvSpec.kendall(1.0), 1.0), (ConvSpec.max(), 1.0)]:
        sm = stable_measure(spec, p)
        for t in (0.5, 1.0, 2.0):
            val = quadrature(sm, lambda x: omega(spec, t * x), omega_breakpoints(spec, t))
            out.append(CheckResult(f"gcf of sigma_{p:g} {spec} t={t:g}",
                                   abs(val - math.exp(-t**p)), 1e-5, 0, seed))
    return out


# ---------------------------------------------------------------------------
# 4: compound Poisson closed forms


def check_compound_poisson(seed: int = 0, N: int = 100_000) -> list[CheckResult]:
    st = _Streams(seed, 4)
    out = []
    for alpha in (1.0, 0.5):
        cp = CompoundPoissonSpec(ConvSpec.kendall(alpha), 2.0, dirac(1.0))
        x = cpoisson_sample(cp, st.next(), N)
        ks = ks_distance_cdf(x, lambda z, a=alpha: kendall_cpoisson_cdf(a, 2.0, z))
        out.append(CheckResult(f"Exp(2 delta_1) kendall:a={alpha:g} vs closed-form CDF", ks, 0.01, N, seed))
    law = WeaklyStableLaw.symmetric_stable(1.0)
    S, _ = weak_poisson_path(law, 2.0, [0.0, 1.0], st.next(), N)
    ref = weak_poisson_dist(law, 2.0, 1.0)
    s = S.terminal
    for k in range(7):
        freq = float(np.mean(np.isclose(s, float(k), rtol=0, atol=1e-9)))
        p = float(ref.weights[k])
        sigma = math.sqrt(p * (1 - p) / N)
        out.append(CheckResult(f"weak Poisson sas:p=1 ct=2 atom k={k} (z-score)",
                               abs(freq - p) / sigma, 3.0, N, seed))
    return out


# ---------------------------------------------------------------------------
# 5: Chapman-Kolmogorov


def check_chapman_kolmogorov(seed: int = 0, N: int = 200_000) -> list[CheckResult]:
    st = _Streams(seed, 5)
    families = [
        ("kendall:a=0.7 stable p=0.7", ConvSpec.kendall(0.7), StableFamily(ConvSpec.kendall(0.7), 0.7)),
        ("max stable p=1", ConvSpec.max(), StableFamily(ConvSpec.max(), 1.0)),
        ("classic Poisson rate 1", ConvSpec.classic(), CompoundPoissonFamily(ConvSpec.classic(), 1.0, dirac(1.0))),
    ]
    out = []
    for name, spec, fam in families:
        for x in (0.0, 1.0):
            rep = ck_check(spec, fam, 0.0, 1.0, 2.0, x, N=N, rng=st.next())
            out.append(CheckResult(f"Chapman-Kolmogorov {name} x={x:g} (max z-score)",
                                   rep.z_max, 3.0, N, seed))
    return out


# ---------------------------------------------------------------------------
# 6: integral process


def check_integral_process(seed: int = 0, N: int = 100_000) -> list[CheckResult]:
    st = _Streams(seed, 6)
    spec = ConvSpec.kendall(0.7)
    triple = LevyTriple(spec, A=1.0)
    f = StepFunction([0.0, 1.0, 2.0], [1.0, 2.0])
    path = simulate_integral_process(triple, f, [0.0, 0.5, 1.0, 1.5, 2.0], st.next(), N)
    out = []
    for u in (0.5, 1.0, 2.0):
        vals = np.asarray(omega(spec, u * path.terminal))
        se = float(vals.std(ddof=1) / math.sqrt(N))
        z = abs(vals.mean() - integral_process_gcf(triple, f, 0.0, 2.0, u)) / se
        out.append(CheckResult(f"integral process gcf vs Psi u={u:g} (z-score)", z, 3.0, N, seed))
    return out


# ---------------------------------------------------------------------------
# 7: representability


def _coordinate_cdf(law: WeaklyStableLaw) -> Callable:
    from scipy import stats

    if law.kind == "twopoint":
        return lambda z: np.where(z < -1, 0.0, np.where(z < 1, 0.5, 1.0))
    if law.kind == "sas" and law.param == 2:
        return stats.norm(scale=math.sqrt(2.0)).cdf
    if law.kind == "sphere" and law.dim == 3:
        return lambda z: np.clip((np.asarray(z) + 1.0) / 2.0, 0.0, 1.0)
    raise NotImplementedError(str(law))


def check_representability(seed: int = 0, n_identity: int = 10_000, N: int = 100_000) -> list[CheckResult]:
    st = _Streams(seed, 7)
    out = []
    for law in (WeaklyStableLaw.two_point(), WeaklyStableLaw.symmetric_stable(2), WeaklyStableLaw.sphere(3)):
        pair = representable_pair(law)
        g = st.next()
        s = g.exponential(size=n_identity) * np.where(g.random(n_identity) < 0.1, 0.0, 1.0)
        t = g.exponential(size=n_identity)
        x, y = mu_sample(law, g, n_identity), mu_sample(law, g, n_identity)
        th, chi = pair.split(s, x, t, y)
        err = float(np.max(np.abs(s[:, None] * x + t[:, None] * y - th[:, None] * chi)))
        out.append(CheckResult(f"pointwise sX+tY = Theta*chi {law}", err, 1e-12, n_identity, seed))
        g = st.next()
        s = g.exponential(size=N)
        t = g.exponential(size=N)
        _, chi = pair.split(s, mu_sample(law, g, N), t, mu_sample(law, g, N))
        ks = ks_distance_cdf(_snap(chi[:, 0]), _coordinate_cdf(law))
        out.append(CheckResult(f"chi marginal vs mu {law}", ks, 0.01, N, seed))
    law = WeaklyStableLaw.sphere(3)
    g = st.next()
    th = representable_pair(law).theta(1.0, mu_sample(law, g, N), 2.0, mu_sample(law, g, N))
    ks = ks_distance_cdf(th, kernel_measure(ConvSpec.kingman(0.5), 1.0, 2.0))
    out.append(CheckResult("Theta(1,U;2,U') vs Kingman s=1/2 kernel of (1,2)", ks, 0.01, N, seed))
    return out


# ---------------------------------------------------------------------------
# 8: weak Poisson, sphere in R^3


def check_weak_poisson_sphere(seed: int = 0, N: int = 100_000, N_cf: int = 1_000_000) -> list[CheckResult]:
    st = _Streams(seed, 8)
    law = WeaklyStableLaw.sphere(3)
    g = st.next()
    S, Y = weak_poisson_path(law, 1.0, [0.0, 0.5, 1.0], g, N)
    y1 = _snap(Y.states[:, -1, 0])
    out = [CheckResult("Y_1 first coordinate vs uniform-power series (c=1)",
                       ks_distance_cdf(y1, compound_uniform_measure(1.0)), 0.015, N, seed)]
    signed = _snap(S.terminal * np.where(g.random(N) < 0.5, -1.0, 1.0))
    out.append(CheckResult("signed S_1 vs weak Poisson series law (c=1)",
                           ks_distance_cdf(signed, weak_poisson_dist(law, 1.0, 1.0)), 0.015, N, seed))
    S, _ = weak_poisson_path(law, 2.0, [0.0, 1.0], st.next(), N_cf)
    for t in (0.5, 1.0, 2.0):
        emp = float(np.mean(np.cos(t * S.terminal)))
        out.append(CheckResult(f"weak Poisson cf formula c=2 t={t:g}",
                               abs(emp - kingman_weak_poisson_cf(2.0, t)), 0.005, N_cf, seed))
    return out


# ---------------------------------------------------------------------------
# 9: weak integral


def check_weak_integral(seed: int = 0, N: int = 100_000) -> list[CheckResult]:
    st = _Streams(seed, 9)
    out = []
    sas2 = WeaklyStableLaw.symmetric_stable(2)
    sph = WeaklyStableLaw.sphere(3)
    spec = WeakRandomMeasureSpec(sas2, CompoundPoissonBase(1.5, dirac(1.0)), 1.0)
    rep = refinement_invariance_check(spec, StepFunction([0, 2], [1.0]), StepFunction([0, 1, 2], [1.0, 1.0]),
                                      N, st.next())
    out.append(CheckResult("refinement invariance sas:p=2 1[0,2) vs split", rep.statistic, 0.015, N, seed))
    spec3 = WeakRandomMeasureSpec(sph, CompoundPoissonBase(1.0, dirac(1.0)), 1.0)
    rep = refinement_invariance_check(spec3, StepFunction([0, 3], [2.0]), StepFunction([0, 1, 2, 3], [2.0] * 3),
                                      N, st.next())
    out.append(CheckResult("refinement invariance sphere:n=3 three-way split", rep.statistic, 0.015, N, seed))
    f = StepFunction([0.0, 1.0, 2.5], [1.0, -2.0])
    for sp in (spec, spec3):
        g = st.next()
        triple = sp.base.triple(sp.law)
        i_f, _ = weak_integral_pair(sp, f, g, N)
        x = mu_sample(sp.law, g, N)[:, 0]
        for t in (0.5, 1.0, 2.0):
            vals = np.cos(t * i_f * x)
            se = float(vals.std(ddof=1) / math.sqrt(N))
            z = abs(vals.mean() - weak_integral_cf(triple, sp.c, f, t)) / se
            out.append(CheckResult(f"weak integral cf {sp.law} t={t:g} (z-score)", z, 3.0, N, seed))
    triples = [
        (WeakLevyTriple(sas2, 0.7, SpectralMeasure(atoms=((1.0, 1.5), (2.5, 0.3)))), 1.0),
        (WeakLevyTriple(WeaklyStableLaw.kendall(0.8), 0.3, kendall_stable_spectral(0.8, 0.5)), 2.0),
        (WeakLevyTriple(sph, 0.0, sphere_stable_spectral(3, 1.2)), 0.5),
    ]
    for tr, c in triples:
        moved = pushforward_triple(tr, c, f)
        diff = max(abs(weak_integral_cf(tr, c, f, t) - weak_lk_cf(moved, t)) for t in (0.25, 0.5, 1.0, 2.0, 4.0))
        out.append(CheckResult(f"pushforward triple identity {tr.law}", diff, 1e-10, 0, seed))
    return out


# ---------------------------------------------------------------------------
# 10: subordination


def check_subordination(seed: int = 0, N: int = 100_000) -> list[CheckResult]:
    st = _Streams(seed, 10)
    rep = subordination_check(2.0, 0.5, (0.0, 0.5, 1.0), N, st.next(), 0.01)
    return [CheckResult("associated process alpha=2 beta=1/2 vs symmetric 1-stable", rep.statistic,
                        rep.threshold, N, seed)]


CRITERIA: dict[int, tuple[str, Callable[..., list[CheckResult]]]] = {
    1: ("kernel exactness", check_kernel_exactness),
    2: ("associativity and homogeneity", check_associativity_homogeneity),
    3: ("stable-law identity", check_stable_identity),
    4: ("compound Poisson closed forms", check_compound_poisson),
    5: ("Chapman-Kolmogorov", check_chapman_kolmogorov),
    6: ("integral process", check_integral_process),
    7: ("representability", check_representability),
    8: ("weak Poisson on the sphere", check_weak_poisson_sphere),
    9: ("weak integral", check_weak_integral),
    10: ("subordination", check_subordination),
}

SUITES: dict[str, tuple[int, ...]] = {
    "kernels": (1, 2),
    "stable": (3,),
    "cpoisson": (4,),
    "ck": (5,),
    "integral": (6,),
    "representable": (7,),
    "weakpoisson": (8,),
    "weakintegral": (9,),
    "subordination": (10,),
    "all": tuple(range(1, 11)),
}


def run_criterion(k: int, seed: int = 0) -> list[CheckResult]:
    return CRITERIA[k][1](seed)


def run_suite(name: str, seed: int = 0) -> list[CheckResult]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    results = [r for k in SUITES[name] for r in run_criterion(k, seed)]
    return sorted(results, key=lambda r: r.test)
