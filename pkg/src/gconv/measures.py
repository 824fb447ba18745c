"""Probability measures on the line and the statistical primitives used to check them.

Four concrete representations are provided:

* :class:`DiracMix` -- finitely many atoms with weights;
* :class:`GridDensity` -- a density tabulated on a sorted (possibly log-spaced)
  grid, with the mass lost to truncation recorded;
* :class:`SamplerBacked` -- an opaque draw procedure;
* :class:`Empirical` -- a finite sample.

:class:`Mixture` combines any of these with mixing weights; it is how the
kernels with an atom plus a continuous part (Kendall) are returned.
:class:`Symmetrized` turns a law on the half-line into the law of ``eps * X``
with an independent fair sign ``eps``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import stats

__all__ = [
    "RngStream",
    "as_generator",
    "Measure",
    "DiracMix",
    "GridDensity",
    "SamplerBacked",
    "Empirical",
    "Mixture",
    "Symmetrized",
    "dirac",
    "mixture",
    "ks_distance",
    "ks_distance_cdf",
    "quadrature",
    "empirical_cf",
    "empirical_cf_with_error",
    "to_csv",
    "from_csv",
    "UnsupportedRepresentation",
]

WEIGHT_TOL = 1e-12
GRID_MASS_TOL = 1e-6


class UnsupportedRepresentation(TypeError):
    """Raised when an operation cannot act on the given measure representation."""


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream identified by ``(seed, stream)``.

    Identical pairs always produce identical draw sequences; distinct stream
    ids give statistically independent generators.
    """

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, stream: int) -> "RngStream":
        return RngStream(self.seed, self.stream * 1_000_003 + stream + 1)


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator, an :class:`RngStream`, an int seed or None."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    return np.random.default_rng(rng)


class Measure:
    """Base class. Subclasses implement :meth:`sample` and, when possible, :meth:`cdf`."""

    def sample(self, rng, size: int) -> np.ndarray:
        raise NotImplementedError

    def cdf(self, x):
        raise UnsupportedRepresentation(f"{type(self).__name__} has no closed CDF")

    def cdf_left(self, x):
        """P(X < x)."""
        x = np.asarray(x, dtype=float)
        return self.cdf(np.nextafter(x, -np.inf))


@dataclass(frozen=True, eq=False)
class DiracMix(Measure):
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.atleast_1d(np.asarray(self.points, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if pts.shape != w.shape or pts.ndim != 1 or pts.size == 0:
            raise ValueError("points and weights must be equal-length nonempty vectors")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]], merge: bool = True) -> "DiracMix":
        pts, ws = zip(*pairs)
        pts = np.asarray(pts, dtype=float)
        ws = np.asarray(ws, dtype=float)
        if merge:
            uniq, inv = np.unique(pts, return_inverse=True)
            merged = np.zeros_like(uniq)
            np.add.at(merged, inv, ws)
            pts, ws = uniq, merged
        keep = ws > 0
        pts, ws = pts[keep], ws[keep]
        return cls(pts, ws / ws.sum())

    def sample(self, rng, size: int) -> np.ndarray:
        g = as_generator(rng)
        if self.points.size == 1:
            return np.full(size, self.points[0])
        idx = g.choice(self.points.size, size=size, p=self.weights)
        return self.points[idx]

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        order = np.argsort(self.points)
        cw = np.concatenate([[0.0], np.cumsum(self.weights[order])])
        k = np.searchsorted(self.points[order], x, side="right")
        return np.minimum(cw[k], 1.0)

    def atom(self, x: float) -> float:
        return float(self.weights[self.points == x].sum())

    def __repr__(self):
        body = ", ".join(f"{p:g}:{w:.6g}" for p, w in zip(self.points, self.weights))
        return f"DiracMix({body})"


def dirac(x: float) -> DiracMix:
    return DiracMix([x], [1.0])


@dataclass(frozen=True, eq=False)
class GridDensity(Measure):
    """Density tabulated on a sorted grid, linear between nodes.

    ``tail_mass`` is the probability beyond ``x[-1]`` that the grid does not
    carry. When ``tail_index`` is given, that tail is a power law
    ``x**(-tail_index-1)`` and is sampled exactly; otherwise tail draws are
    returned at ``x[-1]``. ``lower_mass`` likewise records mass below ``x[0]``
    (placed at ``x[0]``).
    """

    x: np.ndarray
    density: np.ndarray
    tail_mass: float = 0.0
    tail_index: float | None = None
    lower_mass: float = 0.0
    normalize: bool = True

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        f = np.asarray(self.density, dtype=float)
        if x.ndim != 1 or x.shape != f.shape or x.size < 2:
            raise ValueError("grid and density must be equal-length vectors of size >= 2")
        if np.any(np.diff(x) <= 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(f < 0) or not np.all(np.isfinite(f)):
            raise ValueError("density values must be finite and nonnegative")
        body = np.trapezoid(f, x)
        total = body + self.tail_mass + self.lower_mass
        if self.normalize:
            if body <= 0:
                raise ValueError("density integrates to zero")
            f = f * (1.0 - self.tail_mass - self.lower_mass) / body
        elif abs(total - 1.0) > GRID_MASS_TOL:
            raise ValueError(f"grid density has total mass {total!r}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "density", f)
        object.__setattr__(self, "normalize", False)

    @property
    def cell_masses(self) -> np.ndarray:
        return 0.5 * (self.density[1:] + self.density[:-1]) * np.diff(self.x)

    def pdf(self, x):
        return np.interp(x, self.x, self.density, left=0.0, right=0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        xs, f = self.x, self.density
        cum = np.concatenate([[0.0], np.cumsum(self.cell_masses)]) + self.lower_mass
        i = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, xs.size - 2)
        h = x - xs[i]
        slope = (f[i + 1] - f[i]) / (xs[i + 1] - xs[i])
        inside = cum[i] + f[i] * h + 0.5 * slope * h * h
        out = np.where(x < xs[0], 0.0, np.where(x >= xs[-1], 1.0 - self.tail_mass, inside))
        if self.tail_index is not None:
            tail = self.tail_mass * (1.0 - (xs[-1] / np.maximum(x, xs[-1])) ** self.tail_index)
            out = np.where(x >= xs[-1], out + tail, out)
        return np.clip(out, 0.0, 1.0)

    def sample(self, rng, size: int) -> np.ndarray:
        g = as_generator(rng)
        xs, f = self.x, self.density
        masses = self.cell_masses
        probs = np.concatenate([[self.lower_mass], masses, [self.tail_mass]])
        probs = probs / probs.sum()
        cell = g.choice(probs.size, size=size, p=probs)
        out = np.empty(size)
        low = cell == 0
        high = cell == probs.size - 1
        out[low] = xs[0]
        if self.tail_index is not None:
            out[high] = xs[-1] * g.random(high.sum()) ** (-1.0 / self.tail_index)
        else:
            out[high] = xs[-1]
        mid = ~(low | high)
        i = cell[mid] - 1
        h = xs[i + 1] - xs[i]
        f0, f1 = f[i], f[i + 1]
        # invert the quadratic cell CDF: f0*h*u + (f1-f0)*h*u^2/2 = r*cell_mass
        r = g.random(i.size) * 0.5 * (f0 + f1)
        a = 0.5 * (f1 - f0)
        disc = np.sqrt(np.maximum(f0 * f0 + 4.0 * a * r, 0.0))
        denom = f0 + disc
        u = np.where(denom > 0, 2.0 * r / np.where(denom > 0, denom, 1.0), g.random(i.size))
        out[mid] = xs[i] + h * np.clip(u, 0.0, 1.0)
        return out


@dataclass(frozen=True, eq=False)
class SamplerBacked(Measure):
    draw: Callable[[np.random.Generator, int], np.ndarray]
    name: str = "sampler"
    cdf_fn: Callable | None = None

    def sample(self, rng, size: int) -> np.ndarray:
        return np.asarray(self.draw(as_generator(rng), size), dtype=float)

    def cdf(self, x):
        if self.cdf_fn is None:
            return super().cdf(x)
        return self.cdf_fn(np.asarray(x, dtype=float))


@dataclass(frozen=True, eq=False)
class Empirical(Measure):
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float).ravel()
        if s.size < 1:
            raise ValueError("empirical measure needs at least one sample")
        object.__setattr__(self, "samples", np.sort(s))

    def sample(self, rng, size: int) -> np.ndarray:
        g = as_generator(rng)
        return self.samples[g.integers(0, self.samples.size, size)]

    def cdf(self, x):
        return np.searchsorted(self.samples, np.asarray(x, dtype=float), side="right") / self.samples.size


@dataclass(frozen=True, eq=False)
class Mixture(Measure):
    weights: tuple[float, ...]
    components: tuple[Measure, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(self.components) != w.size or w.size == 0:
            raise ValueError("need one weight per component")
        if np.any(w < 0) or abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise ValueError("mixture weights must be a probability vector")

    def sample(self, rng, size: int) -> np.ndarray:
        g = as_generator(rng)
        which = g.choice(len(self.components), size=size, p=np.asarray(self.weights))
        out = np.empty(size)
        for k, comp in enumerate(self.components):
            sel = which == k
            n = int(sel.sum())
            if n:
                out[sel] = comp.sample(g, n)
        return out

    def cdf(self, x):
        return sum(w * np.asarray(c.cdf(x)) for w, c in zip(self.weights, self.components))

    def atoms(self) -> DiracMix | None:
        """The combined atomic part (unnormalized weights folded into a DiracMix), if any."""
        pairs = [(p, w * q) for w, c in zip(self.weights, self.components)
                 if isinstance(c, DiracMix) for p, q in zip(c.points, c.weights)]
        return DiracMix.from_pairs(pairs) if pairs else None


@dataclass(frozen=True, eq=False)
class Symmetrized(Measure):
    """Law of ``eps * X`` with ``X ~ base`` on [0, inf) and an independent fair sign."""

    base: Measure

    def sample(self, rng, size: int) -> np.ndarray:
        g = as_generator(rng)
        x = self.base.sample(g, size)
        return np.where(g.random(size) < 0.5, -x, x)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * np.asarray(self.base.cdf(x)) + 0.5 * (1.0 - np.asarray(self.base.cdf_left(-x)))


def mixture(weighted: Sequence[tuple[float, Measure]]) -> Measure:
    """Build a mixture, flattening nested mixtures and merging atomic parts."""
    flat: list[tuple[float, Measure]] = []
    for w, m in weighted:
        if w <= 0:
            continue
        if isinstance(m, Mixture):
            flat.extend((w * wi, ci) for wi, ci in zip(m.weights, m.components))
        else:
            flat.append((w, m))
    atoms = [(w, m) for w, m in flat if isinstance(m, DiracMix)]
    rest = [(w, m) for w, m in flat if not isinstance(m, DiracMix)]
    parts = list(rest)
    if atoms:
        wa = sum(w for w, _ in atoms)
        pairs = [(p, w * q / wa) for w, m in atoms for p, q in zip(m.points, m.weights)]
        parts.insert(0, (wa, DiracMix.from_pairs(pairs)))
    total = sum(w for w, _ in parts)
    if len(parts) == 1:
        return parts[0][1]
    return Mixture(tuple(w / total for w, _ in parts), tuple(m for _, m in parts))


def ks_distance(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("ks_distance needs two nonempty samples")
    with np.errstate(divide="ignore"):  # the unused p-value divides by zero for size-1 samples
        return float(stats.ks_2samp(a, b, method="asymp").statistic)


def ks_distance_cdf(samples, measure_or_cdf) -> float:
    """One-sample KS distance against a CDF; handles atoms in the reference law."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("ks_distance_cdf needs a nonempty sample")
    if isinstance(measure_or_cdf, Measure):
        cdf, cdf_left = measure_or_cdf.cdf, measure_or_cdf.cdf_left
    else:
        cdf = measure_or_cdf
        cdf_left = lambda z: cdf(np.nextafter(z, -np.inf))  # noqa: E731
    u, first = np.unique(x, return_index=True)
    n = x.size
    last = np.concatenate([first[1:], [n]])
    d_right = np.abs(last / n - np.asarray(cdf(u)))
    d_left = np.abs(first / n - np.asarray(cdf_left(u)))
    return float(max(d_right.max(), d_left.max()))


def _segment_trapezoid(x, f, g, breakpoints):
    """Trapezoid of g*f on the grid, splitting cells at the breakpoints of g."""
    bps = np.asarray([b for b in breakpoints if x[0] < b < x[-1]], dtype=float)
    if bps.size == 0:
        return np.trapezoid(np.asarray(g(x), dtype=float) * f, x)
    xx = np.union1d(x, bps)
    ff = np.interp(xx, x, f)
    h = np.diff(xx)
    # one-sided values so a jump of g sits exactly on a cell boundary
    eps = 1e-10 * h
    gl = np.asarray(g(xx[:-1] + eps), dtype=float)
    gr = np.asarray(g(xx[1:] - eps), dtype=float)
    return float(np.sum(0.5 * (gl * ff[:-1] + gr * ff[1:]) * h))


def quadrature(m: Measure, g: Callable, breakpoints: Sequence[float] = ()) -> float:
    """Integrate ``g`` against ``m``.

    Exact weighted sums for atoms and samples, composite trapezoid for grid
    densities (with ``g(x[-1]) * tail_mass`` as the tail correction). Pass
    ``breakpoints`` where ``g`` has kinks or jumps.
    """
    if isinstance(m, DiracMix):
        return float(np.dot(m.weights, np.asarray(g(m.points), dtype=float)))
    if isinstance(m, Empirical):
        return float(np.mean(np.asarray(g(m.samples), dtype=float)))
    if isinstance(m, GridDensity):
        body = _segment_trapezoid(m.x, m.density, g, breakpoints)
        ends = np.asarray(g(np.array([m.x[0], m.x[-1]])), dtype=float)
        return float(body + m.lower_mass * ends[0] + m.tail_mass * ends[1])
    if isinstance(m, Mixture):
        return float(sum(w * quadrature(c, g, breakpoints) for w, c in zip(m.weights, m.components)))
    if isinstance(m, Symmetrized):
        mirrored = tuple(-b for b in breakpoints)
        return 0.5 * quadrature(m.base, g, breakpoints) + 0.5 * quadrature(
            m.base, lambda z: g(-np.asarray(z)), mirrored)
    raise UnsupportedRepresentation(
        f"quadrature needs an explicit measure, got {type(m).__name__}; draw an Empirical first"
    )


def empirical_cf(samples, t) -> complex:
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("empirical_cf needs a nonempty sample")
    if t == 0:
        return complex(1.0, 0.0)
    return complex(np.mean(np.exp(1j * t * x)))


def empirical_cf_with_error(samples, t) -> tuple[complex, float]:
    """Empirical characteristic function and the standard error of its real part."""
    x = np.asarray(samples, dtype=float).ravel()
    val = empirical_cf(x, t)
    se = float(np.std(np.cos(t * x), ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
    return val, se


def to_csv(m: Measure) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if isinstance(m, Empirical):
        w.writerow(["x"])
        w.writerows([[repr(float(v))] for v in m.samples])
    elif isinstance(m, DiracMix):
        w.writerow(["point", "weight"])
        w.writerows([[format_number(p), format_number(q)] for p, q in zip(m.points, m.weights)])
    elif isinstance(m, GridDensity):
        w.writerow(["x", "density"])
        w.writerows([[format_number(p), format_number(q)] for p, q in zip(m.x, m.density)])
    else:
        raise UnsupportedRepresentation(f"no CSV form for {type(m).__name__}")
    return buf.getvalue()


def from_csv(text: str) -> Measure:
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], [r for r in rows[1:] if r]
    cols = np.array([[float(v) for v in r] for r in body]).T
    if header == ["x"]:
        return Empirical(cols[0])
    if header == ["point", "weight"]:
        return DiracMix(cols[0], cols[1] / cols[1].sum())
    if header == ["x", "density"]:
        return GridDensity(cols[0], cols[1])
    raise ValueError(f"unrecognized CSV header {header}")


def format_number(v: float) -> str:
    v = float(v)
    return str(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)
