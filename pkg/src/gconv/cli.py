"""Command-line front end: ``gconv <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .convolutions import ConvSpec, NoClosedForm, kernel_measure, kernel_sample, stable_density, stable_sample
from .gcf import gcf_with_error
from .infdiv import CompoundPoissonSpec, cpoisson_measure, cpoisson_sample
from .measures import DiracMix, Empirical, Measure, RngStream, SamplerBacked, dirac, format_number, from_csv
from .processes import CompoundPoissonFamily, StableFamily, StepFunction, simulate_levy
from .verify import SUITES, run_suite
from .weakintegral import weak_integral_cf, weak_integral_sample
from .weakmeasure import CompoundPoissonBase, WeakRandomMeasureSpec, weak_poisson_path
from .weakstable import WeaklyStableLaw


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _grid(args) -> np.ndarray:
    if args.grid:
        g = np.array(_floats(args.grid))
    else:
        g = np.linspace(0.0, args.tmax, args.steps + 1)
    if g.size < 1 or np.any(np.diff(g) <= 0):
        raise UsageError("time grid must be strictly increasing")
    return g


def _conv(text: str) -> ConvSpec:
    try:
        return ConvSpec.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _law(text: str) -> WeaklyStableLaw:
    try:
        return WeaklyStableLaw.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _measure(text: str, spec: ConvSpec | None = None) -> Measure:
    """``dirac:1``, ``atoms:0@0.5,2@0.5``, ``stable:p=1`` (needs ``--conv``) or ``csv:PATH``."""
    kind, _, rest = text.partition(":")
    try:
        if kind == "dirac":
            return dirac(float(rest))
        if kind == "atoms":
            pairs = [tuple(map(float, item.split("@"))) for item in rest.split(",")]
            return DiracMix.from_pairs(pairs)
        if kind == "stable":
            key, _, val = rest.partition("=")
            if key != "p" or spec is None:
                raise UsageError("stable measures are written stable:p=VALUE and need --conv")
            p = float(val)
            return SamplerBacked(lambda g, n: stable_sample(spec, p, g, n), f"sigma_{p}")
        if kind == "csv":
            with open(rest, encoding="utf-8") as fh:
                return from_csv(fh.read())
    except (ValueError, OSError) as exc:
        raise UsageError(f"bad measure {text!r}: {exc}") from exc
    raise UsageError(f"unknown measure form {text!r}")


def _emit(args, header: list[str], rows) -> None:
    rows = [list(r) for r in rows]
    if args.format == "json":
        text = json.dumps([dict(zip(header, r)) for r in rows], indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows([[_cell(v) for v in r] for r in rows])
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cell(v):
    return format_number(v) if isinstance(v, (float, np.floating)) else v


def _rng(args, stream: int = 0) -> np.random.Generator:
    return RngStream(args.seed, stream).generator()


def _n(args, default: int) -> int:
    n = args.samples if args.samples is not None else default
    if n < 1:
        raise UsageError("--samples must be positive")
    return n


# ---------------------------------------------------------------------------
# commands


def cmd_kernel(args) -> int:
    spec = _conv(args.conv)
    m = kernel_measure(spec, args.x, args.y)
    if isinstance(m, DiracMix) and args.samples is None:
        _emit(args, ["point", "weight"], zip(m.points, m.weights))
    else:
        draws = kernel_sample(spec, args.x, args.y, _rng(args), _n(args, 100_000))
        _emit(args, ["x"], ([v] for v in draws))
    return 0


def cmd_gcf(args) -> int:
    spec = _conv(args.conv)
    lam = _measure(args.measure, spec)
    ts = np.linspace(0.0, args.tmax, args.steps + 1)
    g = _rng(args)
    if isinstance(lam, SamplerBacked):
        lam = Empirical(lam.sample(g, _n(args, 1_000_000)))
    rows = [(t, *gcf_with_error(spec, lam, t)) for t in ts]
    if isinstance(lam, Empirical):
        _emit(args, ["t", "phi", "stderr"], rows)
    else:
        _emit(args, ["t", "phi"], ((t, v) for t, v, _ in rows))
    return 0


def cmd_stable(args) -> int:
    spec = _conv(args.conv)
    if args.density_at:
        xs = _floats(args.density_at)
        try:
            _emit(args, ["x", "density"], ((x, stable_density(spec, args.p, x)) for x in xs))
        except NoClosedForm as exc:
            raise UsageError(str(exc)) from exc
        return 0
    draws = stable_sample(spec, args.p, _rng(args), _n(args, 100_000))
    _emit(args, ["x"], ([v] for v in draws))
    return 0


def cmd_cpoisson(args) -> int:
    spec = _conv(args.conv)
    cp = CompoundPoissonSpec(spec, args.a, _measure(args.jump, spec))
    if args.series:
        try:
            m, _ = cpoisson_measure(cp)
        except NotImplementedError as exc:
            raise UsageError(str(exc)) from exc
        if not isinstance(m, DiracMix):
            raise UsageError("the series has a continuous part; draw samples instead")
        _emit(args, ["point", "weight"], zip(m.points, m.weights))
        return 0
    draws = cpoisson_sample(cp, _rng(args), _n(args, 100_000))
    _emit(args, ["x"], ([v] for v in draws))
    return 0


def _family(args, spec):
    kind, _, rest = args.family.partition(":")
    key, _, val = rest.partition("=")
    try:
        if kind == "stable" and key == "p":
            return StableFamily(spec, float(val))
        if kind == "poisson" and key == "rate":
            return CompoundPoissonFamily(spec, float(val), _measure(args.jump, spec))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError("family must be stable:p=VALUE or poisson:rate=VALUE")


def cmd_levy_path(args) -> int:
    spec = _conv(args.conv)
    fam = _family(args, spec)
    path = simulate_levy(spec, fam, _grid(args), _rng(args), args.paths)
    rows = ((i, t, v) for i, states in enumerate(path.states) for t, v in zip(path.times, states))
    _emit(args, ["path_id", "t", "state"], rows)
    return 0


def cmd_weak_poisson(args) -> int:
    law = _law(args.law)
    S, Y = weak_poisson_path(law, args.c, _grid(args), _rng(args), args.paths)
    header = ["path_id", "t", "S"] + [f"Y{j + 1}" for j in range(law.dim)]
    rows = ((i, t, s, *y) for i in range(S.states.shape[0])
            for t, s, y in zip(S.times, S.states[i], Y.states[i]))
    _emit(args, header, rows)
    return 0


def cmd_integrate(args) -> int:
    law = _law(args.law)
    try:
        f = StepFunction.parse(args.f)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    spec = WeakRandomMeasureSpec(law, CompoundPoissonBase(args.rate, _measure(args.jump)), args.c)
    if args.cf:
        triple = spec.base.triple(law)
        ts = np.linspace(0.0, args.tmax, args.steps + 1)
        _emit(args, ["t", "phi"], ((t, weak_integral_cf(triple, args.c, f, t)) for t in ts))
        return 0
    draws = weak_integral_sample(spec, f, _rng(args), _n(args, 100_000))
    _emit(args, ["x"], ([v] for v in draws))
    return 0


def cmd_verify(args) -> int:
    results = run_suite(args.suite, args.seed)
    records = [r.as_dict() for r in results]
    header = ["test", "statistic", "threshold", "pass", "samples", "seed"]
    _emit(args, header, ([rec[h] for h in header] for rec in records))
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--samples", type=int, default=None, help="Monte Carlo sample size")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="write to this file instead of stdout")

    p = argparse.ArgumentParser(prog="gconv", description="Generalized convolutions toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("kernel", cmd_kernel, "the law of delta_x * delta_y (atoms, or draws when not atomic)")
    sp.add_argument("--conv", required=True, help="e.g. kendall:a=0.7, pstable:p=2, max")
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--y", type=float, required=True)

    sp = add("gcf", cmd_gcf, "generalized characteristic function on a t-grid")
    sp.add_argument("--conv", required=True)
    sp.add_argument("--measure", required=True, help="dirac:X, atoms:X@W,..., stable:p=P or csv:PATH")
    sp.add_argument("--tmax", type=float, default=3.0)
    sp.add_argument("--steps", type=int, default=30)

    sp = add("stable", cmd_stable, "draws from sigma_p, or its closed-form density")
    sp.add_argument("--conv", required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--density-at", default=None, help="comma-separated points for the density")

    sp = add("cpoisson", cmd_cpoisson, "generalized compound Poisson draws or series")
    sp.add_argument("--conv", required=True)
    sp.add_argument("--a", type=float, required=True, help="intensity")
    sp.add_argument("--jump", default="dirac:1")
    sp.add_argument("--series", action="store_true", help="emit the truncated series (atomic cases)")

    for name, fn, text in (("levy-path", cmd_levy_path, "paths of a Levy process for one convolution"),
                           ("weak-poisson", cmd_weak_poisson, "weak Poisson paths and the associated process")):
        sp = add(name, fn, text)
        sp.add_argument("--grid", default=None, help="comma-separated times starting at 0")
        sp.add_argument("--tmax", type=float, default=1.0)
        sp.add_argument("--steps", type=int, default=10)
        sp.add_argument("--paths", type=int, default=1)
        if name == "levy-path":
            sp.add_argument("--conv", required=True)
            sp.add_argument("--family", required=True, help="stable:p=P or poisson:rate=R")
            sp.add_argument("--jump", default="dirac:1")
        else:
            sp.add_argument("--law", required=True, help="sas:p=P, sphere:n=N, twopoint")
            sp.add_argument("--c", type=float, default=1.0, help="intensity")

    sp = add("integrate", cmd_integrate, "weak stochastic integral of a step function")
    sp.add_argument("--law", required=True)
    sp.add_argument("--f", required=True, help='e.g. "1@[0,1);2@[1,2)"')
    sp.add_argument("--c", type=float, default=1.0, help="control intensity")
    sp.add_argument("--rate", type=float, default=1.0, help="jump rate per unit control")
    sp.add_argument("--jump", default="dirac:1")
    sp.add_argument("--cf", action="store_true", help="emit the characteristic function instead of draws")
    sp.add_argument("--tmax", type=float, default=3.0)
    sp.add_argument("--steps", type=int, default=30)

    sp = add("verify", cmd_verify, "run the statistical verification suite")
    sp.add_argument("--suite", choices=sorted(SUITES), default="all")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ValueError, NotImplementedError) as exc:
        print(f"gconv: error: {exc}", file=sys.stderr)
        return 1
    return 0


run = main


if __name__ == "__main__":
    sys.exit(main())
