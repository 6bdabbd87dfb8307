"""Command line interface: ``expmc {generate,estimate,convergence,bench}``."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import experiments as ex
from .estimator import PathParams
from .generators import GenSpec, generate
from .graph import split, stats
from .metrics import BetaRule, resolve_beta
from .mmio import load_matrix_market, write_matrix_market

DEFAULT_DT = 0.03125
DEFAULT_SAMPLES = 10**6


class ConfigError(Exception):
    pass


def _floats(s):
    return [float(x) for x in s.split(",") if x.strip()]


def _ints(s):
    return [int(float(x)) for x in s.split(",") if x.strip()]


def _replicates(s):
    reps = _ints(s)
    return reps[0] if len(reps) == 1 else reps


def _add_graph(ap):
    g = ap.add_argument_group("graph")
    g.add_argument("--input", help="MatrixMarket file")
    g.add_argument("--gen", choices=["smallworld", "scalefree", "erdosrenyi"])
    g.add_argument("--n", type=int, help="nodes for --gen")
    g.add_argument("--k", type=int, default=1, help="ring radius (smallworld)")
    g.add_argument("--ps", type=float, default=0.4, help="shortcut endpoints per node (smallworld)")
    g.add_argument("--m0", type=int, default=2, help="edges per new node (scalefree)")
    g.add_argument("--p", type=float, default=0.01, help="edge probability (erdosrenyi)")
    g.add_argument("--graph-seed", type=int, default=0)


def _add_path(ap):
    g = ap.add_argument_group("paths")
    b = g.add_mutually_exclusive_group()
    b.add_argument("--beta", type=float)
    b.add_argument("--beta-rule", choices=["lmax", "dmax"])
    g.add_argument("--dt", type=float)
    g.add_argument("--steps", type=int)
    g.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--target", default="tc", help="tc | tcn | vector | entry:I")


def _spec(args, n=None):
    return GenSpec(kind=args.gen, n=n if n is not None else args.n, k=args.k, ps=args.ps,
                   m0=args.m0, p=args.p, seed=args.graph_seed)


def _graph(args):
    if bool(args.input) == bool(args.gen):
        raise ConfigError("give exactly one of --input or --gen")
    if args.input:
        return split(load_matrix_market(args.input))
    if args.n is None:
        raise ConfigError("--gen needs --n")
    return split(generate(_spec(args)))


def _beta(args, m):
    if getattr(args, "beta_rule", None):
        st = stats(m, 100 if args.beta_rule == "lmax" else 0)
        return resolve_beta(BetaRule(args.beta_rule), st)
    return 1.0 if args.beta is None else args.beta


def _params(args, beta, splitting):
    if args.dt is not None and args.steps is not None:
        raise ConfigError("give at most one of --dt or --steps")
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1")
    if args.steps is not None:
        return PathParams(beta, args.steps, args.samples, splitting, args.seed)
    return PathParams.from_dt(beta, args.dt or DEFAULT_DT, args.samples, splitting, args.seed)


def _emit(records, out):
    if out:
        ex.write_csv(records, out)
    else:
        ex.write_csv(records, sys.stdout)


def cmd_generate(args):
    if not args.gen or args.n is None:
        raise ConfigError("generate needs --gen and --n")
    a = generate(_spec(args))
    m = split(a)
    if args.out:
        write_matrix_market(a, args.out)
    print(f"n={a.n} edges={a.n_edges} dbar={m.dbar:.6g} dmax={m.dmax:.6g}", file=sys.stderr)


def cmd_estimate(args):
    m = _graph(args)
    ex.parse_target(args.target)
    p = _params(args, _beta(args, m), args.splitting)
    rec, vec = ex.estimate_record(m, args.target, p, args.workers,
                                  with_oracle=None if args.oracle else False)
    _emit([rec], args.out)
    if vec is not None and args.vector_out:
        np.savetxt(args.vector_out, vec, fmt="%.17g")
    msg = f"{args.target} = {rec.value:.10g} ± {rec.std_error:.3g}"
    if not np.isnan(rec.exact):
        msg += f"  (exact {rec.exact:.10g}, splitting {rec.split_exact:.10g})"
    print(msg, file=sys.stderr)


def cmd_convergence(args):
    m = _graph(args)
    ex.parse_target(args.target)
    beta = _beta(args, m)
    if bool(args.dt_sweep) == bool(args.m_sweep):
        raise ConfigError("give exactly one of --dt-sweep or --m-sweep")
    splittings = ["lie", "strang"] if args.splitting == "both" else [args.splitting]
    if args.dt_sweep:
        recs = ex.dt_sweep(m, args.target, beta, _floats(args.dt_sweep), args.samples,
                           splittings, args.seed, args.workers)
    else:
        recs = []
        for s in splittings:
            recs += ex.m_sweep(m, args.target, beta, args.dt or 1e-3, _ints(args.m_sweep),
                               _replicates(args.replicates), s, args.seed, args.workers)
    _emit(recs, args.out)
    seen = {}
    for r in recs:
        seen.setdefault(r.splitting, r.fit_slope)
    for s, slope in seen.items():
        print(f"{s}: log-log slope {slope:.3f}", file=sys.stderr)


def cmd_bench(args):
    p = _params(args, 1.0 if args.beta is None else args.beta, args.splitting)
    if args.n_sweep:
        if not args.gen:
            raise ConfigError("--n-sweep needs --gen")
        graphs = ((f"{args.gen}", split(generate(_spec(args, n)))) for n in _ints(args.n_sweep))
    else:
        graphs = [("", _graph(args))]
    dts = _floats(args.dt_sweep) if args.dt_sweep else None
    recs = ex.bench(graphs, args.target, p, dts, args.repeats, args.workers)
    _emit(recs, args.out)
    for r in recs:
        rel = abs(r.jumps_per_path - r.expected_jumps) / r.expected_jumps if r.expected_jumps else 0.0
        flag = "" if rel <= 0.05 else "  [jumps/path off by more than 5%]"
        print(f"n={r.n} dt={r.dt:.5g} time={r.wall_time:.3f}s jumps/path={r.jumps_per_path:.4f} "
              f"beta*dbar={r.expected_jumps:.4f}{flag}", file=sys.stderr)
    times = [r.wall_time for r in recs]
    if len(times) > 1:
        print(f"wall-time max/min = {max(times) / min(times):.2f}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="expmc", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic graph as MatrixMarket")
    _add_graph(g)
    g.add_argument("--out", help="output .mtx path")
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("estimate", help="one Monte Carlo estimate, CSV record")
    _add_graph(e)
    _add_path(e)
    e.add_argument("--splitting", choices=["lie", "strang"], default="strang")
    e.add_argument("--out", help="CSV path (default stdout)")
    e.add_argument("--vector-out", help="per-node values for --target vector")
    e.add_argument("--no-oracle", dest="oracle", action="store_false",
                   help="skip the dense reference even when n is under the cap")
    e.set_defaults(func=cmd_estimate)

    c = sub.add_parser("convergence", help="dt or sample-size sweep against the dense oracle")
    _add_graph(c)
    _add_path(c)
    c.add_argument("--splitting", choices=["lie", "strang", "both"], default="both")
    c.add_argument("--dt-sweep", help="comma-separated dt values")
    c.add_argument("--m-sweep", help="comma-separated sample sizes")
    c.add_argument("--replicates", default="1",
                   help="independent runs per sample size: one count or a comma list")
    c.add_argument("--out")
    c.set_defaults(func=cmd_convergence)

    b = sub.add_parser("bench", help="timing and jump accounting across graph sizes")
    _add_graph(b)
    _add_path(b)
    b.add_argument("--splitting", choices=["lie", "strang"], default="strang")
    b.add_argument("--n-sweep", help="comma-separated sizes for --gen")
    b.add_argument("--dt-sweep", help="comma-separated dt values")
    b.add_argument("--repeats", type=int, default=1)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"expmc {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
