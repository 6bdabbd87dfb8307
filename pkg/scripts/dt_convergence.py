"""Splitting error against dt for total communicability and one entry of e^A 1.

    python scripts/dt_convergence.py --n 100 --samples 1000000 --out results/dt.csv
"""

import argparse
import sys

from expmc.experiments import dt_sweep, write_csv
from expmc.generators import GenSpec, generate
from expmc.graph import split

DTS = [0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--graph-seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=0, help="0 = oracle only")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--entry", type=int, default=0)
    ap.add_argument("--out", default="dt_convergence.csv")
    args = ap.parse_args()

    m = split(generate(GenSpec("smallworld", args.n, seed=args.graph_seed)))
    recs = []
    for target in ("tc", f"entry:{args.entry}"):
        recs += dt_sweep(m, target, 1.0, DTS, args.samples, seed=args.seed)
    write_csv(recs, args.out)

    print(f"{'target':>10} {'splitting':>9} {'dt':>9} {'eps_split':>11} {'mc value':>13} {'std err':>9}")
    for r in recs:
        print(f"{r.target:>10} {r.splitting:>9} {r.dt:9.5f} {r.eps_split:11.3e} {r.value:13.6f} {r.std_error:9.2e}")
    seen = {}
    for r in recs:
        seen.setdefault((r.target, r.splitting), r.fit_slope)
    for (t, s), slope in seen.items():
        print(f"{t} {s}: slope {slope:.3f}", file=sys.stderr)


if __name__ == "__main__":
    main()
