"""RMS Monte Carlo error of TC/n against the sample count, for two graph sizes.

At dt = 1e-3 the splitting error is around 1e-7 and the curves show the
statistical error alone. Expect a slope near -0.5 and curves that do not
depend on n.
"""

import argparse

from expmc.experiments import m_sweep, write_csv
from expmc.generators import GenSpec, generate
from expmc.graph import split


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="100,1000")
    ap.add_argument("--samples", default="1000,10000,100000,1000000")
    ap.add_argument("--replicates", default="256,64,32,16")
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--out", default="sample_size_law.csv")
    args = ap.parse_args()

    samples = [int(x) for x in args.samples.split(",")]
    reps = [int(x) for x in args.replicates.split(",")]
    recs = []
    for n in map(int, args.sizes.split(",")):
        m = split(generate(GenSpec("smallworld", n, seed=0)))
        rs = m_sweep(m, "tcn", 1.0, args.dt, samples, reps, "strang", args.seed)
        for r in rs:
            print(f"n={n:6d} M={r.samples:8d} reps={r.replicates:4d} rms error={r.eps_total:.3e}")
        print(f"n={n}: slope {rs[0].fit_slope:.3f}")
        recs += rs
    write_csv(recs, args.out)


if __name__ == "__main__":
    main()
