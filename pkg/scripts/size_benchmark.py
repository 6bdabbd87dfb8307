"""Wall time and jumps per path at fixed (M, dt) across graph sizes and dt values."""

import argparse

from expmc.estimator import PathParams
from expmc.experiments import bench, write_csv
from expmc.generators import GenSpec, generate
from expmc.graph import split


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kind", default="smallworld", choices=["smallworld", "scalefree"])
    ap.add_argument("--sizes", default="1000,10000,100000")
    ap.add_argument("--dts", default="0.03125")
    ap.add_argument("--samples", type=int, default=10**6)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--out", default="size_benchmark.csv")
    args = ap.parse_args()

    dts = [float(x) for x in args.dts.split(",")]
    p = PathParams.from_dt(1.0, dts[0], args.samples)
    graphs = ((args.kind, split(generate(GenSpec(args.kind, int(n))))) for n in args.sizes.split(","))
    recs = bench(graphs, "tc", p, dts, args.repeats, args.workers)
    write_csv(recs, args.out)

    for r in recs:
        print(f"n={r.n:7d} dbar={r.dbar:.3f} dmax={r.dmax:5.0f} dt={r.dt:.5f} "
              f"time={r.wall_time:.3f}s jumps/path={r.jumps_per_path:.4f} (beta*dbar={r.expected_jumps:.4f})")
    times = [r.wall_time for r in recs]
    print(f"max/min wall time: {max(times) / min(times):.2f}")


if __name__ == "__main__":
    main()
