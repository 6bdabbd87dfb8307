"""Estimation runs, convergence sweeps and benchmarks that produce CSV records."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, fields
from typing import Iterable, Optional, Sequence

import numpy as np

from .estimator import PathParams, entry_estimate, tc_estimate, vector_estimate
from .graph import SplitMatrix
from .oracle import exact_action, oracle_cap, splitting_product


@dataclass
class BenchRecord:
    kind: str
    n: int
    dbar: float
    dmax: float
    beta: float
    dt: float
    n_steps: int
    samples: int
    splitting: str
    target: str
    seed: int
    replicates: int = 1
    value: float = float("nan")
    std_error: float = float("nan")
    exact: float = float("nan")
    split_exact: float = float("nan")
    eps_split: float = float("nan")
    eps_stat: float = float("nan")
    eps_total: float = float("nan")
    fit_slope: float = float("nan")
    total_jumps: int = 0
    jumps_per_path: float = 0.0
    expected_jumps: float = float("nan")
    wall_time: float = 0.0


CSV_FIELDS = [f.name for f in fields(BenchRecord)]
TIMING_FIELDS = ("wall_time",)


def _fmt(x):
    if isinstance(x, float):
        return "" if np.isnan(x) else repr(x)
    return str(x)


def write_csv(records: Iterable[BenchRecord], path_or_fh) -> None:
    own = isinstance(path_or_fh, (str, bytes)) or hasattr(path_or_fh, "__fspath__")
    fh = open(path_or_fh, "w", newline="") if own else path_or_fh
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in records:
            w.writerow([_fmt(getattr(r, k)) for k in CSV_FIELDS])
    finally:
        if own:
            fh.close()


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# -- targets ----------------------------------------------------------------


def parse_target(target: str):
    """``tc``, ``tcn``, ``vector`` or ``entry:I`` -> (name, index)."""
    if target in ("tc", "tcn", "vector"):
        return target, None
    if target.startswith("entry:"):
        try:
            return "entry", int(target.split(":", 1)[1])
        except ValueError:
            pass
    raise ValueError(f"bad target {target!r} (tc, tcn, vector, entry:I)")


def run_target(m: SplitMatrix, target: str, p: PathParams, workers=None):
    """Monte Carlo value of a target with ``v = 1``.

    Returns ``(value, std_error, total_jumps, vector_or_None)``; for
    ``vector`` the value is the sum of the entries.
    """
    name, i = parse_target(target)
    ones = np.ones(m.n)
    if name == "entry":
        e = entry_estimate(m, ones, i, p, workers)
        return e.value, e.std_error, e.total_jumps, None
    if name == "vector":
        ve = vector_estimate(m, ones, p, workers)
        return float(ve.values.sum()), ve.std_error_global, ve.total_jumps, ve.values
    e = tc_estimate(m, p, workers)
    if name == "tcn":
        return e.value / m.n, e.std_error / m.n, e.total_jumps, None
    return e.value, e.std_error, e.total_jumps, None


def _reduce(x, target, n):
    name, i = parse_target(target)
    if name == "entry":
        return float(x[i])
    if name == "tcn":
        return float(x.sum()) / n
    if name == "tc":
        return float(x.sum())
    return x


def oracle_target(m: SplitMatrix, target: str, p: PathParams):
    """``(exact, splitting)`` reference values of a target, dense."""
    ones = np.ones(m.n)
    truth = exact_action(m, ones, p.beta)
    split = splitting_product(m, ones, p)
    return _reduce(truth, target, m.n), _reduce(split, target, m.n)


def _err(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def _base(kind, m, p, target):
    return BenchRecord(kind=kind, n=m.n, dbar=m.dbar, dmax=m.dmax, beta=p.beta, dt=p.dt,
                       n_steps=p.n_steps, samples=p.samples, splitting=p.splitting,
                       target=target, seed=p.seed)


def estimate_record(m: SplitMatrix, target: str, p: PathParams, workers=None,
                    with_oracle: Optional[bool] = None):
    """One estimation run; the dense oracle is added when ``n`` is under the cap."""
    if with_oracle is None:
        with_oracle = m.n <= oracle_cap()
    rec = _base("estimate", m, p, target)
    t0 = time.perf_counter()
    value, se, jumps, vec = run_target(m, target, p, workers)
    rec.wall_time = time.perf_counter() - t0
    rec.value, rec.std_error, rec.total_jumps = value, se, jumps
    rec.jumps_per_path = jumps / p.samples
    rec.expected_jumps = p.beta * m.dbar
    if with_oracle:
        exact, split = oracle_target(m, target, p)
        mc = vec if vec is not None else value
        rec.exact = float(np.sum(exact)) if vec is not None else exact
        rec.split_exact = float(np.sum(split)) if vec is not None else split
        rec.eps_split = _err(exact, split)
        rec.eps_stat = _err(split, mc)
        rec.eps_total = _err(exact, mc)
    return rec, vec


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x`` (nonpositive ``y`` dropped)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = (x > 0) & (y > 0) & np.isfinite(y)
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)[0])


def _sub_seed(seed, *keys):
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *keys])
    return int(ss.generate_state(1, np.uint64)[0])


def dt_sweep(m: SplitMatrix, target: str, beta: float, dts: Sequence[float], samples: int,
             splittings=("lie", "strang"), seed: int = 0, workers=None) -> list[BenchRecord]:
    """Splitting and Monte Carlo error against the dense exponential for each ``dt``.

    ``fit_slope`` is the log-log slope of ``eps_split`` against ``dt`` within
    each splitting. ``samples = 0`` skips Monte Carlo.
    """
    if not dts:
        raise ValueError("empty dt sweep")
    out = []
    for splitting in splittings:
        group = []
        for k, dt in enumerate(dts):
            p = PathParams.from_dt(beta, dt, max(samples, 1), splitting, _sub_seed(seed, k))
            rec = _base("convergence-dt", m, p, target)
            exact, split = oracle_target(m, target, p)
            rec.exact = float(np.sum(exact)) if target == "vector" else exact
            rec.split_exact = float(np.sum(split)) if target == "vector" else split
            rec.eps_split = _err(exact, split)
            if samples > 0:
                t0 = time.perf_counter()
                value, se, jumps, vec = run_target(m, target, p, workers)
                rec.wall_time = time.perf_counter() - t0
                mc = vec if vec is not None else value
                rec.value, rec.std_error, rec.total_jumps = value, se, jumps
                rec.jumps_per_path = jumps / p.samples
                rec.eps_stat = _err(split, mc)
                rec.eps_total = _err(exact, mc)
            else:
                rec.samples = 0
            group.append(rec)
        slope = loglog_slope([r.dt for r in group], [r.eps_split for r in group])
        for r in group:
            r.fit_slope = slope
        out.extend(group)
    return out


def m_sweep(m: SplitMatrix, target: str, beta: float, dt: float, sample_sizes: Sequence[int],
            replicates: int = 1, splitting: str = "strang", seed: int = 0,
            workers=None) -> list[BenchRecord]:
    """Monte Carlo error against the dense exponential for each sample size.

    Every (sample size, replicate) pair gets its own derived seed; ``eps_total``
    is the root-mean-square error over replicates and ``fit_slope`` its
    log-log slope against ``M``. ``replicates`` is one count or one per size.
    """
    if not sample_sizes:
        raise ValueError("empty sample-size sweep")
    reps = np.broadcast_to(np.asarray(replicates, dtype=np.int64), (len(sample_sizes),))
    if np.any(reps < 1):
        raise ValueError("replicates must be >= 1")
    if target == "vector":
        raise ValueError("sample-size sweeps take a scalar target")
    out = []
    probe = PathParams.from_dt(beta, dt, 1, splitting, seed)
    exact, split = oracle_target(m, target, probe)
    for k, M in enumerate(sample_sizes):
        p = PathParams.from_dt(beta, dt, int(M), splitting, seed)
        rec = _base("convergence-m", m, p, target)
        rec.replicates = R = int(reps[k])
        vals, ses, jumps = [], [], 0
        t0 = time.perf_counter()
        for r in range(R):
            pr = p.replace(seed=_sub_seed(seed, k, r))
            value, se, nj, _ = run_target(m, target, pr, workers)
            vals.append(value)
            ses.append(se)
            jumps += nj
        rec.wall_time = time.perf_counter() - t0
        vals = np.asarray(vals)
        rec.value = float(vals.mean())
        rec.std_error = float(np.mean(ses))
        rec.exact, rec.split_exact = exact, split
        rec.eps_split = abs(exact - split)
        rec.eps_stat = float(np.sqrt(np.mean((vals - split) ** 2)))
        rec.eps_total = float(np.sqrt(np.mean((vals - exact) ** 2)))
        rec.total_jumps = jumps
        rec.jumps_per_path = jumps / (p.samples * R)
        out.append(rec)
    slope = loglog_slope([r.samples for r in out], [r.eps_total for r in out])
    for r in out:
        r.fit_slope = slope
    return out


def bench(graphs: Iterable[tuple[str, SplitMatrix]], target: str, p: PathParams,
          dts: Optional[Sequence[float]] = None, repeats: int = 1,
          workers=None) -> list[BenchRecord]:
    """Timed runs over a set of graphs (and optionally a ``dt`` sweep).

    Wall time is the best of ``repeats`` runs after an untimed warm-up, and
    ``expected_jumps = beta * dbar`` is the mean jump count per path
    predicted for a uniform start.
    """
    out = []
    warmed = False
    for label, m in graphs:
        if not warmed:
            run_target(m, target, p.replace(samples=min(p.samples, 1000)), workers)
            warmed = True
        for dt in dts or [p.dt]:
            pp = PathParams.from_dt(p.beta, dt, p.samples, p.splitting, p.seed)
            rec = _base(f"bench:{label}" if label else "bench", m, pp, target)
            best = np.inf
            for _ in range(max(1, repeats)):
                t0 = time.perf_counter()
                value, se, jumps, _ = run_target(m, target, pp, workers)
                best = min(best, time.perf_counter() - t0)
            rec.wall_time = best
            rec.value, rec.std_error, rec.total_jumps = value, se, jumps
            rec.jumps_per_path = jumps / pp.samples
            rec.expected_jumps = pp.beta * m.dbar
            out.append(rec)
    return out


def strip_timing(rows: list[dict]) -> list[dict]:
    return [{k: v for k, v in r.items() if k not in TIMING_FIELDS} for r in rows]


__all__ = [
    "BenchRecord", "CSV_FIELDS", "write_csv", "read_csv", "parse_target", "run_target",
    "oracle_target", "estimate_record", "dt_sweep", "m_sweep", "bench", "loglog_slope",
    "strip_timing",
]
