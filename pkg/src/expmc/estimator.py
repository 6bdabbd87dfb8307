"""Monte Carlo estimators for the Lie/Strang splitting of ``exp(beta A) v``.

Every path runs ``N = beta / dt`` segments of the chain generated by ``-L``
and carries a multiplicative functional built from ``exp(dt * d_j)``
factors. For the Strang product the functional of a path visiting
``i_0, i_1, ..., i_N`` is

    exp(dt * (d_{i_0}/2 + d_{i_1} + ... + d_{i_{N-1}} + d_{i_N}/2))

and the Lie product drops the half weights in favour of a full weight on
one end (after each segment for single entries, before each segment for
the forward/vector form).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .graph import SplitMatrix
from .sampler import LIE_AFTER, LIE_BEFORE, STRANG, run_paths, set_workers

Splitting = Literal["lie", "strang"]

BATCH = 1 << 20


@dataclass(frozen=True)
class PathParams:
    beta: float
    n_steps: int
    samples: int
    splitting: Splitting = "strang"
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if self.splitting not in ("lie", "strang"):
            raise ValueError(f"unknown splitting {self.splitting!r}")

    @property
    def dt(self) -> float:
        return self.beta / self.n_steps

    @classmethod
    def from_dt(cls, beta: float, dt: float, samples: int, splitting: Splitting = "strang",
                seed: int = 0) -> "PathParams":
        """Round ``beta/dt`` to the nearest step count; ``dt`` becomes ``beta/N``."""
        if not dt > 0:
            raise ValueError(f"dt must be > 0, got {dt}")
        n_steps = max(1, int(round(beta / dt)))
        return cls(beta, n_steps, samples, splitting, seed)

    def replace(self, **kw) -> "PathParams":
        fields = dict(beta=self.beta, n_steps=self.n_steps, samples=self.samples,
                      splitting=self.splitting, seed=self.seed)
        fields.update(kw)
        return PathParams(**fields)


@dataclass
class Estimate:
    value: float
    std_error: float
    samples_used: int
    total_jumps: int

    @property
    def jumps_per_path(self) -> float:
        return self.total_jumps / self.samples_used


@dataclass
class VectorEstimate:
    """Full-vector estimate.

    ``std_error_global`` is the standard error of ``V * w`` (the scalar path
    functional); ``entry_std_errors`` are per-entry standard errors of the
    tallies ``V * w * [end == i]``.
    """

    values: np.ndarray
    std_error_global: float
    samples_used: int
    total_jumps: int
    v_sum: float
    functional_mean: float
    entry_std_errors: np.ndarray

    @property
    def jumps_per_path(self) -> float:
        return self.total_jumps / self.samples_used


class _Moments:
    """Running sums over batches, reduced in a fixed order."""

    def __init__(self):
        self.s1 = 0.0
        self.s2 = 0.0
        self.jumps = 0

    def add(self, x, jumps):
        self.s1 += float(np.sum(x))
        self.s2 += float(np.sum(x * x))
        self.jumps += int(jumps.sum())

    def mean_se(self, m):
        mean = self.s1 / m
        if m < 2:
            return mean, 0.0
        var = max(self.s2 / m - mean * mean, 0.0) * m / (m - 1)
        return mean, float(np.sqrt(var / m))


def _batches(total):
    for first in range(0, total, BATCH):
        yield first, min(BATCH, total - first)


def _check_vector(v, n):
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (n,):
        raise ValueError(f"v must have shape ({n},), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("v has non-finite entries")
    return v


def sample_functionals(m: SplitMatrix, p: PathParams, start: int = -1, start_weights=None,
                       first: int = 0, count: int | None = None, forward: bool = True):
    """Raw per-path output ``(end_state, weight, jumps)`` for streams ``first..``.

    ``forward`` selects the Lie weight placement used by the vector form.
    """
    if p.splitting == "strang":
        scheme = STRANG
    else:
        scheme = LIE_BEFORE if forward else LIE_AFTER
    count = p.samples if count is None else count
    end, logw, jumps = run_paths(m, p.dt, p.n_steps, scheme, p.seed, first, count,
                                 start=start, start_weights=start_weights)
    return end, np.exp(logw), jumps


def entry_estimate(m: SplitMatrix, v, i: int, p: PathParams, workers: int | None = None) -> Estimate:
    """Estimate entry ``i`` of the splitting approximation to ``exp(beta A) v``.

    Paths start at ``i`` and the contribution of each is ``w * v[end]``.
    ``v`` may have any sign.
    """
    v = _check_vector(v, m.n)
    if not 0 <= i < m.n:
        raise IndexError(f"entry {i} out of range [0, {m.n})")
    set_workers(workers)
    acc = _Moments()
    for first, count in _batches(p.samples):
        end, w, jumps = sample_functionals(m, p, start=i, first=first, count=count, forward=False)
        acc.add(w * v[end], jumps)
    mean, se = acc.mean_se(p.samples)
    return Estimate(mean, se, p.samples, acc.jumps)


def vector_estimate(m: SplitMatrix, v, p: PathParams, workers: int | None = None) -> VectorEstimate:
    """Estimate the whole splitting solution for ``v >= 0``.

    Start states are drawn from ``v / V`` and ``V * w / M`` is tallied on the
    final state of each path; this is valid because ``-L`` is symmetric, so
    the chain run forward has the same transition law as the one run backward.
    """
    v = _check_vector(v, m.n)
    if np.any(v < 0):
        raise ValueError("vector estimate needs v >= 0")
    vsum = float(v.sum())
    if vsum <= 0:
        raise ValueError("vector estimate needs sum(v) > 0")
    set_workers(workers)
    acc = _Moments()
    s1 = np.zeros(m.n)
    s2 = np.zeros(m.n)
    for first, count in _batches(p.samples):
        end, w, jumps = sample_functionals(m, p, start_weights=v, first=first, count=count)
        x = vsum * w
        acc.add(x, jumps)
        s1 += np.bincount(end, weights=x, minlength=m.n)
        s2 += np.bincount(end, weights=x * x, minlength=m.n)
    M = p.samples
    mean, se = acc.mean_se(M)
    values = s1 / M
    if M > 1:
        var = np.maximum(s2 / M - values**2, 0.0) * M / (M - 1)
        entry_se = np.sqrt(var / M)
    else:
        entry_se = np.zeros(m.n)
    return VectorEstimate(values, se, M, acc.jumps, vsum, mean / vsum, entry_se)


def tc_estimate(m: SplitMatrix, p: PathParams, workers: int | None = None) -> Estimate:
    """Total communicability ``(1, x)`` with ``v = 1``: the mean of ``n * w``."""
    set_workers(workers)
    acc = _Moments()
    ones = np.ones(m.n)
    for first, count in _batches(p.samples):
        _, w, jumps = sample_functionals(m, p, start_weights=ones, first=first, count=count)
        acc.add(m.n * w, jumps)
    mean, se = acc.mean_se(p.samples)
    return Estimate(mean, se, p.samples, acc.jumps)
