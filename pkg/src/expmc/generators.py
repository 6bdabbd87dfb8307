"""Synthetic networks: small-world, preferential-attachment and Erdős–Rényi graphs.

All generators return unweighted adjacency matrices and are deterministic
for a given seed (numpy ``default_rng``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .graph import SparseSymmetric

Kind = Literal["smallworld", "scalefree", "erdosrenyi"]


@dataclass(frozen=True)
class GenSpec:
    """Generator parameters.

    smallworld: ring radius ``k`` plus random shortcuts, ``ps`` being the
    expected number of shortcut endpoints per node (average degree
    ``2k + ps``). scalefree: ``m0`` edges per new node (average degree about
    ``2 m0``). erdosrenyi: edge probability ``p``.
    """

    kind: Kind
    n: int
    k: int = 1
    ps: float = 0.4
    m0: int = 2
    p: float = 0.01
    seed: int = 0

    def validate(self):
        if self.kind not in ("smallworld", "scalefree", "erdosrenyi"):
            raise ValueError(f"unknown generator {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.kind == "smallworld":
            if self.k < 1 or 2 * self.k >= self.n:
                raise ValueError(f"ring radius k={self.k} needs 1 <= k < n/2")
            if not 0.0 <= self.ps <= 1.0:
                raise ValueError(f"ps={self.ps} outside [0, 1]")
        elif self.kind == "scalefree":
            if self.m0 < 1 or self.m0 >= self.n:
                raise ValueError(f"m0={self.m0} needs 1 <= m0 < n")
        elif not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p={self.p} outside [0, 1]")


def generate(spec: GenSpec) -> SparseSymmetric:
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "smallworld":
        r, c = _small_world(spec.n, spec.k, spec.ps, rng)
    elif spec.kind == "scalefree":
        r, c = _preferential(spec.n, spec.m0, rng)
    else:
        r, c = _erdos_renyi(spec.n, spec.p, rng)
    return SparseSymmetric.from_entries(spec.n, r, c)


def _small_world(n, k, ps, rng):
    base = np.arange(n)
    ring_r = np.concatenate([base for _ in range(k)])
    ring_c = np.concatenate([(base + s) % n for s in range(1, k + 1)])

    # each node starts a shortcut with probability ps/2, so every node ends up
    # with ps shortcut endpoints on average
    starts = np.flatnonzero(rng.random(n) < ps / 2.0)
    seen = set()
    sr, sc = [], []
    for i in starts.tolist():
        if len(seen) + 2 * k + 1 >= n:  # nowhere left to go
            break
        while True:
            j = int(rng.integers(n))
            gap = (j - i) % n
            if min(gap, n - gap) <= k:
                continue  # self loop or ring edge
            key = (min(i, j), max(i, j))
            if key in seen:
                continue
            seen.add(key)
            sr.append(i)
            sc.append(j)
            break
    return np.concatenate([ring_r, sr]).astype(np.int64), np.concatenate([ring_c, sc]).astype(np.int64)


def _preferential(n, m0, rng):
    """Barabási–Albert growth from a complete seed graph on ``m0 + 1`` nodes."""
    seed_n = min(m0 + 1, n)
    rows, cols = np.triu_indices(seed_n, 1)
    rows, cols = rows.tolist(), cols.tolist()
    # every edge endpoint appears once, so a uniform pick is degree-proportional
    ends = np.empty(2 * (len(rows) + m0 * (n - seed_n)), dtype=np.int64)
    ne = 0
    for a, b in zip(rows, cols):
        ends[ne], ends[ne + 1] = a, b
        ne += 2
    buf = rng.random(4096)
    pos = 0
    for t in range(seed_n, n):
        chosen = set()
        while len(chosen) < m0:
            if pos == buf.size:
                buf = rng.random(4096)
                pos = 0
            chosen.add(int(ends[int(buf[pos] * ne)]))
            pos += 1
        for j in sorted(chosen):
            rows.append(j)
            cols.append(t)
            ends[ne], ends[ne + 1] = j, t
            ne += 2
    return np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64)


def _erdos_renyi(n, p, rng):
    pairs = n * (n - 1) // 2
    m = int(rng.binomial(pairs, p)) if pairs else 0
    if m == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    idx = np.sort(rng.choice(pairs, size=m, replace=False))
    # linear index -> (i, j), i < j, in row-major order of the strict upper triangle
    i = (n - 2 - np.floor(np.sqrt(-8.0 * idx + 4.0 * n * (n - 1) - 7) / 2.0 - 0.5)).astype(np.int64)
    j = idx + i + 1 - n * (n - 1) // 2 + (n - i) * ((n - i) - 1) // 2
    return i, j.astype(np.int64)
