"""Communicability metrics, inverse-temperature rules and ranking similarity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .graph import GraphStats


@dataclass(frozen=True)
class RankedVector:
    scores: np.ndarray
    order: np.ndarray  # node indices, best first

    def top(self, k: int) -> np.ndarray:
        return self.order[:k]


def rank(values) -> RankedVector:
    """Sort descending; equal scores keep ascending node index."""
    values = np.asarray(values, dtype=np.float64)
    if np.any(np.isnan(values)):
        raise ValueError("cannot rank NaN scores")
    order = np.lexsort((np.arange(values.size), -values))
    return RankedVector(values, order)


def normalized_tc(tc: float, n: int) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    return tc / n


@dataclass(frozen=True)
class BetaRule:
    rule: Literal["fixed", "lmax", "dmax"]
    beta: Optional[float] = None

    def __post_init__(self):
        if self.rule not in ("fixed", "lmax", "dmax"):
            raise ValueError(f"unknown beta rule {self.rule!r}")
        if self.rule == "fixed" and not (self.beta is not None and self.beta > 0):
            raise ValueError("fixed beta must be > 0")


def resolve_beta(rule: BetaRule, st: GraphStats) -> float:
    """``beta`` for a rule: the fixed value, ``1/lambda_max`` or ``1/d_max``.

    Since ``lambda_max <= d_max``, the ``dmax`` rule never gives a larger
    ``beta`` than the ``lmax`` rule.
    """
    if rule.rule == "fixed":
        return float(rule.beta)
    if rule.rule == "lmax":
        if st.lambda_max is None:
            raise ValueError("lambda_max not computed (stats with power_iters > 0)")
        if st.lambda_max <= 0:
            raise ValueError("lambda_max must be positive")
        return 1.0 / st.lambda_max
    if st.dmax <= 0:
        raise ValueError("graph has no edges; 1/d_max undefined")
    return 1.0 / st.dmax


def isim(x: RankedVector, y: RankedVector, top_fraction: float = 1.0) -> float:
    """Intersection distance of the top ``K = ceil(top_fraction * n)`` nodes.

    ``(1/K) * sum_{i<=K} |X_i symdiff Y_i| / (2i)`` where ``X_i``, ``Y_i`` are
    the top-``i`` node sets. 0 for identical prefixes, 1 for disjoint ones.
    """
    n = x.order.size
    if y.order.size != n:
        raise ValueError(f"length mismatch: {n} vs {y.order.size}")
    if not 0.0 < top_fraction <= 1.0:
        raise ValueError("top_fraction must be in (0, 1]")
    if n == 0:
        return 0.0
    K = max(1, math.ceil(top_fraction * n - 1e-9))
    # |X_i ∩ Y_i| grows by one each time a node has been seen in both prefixes
    pos_y = np.empty(n, dtype=np.int64)
    pos_y[y.order] = np.arange(n)
    depth = np.arange(K)
    # node x.order[t] joins the intersection at depth max(t, pos_y[node])
    joined = np.maximum(depth, pos_y[x.order[:K]])
    joined = joined[joined < K]
    common = np.cumsum(np.bincount(joined, minlength=K))
    size = depth + 1
    sym = 2 * (size - common)
    return float(np.sum(sym / (2.0 * size)) / K)
