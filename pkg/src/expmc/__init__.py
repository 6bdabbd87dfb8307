"""Monte Carlo action of the matrix exponential ``exp(beta A) v`` for ``A = D - L``."""

from .estimator import (
    Estimate,
    PathParams,
    VectorEstimate,
    entry_estimate,
    tc_estimate,
    vector_estimate,
)
from .generators import GenSpec, generate
from .graph import GraphStats, SparseSymmetric, SplitMatrix, split, stats
from .metrics import BetaRule, RankedVector, isim, normalized_tc, rank, resolve_beta
from .mmio import MatrixMarketError, load_matrix_market, write_matrix_market
from .oracle import (
    commutator_bounds,
    decompose_error,
    dense_expm,
    exact_action,
    splitting_product,
)
from .sampler import PathSegmentResult, RngStream, advance, exp_time, jump

__version__ = "0.1.0"
