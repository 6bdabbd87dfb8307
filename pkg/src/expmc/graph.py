"""Sparse symmetric matrices and the Laplacian splitting ``A = D - L``."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class SparseSymmetric:
    """Symmetric ``n x n`` matrix stored as its upper triangle (``row <= col``).

    Use :meth:`from_entries` to build one; it canonicalises the triangle,
    drops explicit zeros and enforces the invariants (no duplicates, finite
    weights, strictly positive off-diagonal weights).
    """

    n: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_entries(cls, n, rows, cols, weights=None) -> "SparseSymmetric":
        n = int(n)
        if n < 0:
            raise ValueError(f"negative dimension {n}")
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        if weights is None:
            weights = np.ones(rows.size)
        weights = np.asarray(weights, dtype=np.float64).ravel()
        if not (rows.size == cols.size == weights.size):
            raise ValueError("rows, cols and weights must have equal length")
        if rows.size and (min(rows.min(), cols.min()) < 0 or max(rows.max(), cols.max()) >= n):
            raise ValueError(f"index out of range for n={n}")
        if not np.all(np.isfinite(weights)):
            raise ValueError("non-finite weight")

        lo = np.minimum(rows, cols)
        hi = np.maximum(rows, cols)
        keep = weights != 0.0
        lo, hi, weights = lo[keep], hi[keep], weights[keep]

        offdiag = lo != hi
        if np.any(weights[offdiag] < 0):
            i = np.flatnonzero(offdiag & (weights < 0))[0]
            raise ValueError(
                f"negative off-diagonal weight {weights[i]} at ({lo[i]}, {hi[i]}); "
                "-L would not generate a Markov chain"
            )

        order = np.lexsort((hi, lo))
        lo, hi, weights = lo[order], hi[order], weights[order]
        if lo.size > 1:
            dup = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
            if np.any(dup):
                i = np.flatnonzero(dup)[0]
                raise ValueError(f"duplicate entry ({lo[i]}, {hi[i]})")
        return cls(n, lo, hi, weights)

    @classmethod
    def from_dense(cls, a) -> "SparseSymmetric":
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("expected a square matrix")
        if not np.array_equal(a, a.T):
            raise ValueError("matrix is not symmetric")
        r, c = np.nonzero(np.triu(a))
        return cls.from_entries(a.shape[0], r, c, a[r, c])

    @property
    def nnz_upper(self) -> int:
        return int(self.rows.size)

    @property
    def n_edges(self) -> int:
        """Number of off-diagonal (undirected) edges."""
        return int(np.count_nonzero(self.rows != self.cols))

    @property
    def is_pattern(self) -> bool:
        """True for a plain 0/1 adjacency matrix (all stored weights equal to 1)."""
        return bool(np.all(self.weights == 1.0))

    def to_scipy(self) -> sp.csr_matrix:
        """Full (both triangles) CSR matrix."""
        off = self.rows != self.cols
        r = np.concatenate([self.rows, self.cols[off]])
        c = np.concatenate([self.cols, self.rows[off]])
        w = np.concatenate([self.weights, self.weights[off]])
        return sp.csr_matrix((w, (r, c)), shape=(self.n, self.n))

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    def __eq__(self, other):
        if not isinstance(other, SparseSymmetric):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.rows, other.rows)
            and np.array_equal(self.cols, other.cols)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SplitMatrix:
    """``A = D - L`` with ``L`` a graph Laplacian, laid out for path sampling.

    ``d`` holds the diagonal of ``D``; ``rate[i] = L_ii`` is the exit rate of
    state ``i`` of the Markov chain generated by ``-L``. Row ``i`` of the
    off-diagonal part lives in ``indices[indptr[i]:indptr[i+1]]`` with
    magnitudes ``weights`` and running sums ``cumw``. ``uniform_rows`` is set
    when every row has equal weights, which lets the sampler pick a neighbour
    in O(1).
    """

    n: int
    d: np.ndarray
    rate: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    cumw: np.ndarray
    uniform_rows: bool
    n_edges: int = 0

    @property
    def dbar(self) -> float:
        return float(self.rate.mean()) if self.n else 0.0

    @property
    def dmax(self) -> float:
        return float(self.rate.max()) if self.n else 0.0

    @property
    def degree(self) -> np.ndarray:
        """Neighbour count per node."""
        return np.diff(self.indptr)

    def neighbors(self, i: int):
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def laplacian(self) -> sp.csr_matrix:
        off = sp.csr_matrix((-self.weights, self.indices, self.indptr), shape=(self.n, self.n))
        return (off + sp.diags(self.rate)).tocsr()

    def adjacency(self) -> sp.csr_matrix:
        """Reassemble ``A = D - L`` as a sparse matrix."""
        off = sp.csr_matrix((self.weights, self.indices, self.indptr), shape=(self.n, self.n))
        return (off + sp.diags(self.d - self.rate)).tocsr()

    def reassemble(self) -> SparseSymmetric:
        a = sp.triu(self.adjacency()).tocoo()
        return SparseSymmetric.from_entries(self.n, a.row, a.col, a.data)


def split(a: SparseSymmetric) -> SplitMatrix:
    """Split ``a`` into ``D - L``.

    ``L_ij = -a_ij`` off the diagonal and ``L_ii = sum_{j != i} a_ij``, so
    ``D_ii = a_ii + L_ii``. For a 0/1 adjacency matrix both ``d`` and
    ``rate`` equal the vertex degree.
    """
    n = a.n
    if not np.all(np.isfinite(a.weights)):
        raise ValueError("non-finite weight")
    off = a.rows != a.cols
    if np.any(a.weights[off] < 0):
        raise ValueError("negative off-diagonal weight")

    diag = np.zeros(n)
    diag[a.rows[~off]] = a.weights[~off]

    r, c, w = a.rows[off], a.cols[off], a.weights[off]
    full = sp.csr_matrix(
        (np.concatenate([w, w]), (np.concatenate([r, c]), np.concatenate([c, r]))),
        shape=(n, n),
    )
    full.sort_indices()
    indptr = full.indptr.astype(np.int64)
    indices = full.indices.astype(np.int64)
    weights = full.data.astype(np.float64)

    row_of = np.repeat(np.arange(n), np.diff(indptr))
    rate = np.bincount(row_of, weights=weights, minlength=n).astype(np.float64)
    # row-local running sums without a Python loop over rows
    total = np.cumsum(weights)
    before = np.concatenate([[0.0], total])[indptr[:-1]]
    cumw = total - before[row_of]
    uniform = bool(np.all(weights == weights[indptr[row_of]])) if weights.size else True
    return SplitMatrix(
        n=n,
        d=diag + rate,
        rate=rate,
        indptr=indptr,
        indices=indices,
        weights=weights,
        cumw=cumw,
        uniform_rows=uniform,
        n_edges=int(r.size),
    )


@dataclass
class GraphStats:
    n: int
    n_edges: int
    dbar: float
    dmax: float
    lambda_max: Optional[float] = None
    lambda_rel_change: Optional[float] = None
    power_iters: int = field(default=0)


def power_iteration(a: sp.spmatrix, iters: int):
    """Spectral radius of a nonnegative symmetric matrix by power iteration.

    Uses the norm ratio ``||A x|| / ||x||``, which is monotone for symmetric
    ``A`` and does not stall on bipartite graphs the way the Rayleigh quotient
    does. Returns ``(estimate, last relative change)``.
    """
    n = a.shape[0]
    x = np.ones(n) / np.sqrt(n)
    lam, prev = 0.0, np.nan
    for _ in range(iters):
        y = a @ x
        nrm = np.linalg.norm(y)
        prev, lam = lam, nrm
        if nrm == 0.0:
            break
        x = y / nrm
    rel = abs(lam - prev) / lam if lam > 0 else 0.0
    return lam, rel


def stats(m: SplitMatrix, power_iters: int = 100) -> GraphStats:
    if power_iters < 0:
        raise ValueError("power_iters must be >= 0")
    out = GraphStats(n=m.n, n_edges=m.n_edges, dbar=m.dbar, dmax=m.dmax, power_iters=power_iters)
    if power_iters > 0 and m.n > 0:
        out.lambda_max, out.lambda_rel_change = power_iteration(m.adjacency(), power_iters)
    return out
