"""Continuous-time Markov chain paths over a :class:`SplitMatrix`.

The chain is generated by ``Q = -L``: state ``i`` is held for an
exponential time with rate ``L_ii`` and then jumps to neighbour ``j`` with
probability ``|L_ij| / L_ii``.

Random numbers come from counter-based streams: output ``k`` of stream
``(seed, id)`` is a SplitMix64 finaliser applied to ``key(seed, id) + k*gamma``.
Sample ``l`` of every estimator uses stream id ``l``, so results do not
depend on how samples are spread over threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
from numba import njit, prange

from .graph import SplitMatrix

# the bundled TBB is too old for numba and only produces a warning
if numba.config.THREADING_LAYER == "default":
    numba.config.THREADING_LAYER = "omp"

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SEED_SALT = np.uint64(0x3C6EF372FE94F82B)
_TWO_M53 = 1.0 / 9007199254740992.0

# weight schemes for the multiplicative functional
STRANG = 0
LIE_AFTER = 1  # e^{dt d_j} after each advance (entry form of (e^{-dt L} e^{dt D})^N)
LIE_BEFORE = 2  # e^{dt d_j} before each advance (forward/vector form of the same product)


@njit(inline="always")
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@njit(inline="always")
def _stream_key(seed, stream):
    return _mix(_mix(seed ^ _SEED_SALT) ^ _mix(stream + _GAMMA))


@njit(inline="always")
def _uniform(st):
    """Uniform variate on (0, 1]; advances the stream counter in ``st[1]``."""
    st[1] += np.uint64(1)
    x = _mix(st[0] + st[1] * _GAMMA)
    return (float(x >> np.uint64(11)) + 1.0) * _TWO_M53


@njit(inline="always")
def _exp_time(st, rate):
    if rate == 0.0:
        return np.inf
    return -np.log(_uniform(st)) / rate


@njit(inline="always")
def _jump(st, indptr, indices, cumw, uniform_rows, i):
    lo = indptr[i]
    deg = indptr[i + 1] - lo
    r = 1.0 - _uniform(st)  # [0, 1)
    if uniform_rows:
        q = int(r * deg)
        if q >= deg:
            q = deg - 1
        return indices[lo + q]
    target = r * cumw[lo + deg - 1]
    # first k with cumw[k] > target
    a, b = lo, lo + deg - 1
    while a < b:
        mid = (a + b) >> 1
        if cumw[mid] > target:
            b = mid
        else:
            a = mid + 1
    return indices[a]


@njit(inline="always")
def _advance(st, indptr, indices, cumw, uniform_rows, rate, stay, j, dt):
    """Run the chain for ``dt`` from ``j`` with a fresh clock; returns (state, jumps).

    ``stay[j] = exp(-rate[j] * dt)``: the first holding time ``-ln(u)/rate``
    exceeds ``dt`` exactly when ``u <= stay[j]``, which saves a logarithm on
    segments without a jump.
    """
    u = _uniform(st)
    if u <= stay[j]:
        return j, 0
    tau = -np.log(u) / rate[j]
    jumps = 0
    while True:
        j = _jump(st, indptr, indices, cumw, uniform_rows, j)
        jumps += 1
        tau += -np.log(_uniform(st)) / rate[j]
        if tau >= dt:
            return j, jumps


@njit(parallel=True, cache=True)
def _run_paths(
    indptr, indices, cumw, uniform_rows, rate, d, stay, dt, n_steps, scheme,
    start, start_cdf, uniform_start, seed, first, count, end_out, logw_out, jumps_out,
):
    """Sample paths ``first .. first+count-1``.

    ``start >= 0`` fixes the initial state; otherwise it is drawn from the
    cumulative weights ``start_cdf``, in O(1) when ``uniform_start`` says
    all weights are equal. Writes the final state, the log of the
    multiplicative functional (``dt`` times the summed diagonal weights) and
    the jump count of every path.
    """
    chunk = 4096
    n_chunks = (count + chunk - 1) // chunk
    total = start_cdf[start_cdf.size - 1] if start_cdf.size > 0 else 0.0
    for c in prange(n_chunks):
        st = np.empty(2, dtype=np.uint64)
        hi = min(count, (c + 1) * chunk)
        for k in range(c * chunk, hi):
            st[0] = _stream_key(seed, first + np.uint64(k))
            st[1] = np.uint64(0)
            if start >= 0:
                j = start
            elif uniform_start:
                nn = start_cdf.size
                j = min(int((1.0 - _uniform(st)) * nn), nn - 1)
            else:
                target = (1.0 - _uniform(st)) * total
                a, b = 0, start_cdf.size - 1
                while a < b:
                    mid = (a + b) >> 1
                    if start_cdf[mid] > target:
                        b = mid
                    else:
                        a = mid + 1
                j = a
            lw = 0.0
            nj = 0
            if scheme == STRANG:
                lw = 0.5 * d[j]
                for _ in range(n_steps):
                    j, q = _advance(st, indptr, indices, cumw, uniform_rows, rate, stay, j, dt)
                    nj += q
                    lw += d[j]
                lw -= 0.5 * d[j]
            elif scheme == LIE_AFTER:
                for _ in range(n_steps):
                    j, q = _advance(st, indptr, indices, cumw, uniform_rows, rate, stay, j, dt)
                    nj += q
                    lw += d[j]
            else:
                for _ in range(n_steps):
                    lw += d[j]
                    j, q = _advance(st, indptr, indices, cumw, uniform_rows, rate, stay, j, dt)
                    nj += q
            end_out[k] = j
            logw_out[k] = dt * lw
            jumps_out[k] = nj


# -- single-call wrappers (used directly and in tests) ----------------------


@njit
def _nb_exp_time(st, rate):
    return _exp_time(st, rate)


@njit
def _nb_jump(st, indptr, indices, cumw, uniform_rows, i):
    return _jump(st, indptr, indices, cumw, uniform_rows, i)


@njit
def _nb_advance(st, indptr, indices, cumw, uniform_rows, rate, stay, j, dt):
    return _advance(st, indptr, indices, cumw, uniform_rows, rate, stay, j, dt)


@njit
def _nb_uniforms(st, k):
    out = np.empty(k)
    for i in range(k):
        out[i] = _uniform(st)
    return out


class RngStream:
    """Reproducible random stream identified by ``(seed, stream_id)``."""

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.stream_id = int(stream_id) & 0xFFFFFFFFFFFFFFFF
        key = _key(np.uint64(self.seed), np.uint64(self.stream_id))
        self.state = np.array([key, 0], dtype=np.uint64)

    @property
    def counter(self) -> int:
        return int(self.state[1])

    def uniforms(self, k: int) -> np.ndarray:
        return _nb_uniforms(self.state, int(k))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}, counter={self.counter})"


@njit
def _key(seed, stream):
    return _stream_key(seed, stream)


@dataclass(frozen=True)
class PathSegmentResult:
    end_state: int
    jumps: int


def exp_time(rng: RngStream, rate: float) -> float:
    """Exponential waiting time with the given rate (``inf`` for rate 0)."""
    if not rate >= 0.0:
        raise ValueError(f"rate must be >= 0, got {rate}")
    return float(_nb_exp_time(rng.state, float(rate)))


def jump(rng: RngStream, m: SplitMatrix, i: int) -> int:
    """Draw the next state from ``i`` with probability ``|L_ij| / L_ii``."""
    if not 0 <= i < m.n:
        raise IndexError(f"state {i} out of range [0, {m.n})")
    if m.indptr[i + 1] == m.indptr[i]:
        raise ValueError(f"state {i} is isolated and cannot jump")
    return int(_nb_jump(rng.state, m.indptr, m.indices, m.cumw, m.uniform_rows, i))


def advance(rng: RngStream, m: SplitMatrix, start: int, dt: float) -> PathSegmentResult:
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if not 0 <= start < m.n:
        raise IndexError(f"state {start} out of range [0, {m.n})")
    stay = np.exp(-m.rate * dt)
    j, q = _nb_advance(
        rng.state, m.indptr, m.indices, m.cumw, m.uniform_rows, m.rate, stay, start, float(dt)
    )
    return PathSegmentResult(int(j), int(q))


def run_paths(m: SplitMatrix, dt: float, n_steps: int, scheme: int, seed: int, first: int,
              count: int, start: int = -1, start_weights=None):
    """Sample ``count`` paths with stream ids ``first, first+1, ...``.

    Returns ``(end_state, log_weight, jumps)`` arrays of length ``count``.
    Either ``start`` (fixed initial state) or ``start_weights`` (nonnegative
    initial weights, normalised internally) must be given.
    """
    if start < 0:
        if start_weights is None:
            raise ValueError("need a start state or start weights")
        w = np.asarray(start_weights, dtype=np.float64)
        cdf = np.cumsum(w)
        uniform = bool(w.size) and bool(np.all(w == w[0]))
    else:
        cdf = np.empty(0)
        uniform = False
    end = np.empty(count, dtype=np.int64)
    logw = np.empty(count, dtype=np.float64)
    jumps = np.empty(count, dtype=np.int64)
    stay = np.exp(-m.rate * dt)
    _run_paths(
        m.indptr, m.indices, m.cumw, m.uniform_rows, m.rate, m.d, stay, float(dt),
        int(n_steps), int(scheme), int(start), cdf, uniform, np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF),
        np.uint64(first), int(count), end, logw, jumps,
    )
    return end, logw, jumps


def set_workers(workers: int | None) -> int:
    """Set the numba thread count (``None`` keeps the current setting)."""
    if workers is not None:
        if workers < 1:
            raise ValueError("workers must be >= 1")
        numba.set_num_threads(min(int(workers), numba.config.NUMBA_NUM_THREADS))
    return numba.get_num_threads()
