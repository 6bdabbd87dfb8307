"""Dense reference computations for small matrices.

``dense_expm`` is a scaling-and-squaring Padé exponential (degree 3..13
chosen from the 1-norm, Higham 2005 thresholds). The rest builds the exact
Lie/Strang splitting products and separates splitting error from sampling
error for a Monte Carlo result.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .estimator import PathParams, VectorEstimate
from .graph import SplitMatrix

DEFAULT_CAP = 2000

_THETA = {3: 1.495585217958292e-2, 5: 2.539398330063230e-1, 7: 9.504178996162932e-1,
          9: 2.097847961257068e0, 13: 5.371920351148152e0}

_PADE = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0, 670442572800.0,
         33522128640.0, 1323241920.0, 40840800.0, 960960.0, 16380.0, 182.0, 1.0),
}


class OracleCapError(ValueError):
    pass


def oracle_cap() -> int:
    return int(os.environ.get("EXPMC_ORACLE_CAP", DEFAULT_CAP))


def _check_cap(n):
    cap = oracle_cap()
    if n > cap:
        raise OracleCapError(f"n={n} exceeds the dense oracle cap {cap} (set EXPMC_ORACLE_CAP)")


def _pade_uv(a, deg):
    b = _PADE[deg]
    n = a.shape[0]
    ident = np.eye(n)
    a2 = a @ a
    if deg == 13:
        a4 = a2 @ a2
        a6 = a4 @ a2
        u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
                 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
        v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
             + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
        return u, v
    pw = [ident, a2]
    for _ in range(2, deg // 2 + 1):
        pw.append(pw[-1] @ a2)
    u = a @ sum(b[2 * k + 1] * pw[k] for k in range(deg // 2 + 1))
    v = sum(b[2 * k] * pw[k] for k in range(deg // 2 + 1))
    return u, v


def dense_expm(a) -> np.ndarray:
    """``exp(a)`` for a dense square matrix."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    n = a.shape[0]
    _check_cap(n)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if n == 0:
        return np.empty((0, 0))
    diag = np.diag(a)
    if np.count_nonzero(a - np.diag(diag)) == 0:
        # squaring would compound rounding in tiny entries
        return np.diag(np.exp(diag))
    norm1 = np.abs(a).sum(axis=0).max()
    s = 0
    for deg in (3, 5, 7, 9):
        if norm1 <= _THETA[deg]:
            break
    else:
        deg = 13
        if norm1 > _THETA[13]:
            s = int(np.ceil(np.log2(norm1 / _THETA[13])))
    u, v = _pade_uv(a / 2.0**s, deg)
    r = scipy.linalg.solve(v - u, v + u)
    for _ in range(s):
        r = r @ r
    if not np.all(np.isfinite(r)):
        raise OverflowError("matrix exponential overflowed")
    return r


def dense_parts(m: SplitMatrix):
    """``(d, L)`` with ``L`` as a dense array."""
    _check_cap(m.n)
    return m.d.copy(), m.laplacian().toarray()


def exact_action(m: SplitMatrix, v, beta: float) -> np.ndarray:
    """``exp(beta A) v`` from the dense exponential."""
    _check_cap(m.n)
    a = m.adjacency().toarray()
    return dense_expm(beta * a) @ np.asarray(v, dtype=np.float64)


def splitting_product(m: SplitMatrix, v, p: PathParams) -> np.ndarray:
    """Exact Lie ``(e^{-dt L} e^{dt D})^N v`` or Strang ``(e^{dt D/2} e^{-dt L} e^{dt D/2})^N v``."""
    d, lap = dense_parts(m)
    dt = p.dt
    x = np.asarray(v, dtype=np.float64).copy()
    if x.shape != (m.n,):
        raise ValueError(f"v must have shape ({m.n},)")
    heat = dense_expm(-dt * lap)
    if p.splitting == "strang":
        half = np.exp(0.5 * dt * d)
        x = half * x
        for k in range(p.n_steps):
            x = heat @ x
            # merge the two adjacent half factors between steps
            x = (half if k == p.n_steps - 1 else half * half) * x
    else:
        full = np.exp(dt * d)
        for _ in range(p.n_steps):
            x = heat @ (full * x)
    return x


@dataclass
class CommutatorBounds:
    lie_local: float
    strang_local: float
    tc_bound: float


def commutator_lie(m: SplitMatrix, v) -> np.ndarray:
    """``[D, L] v``."""
    d, lap = dense_parts(m)
    v = np.asarray(v, dtype=np.float64)
    return d * (lap @ v) - lap @ (d * v)


def tc_error_bound(m: SplitMatrix, dt: float) -> float:
    """``||D||^2 ||L|| dt^2`` in the infinity norm; ``2 d_max^3 dt^2`` for adjacency matrices."""
    dnorm = float(np.abs(m.d).max()) if m.n else 0.0
    lnorm = 2.0 * m.dmax
    return dnorm**2 * lnorm * dt**2


def commutator_bounds(m: SplitMatrix, dt: float, v) -> CommutatorBounds:
    """Leading local error terms of one Lie and one Strang step applied to ``v`` (inf-norm)."""
    d, lap = dense_parts(m)
    v = np.asarray(v, dtype=np.float64)
    dm = np.diag(d)
    c_dl = dm @ lap - lap @ dm
    lie = 0.5 * dt**2 * (c_dl @ v)
    c_d_dl = dm @ c_dl - c_dl @ dm
    c_l_ld = lap @ (-c_dl) - (-c_dl) @ lap
    strang = dt**3 * ((c_d_dl / 12.0 - c_l_ld / 24.0) @ v)
    return CommutatorBounds(
        lie_local=float(np.abs(lie).max()) if m.n else 0.0,
        strang_local=float(np.abs(strang).max()) if m.n else 0.0,
        tc_bound=tc_error_bound(m, dt),
    )


@dataclass
class ErrorDecomposition:
    eps_split: float
    eps_stat: float
    eps_total: float
    bound: float
    norm: str


def _norm(x, norm):
    x = np.atleast_1d(x)
    if norm == "inf":
        return float(np.abs(x).max())
    if norm == "l1":
        return float(np.abs(x).sum())
    raise ValueError(f"unknown norm {norm!r}")


def decompose_error(m: SplitMatrix, v, p: PathParams, mc: VectorEstimate,
                    norm: str = "inf") -> ErrorDecomposition:
    """Split the error of ``mc`` into a splitting part and a sampling part.

    ``eps_total`` is defined as their sum, which bounds the norm of the
    actual error by the triangle inequality.
    """
    truth = exact_action(m, v, p.beta)
    split_sol = splitting_product(m, v, p)
    e1 = _norm(truth - split_sol, norm)
    e2 = _norm(split_sol - mc.values, norm)
    return ErrorDecomposition(e1, e2, e1 + e2, tc_error_bound(m, p.dt), norm)
