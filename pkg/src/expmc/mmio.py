"""MatrixMarket coordinate I/O for symmetric matrices.

Only the ``coordinate`` layout with ``real``/``integer``/``pattern`` fields
and ``symmetric``/``general`` symmetry is handled. Indices are 1-based on
disk and 0-based in memory.
"""

from __future__ import annotations

import os
from typing import IO, Union

import numpy as np

from .graph import SparseSymmetric

PathLike = Union[str, "os.PathLike[str]"]


class MatrixMarketError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


def _parse_header(line: str):
    parts = line.strip().split()
    if len(parts) != 5 or parts[0].lower() != "%%matrixmarket":
        raise MatrixMarketError("missing %%MatrixMarket header", 1)
    obj, fmt, field, symm = (p.lower() for p in parts[1:])
    if obj != "matrix" or fmt != "coordinate":
        raise MatrixMarketError(f"unsupported layout '{obj} {fmt}'", 1)
    if field not in ("real", "integer", "pattern"):
        raise MatrixMarketError(f"unsupported field '{field}'", 1)
    if symm not in ("symmetric", "general"):
        raise MatrixMarketError(f"unsupported symmetry '{symm}'", 1)
    return field, symm


def load_matrix_market(path: PathLike) -> SparseSymmetric:
    with open(path, "r") as fh:
        return read_matrix_market(fh)


def read_matrix_market(fh: IO[str]) -> SparseSymmetric:
    field, symm = _parse_header(fh.readline())
    pattern = field == "pattern"

    lineno = 1
    size = None
    for line in fh:
        lineno += 1
        s = line.strip()
        if s and not s.startswith("%"):
            size = s.split()
            break
    if size is None:
        raise MatrixMarketError("missing size line", lineno)
    try:
        nr, nc, nnz = (int(x) for x in size)
    except ValueError:
        raise MatrixMarketError(f"bad size line {line.strip()!r}", lineno) from None
    if nr <= 0 or nc <= 0:
        raise MatrixMarketError(f"zero dimension {nr}x{nc}", lineno)
    if nr != nc:
        raise MatrixMarketError(f"matrix is not square ({nr}x{nc})", lineno)

    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.ones(nnz, dtype=np.float64)
    lines = np.empty(nnz, dtype=np.int64)
    k = 0
    for line in fh:
        lineno += 1
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        if k >= nnz:
            raise MatrixMarketError(f"more than {nnz} entries", lineno)
        tok = s.split()
        try:
            i, j = int(tok[0]), int(tok[1])
            if not pattern:
                vals[k] = float(tok[2])
        except (ValueError, IndexError):
            raise MatrixMarketError(f"cannot parse entry {s!r}", lineno) from None
        if not (1 <= i <= nr and 1 <= j <= nc):
            raise MatrixMarketError(f"index ({i}, {j}) out of range", lineno)
        if not np.isfinite(vals[k]):
            raise MatrixMarketError(f"non-finite value {tok[2]!r}", lineno)
        rows[k], cols[k], lines[k] = i - 1, j - 1, lineno
        k += 1
    if k != nnz:
        raise MatrixMarketError(f"expected {nnz} entries, found {k}", lineno)

    if symm == "symmetric":
        if np.any(rows < cols):
            bad = np.flatnonzero(rows < cols)[0]
            raise MatrixMarketError("symmetric file has an entry above the diagonal", int(lines[bad]))
    else:
        rows, cols, vals, lines = _fold_general(rows, cols, vals, lines)

    lo, hi = np.minimum(rows, cols), np.maximum(rows, cols)
    order = np.lexsort((hi, lo))
    dup = (lo[order][1:] == lo[order][:-1]) & (hi[order][1:] == hi[order][:-1])
    if np.any(dup):
        bad = order[np.flatnonzero(dup)[0] + 1]
        raise MatrixMarketError(f"duplicate entry ({rows[bad] + 1}, {cols[bad] + 1})", int(lines[bad]))
    try:
        return SparseSymmetric.from_entries(nr, rows, cols, vals)
    except ValueError as exc:
        raise MatrixMarketError(str(exc)) from None


def _fold_general(rows, cols, vals, lines):
    """Check a ``general`` matrix is numerically symmetric; keep its lower triangle."""
    key = rows * (rows.max(initial=0) + cols.max(initial=0) + 2) + cols
    order = np.lexsort((cols, rows))
    k_sorted = key[order]
    if np.any(k_sorted[1:] == k_sorted[:-1]):
        bad = order[np.flatnonzero(k_sorted[1:] == k_sorted[:-1])[0] + 1]
        raise MatrixMarketError(f"duplicate entry ({rows[bad] + 1}, {cols[bad] + 1})", int(lines[bad]))

    upper = rows < cols
    lower = rows > cols
    lookup = dict(zip(zip(rows[lower].tolist(), cols[lower].tolist()), vals[lower].tolist()))
    if upper.sum() != lower.sum():
        raise MatrixMarketError("general matrix is not symmetric (unpaired entries)")
    for r, c, v, ln in zip(rows[upper], cols[upper], vals[upper], lines[upper]):
        mirror = lookup.get((int(c), int(r)))
        if mirror is None or not np.isclose(mirror, v, rtol=1e-12, atol=0.0):
            raise MatrixMarketError(f"general matrix is not symmetric at ({r + 1}, {c + 1})", int(ln))
    keep = ~upper
    return rows[keep], cols[keep], vals[keep], lines[keep]


def write_matrix_market(a: SparseSymmetric, path: PathLike, comment: str | None = None) -> None:
    """Write ``a`` as a symmetric coordinate file (lower triangle on disk).

    0/1 matrices are written with the ``pattern`` field. Entries are streamed
    in blocks, so no dense structure is ever built.
    """
    pattern = a.is_pattern
    field = "pattern" if pattern else "real"
    # on disk the lower triangle (row >= col) is stored: swap our upper one
    r = a.cols + 1
    c = a.rows + 1
    order = np.lexsort((r, c))
    with open(path, "w") as fh:
        fh.write(f"%%MatrixMarket matrix coordinate {field} symmetric\n")
        if comment:
            for ln in comment.splitlines():
                fh.write(f"%{ln}\n")
        fh.write(f"{a.n} {a.n} {a.nnz_upper}\n")
        block = 1 << 16
        for s in range(0, order.size, block):
            idx = order[s : s + block]
            if pattern:
                chunk = "".join(f"{i} {j}\n" for i, j in zip(r[idx].tolist(), c[idx].tolist()))
            else:
                chunk = "".join(
                    f"{i} {j} {w!r}\n"
                    for i, j, w in zip(r[idx].tolist(), c[idx].tolist(), a.weights[idx].tolist())
                )
            fh.write(chunk)
