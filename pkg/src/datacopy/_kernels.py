"""Pairwise-distance kernels: numba-compiled hot loops with a numpy fallback.

The numba backend is used when importable unless the environment variable
DATACOPY_NUMBA is set to one of {0, false, off, no}; setting it to
{1, true, on, yes} makes a missing numba an import error instead of a
silent fallback. Both backends accumulate per-coordinate squared
differences directly (never the ||x||^2 - 2<x,y> + ||y||^2 expansion),
so exact duplicate points yield exactly 0.0 and the two paths agree up
to summation-order rounding. Parallel loops write disjoint output slots
only, so results are independent of thread scheduling.
"""

from __future__ import annotations

import os

import numpy as np

_CHUNK = 2_000_000  # scratch elements per fallback block


def _as_matrix(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("expected a 2-d array of points")
    return a


def _min_sq_dists_numpy(queries: np.ndarray, train: np.ndarray) -> np.ndarray:
    out = np.empty(queries.shape[0])
    rows = max(1, _CHUNK // (train.shape[0] * train.shape[1]))
    for s in range(0, queries.shape[0], rows):
        block = queries[s : s + rows]
        diff = block[:, None, :] - train[None, :, :]
        out[s : s + block.shape[0]] = np.einsum("ijk,ijk->ij", diff, diff).min(axis=1)
    return out


def _sq_dists_numpy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.empty((a.shape[0], b.shape[0]))
    rows = max(1, _CHUNK // (b.shape[0] * b.shape[1]))
    for s in range(0, a.shape[0], rows):
        block = a[s : s + rows]
        diff = block[:, None, :] - b[None, :, :]
        out[s : s + block.shape[0]] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


_env = os.environ.get("DATACOPY_NUMBA", "auto").strip().lower()
if _env in ("0", "false", "off", "no"):
    _numba = None
else:
    try:
        import numba as _numba
    except ImportError:
        if _env in ("1", "true", "on", "yes"):
            raise
        _numba = None

if _numba is not None:
    from numba import njit, prange

    @njit(parallel=True, cache=True)
    def _min_sq_dists_numba(queries, train):  # pragma: no cover - compiled
        nq, d = queries.shape
        nt = train.shape[0]
        out = np.empty(nq)
        for i in prange(nq):
            best = np.inf
            for j in range(nt):
                acc = 0.0
                for c in range(d):
                    diff = queries[i, c] - train[j, c]
                    acc += diff * diff
                if acc < best:
                    best = acc
            out[i] = best
        return out

    @njit(parallel=True, cache=True)
    def _sq_dists_numba(a, b):  # pragma: no cover - compiled
        na, d = a.shape
        nb = b.shape[0]
        out = np.empty((na, nb))
        for i in prange(na):
            for j in range(nb):
                acc = 0.0
                for c in range(d):
                    diff = a[i, c] - b[j, c]
                    acc += diff * diff
                out[i, j] = acc
        return out

    BACKEND = "numba"
    _min_impl = _min_sq_dists_numba
    _sq_impl = _sq_dists_numba
else:
    BACKEND = "numpy"
    _min_impl = _min_sq_dists_numpy
    _sq_impl = _sq_dists_numpy


def min_sq_dists(queries: np.ndarray, train: np.ndarray) -> np.ndarray:
    """Minimum squared euclidean distance from each query row to any train row."""
    queries = _as_matrix(queries)
    train = _as_matrix(train)
    if queries.shape[1] != train.shape[1]:
        raise ValueError(
            f"dimension mismatch: queries are {queries.shape[1]}-d, train is {train.shape[1]}-d"
        )
    if train.shape[0] == 0:
        raise ValueError("train set is empty")
    return _min_impl(queries, train)


def sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full matrix of squared euclidean distances between rows of a and b."""
    a = _as_matrix(a)
    b = _as_matrix(b)
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]}-d vs {b.shape[1]}-d")
    return _sq_impl(a, b)
