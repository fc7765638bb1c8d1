"""Optional numba-accelerated kernels with pure-numpy fallbacks.

The only hot loops in the package that are not already BLAS calls are the
permutation-table builders: composing every pair of group elements and
extracting cycle structure. Those kernels live here. Set ``GAPCERT_NO_NUMBA=1``
to force the numpy fallback path (the benchmark in ``benchmarks/`` compares
the two).
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = bool(os.environ.get("GAPCERT_NO_NUMBA"))

try:
    from numba import njit as _njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _HAVE_NUMBA = False

    def _njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


USE_NUMBA = _HAVE_NUMBA and not _DISABLED


def _cycle_key_scalar_impl(perm, visited):
    # Key packs the cycle type into an int64: 4 bits per cycle length.
    # Safe for t <= 15 (counts per length < 16, shifts < 64).
    t = perm.shape[0]
    for x in range(t):
        visited[x] = False
    ncyc = 0
    key = np.int64(0)
    for start in range(t):
        if visited[start]:
            continue
        ln = 0
        cur = start
        while not visited[cur]:
            visited[cur] = True
            cur = perm[cur]
            ln += 1
        ncyc += 1
        key += np.int64(1) << (4 * ln)
    return key, ncyc


def _pair_tables_py(words, invwords):
    """Lengths and cycle-type keys of all pairwise products inv(a) * b.

    Vectorized fallback: for each row i the batch of products inv_i o sigma_j
    is formed by one gather, then cycle structure is traced for the whole
    batch at once.
    """
    n, t = words.shape
    dist = np.empty((n, n), dtype=np.int8)
    keys = np.empty((n, n), dtype=np.int64)
    rows = np.arange(n)
    for i in range(n):
        prods = invwords[i][words]  # (n, t): word of inv(sigma_i) o sigma_j
        visited = np.zeros((n, t), dtype=bool)
        k = np.zeros(n, dtype=np.int64)
        ncyc = np.zeros(n, dtype=np.int64)
        for start in range(t):
            fresh = ~visited[:, start]
            if not fresh.any():
                continue
            ncyc += fresh
            visited[:, start] = True
            cur = prods[:, start].astype(np.intp)
            ln = np.ones(n, dtype=np.int64)
            active = fresh & (cur != start)
            while active.any():
                visited[rows[active], cur[active]] = True
                cur[active] = prods[rows[active], cur[active]]
                ln[active] += 1
                active &= cur != start
            k[fresh] += np.int64(1) << (4 * ln[fresh])
        dist[i] = t - ncyc
        keys[i] = k
    return dist, keys


if USE_NUMBA:
    _cycle_key_scalar = _njit(cache=True)(_cycle_key_scalar_impl)

    @_njit(cache=True)
    def _pair_tables_numba(words, invwords):  # pragma: no cover - jit
        n, t = words.shape
        dist = np.empty((n, n), dtype=np.int8)
        keys = np.empty((n, n), dtype=np.int64)
        prod = np.empty(t, dtype=np.int64)
        visited = np.empty(t, dtype=np.bool_)
        for i in range(n):
            iv = invwords[i]
            for j in range(n):
                w = words[j]
                for x in range(t):
                    prod[x] = iv[w[x]]
                key, ncyc = _cycle_key_scalar(prod, visited)
                dist[i, j] = t - ncyc
                keys[i, j] = key
        return dist, keys


def pair_tables(words: np.ndarray, invwords: np.ndarray):
    """Return (dist, keys): dist[i,j] = |inv(s_i) s_j|, keys[i,j] its type key."""
    words = np.ascontiguousarray(words, dtype=np.int64)
    invwords = np.ascontiguousarray(invwords, dtype=np.int64)
    if USE_NUMBA:
        return _pair_tables_numba(words, invwords)
    return _pair_tables_py(words, invwords)


def cycle_key(word) -> tuple[int, int]:
    """(type key, number of cycles) of a single permutation word."""
    perm = np.asarray(word, dtype=np.int64)
    visited = np.empty(perm.shape[0], dtype=np.bool_)
    if USE_NUMBA:
        key, ncyc = _cycle_key_scalar(perm, visited)
        return int(key), int(ncyc)
    key, ncyc = _cycle_key_scalar_impl(perm, visited)
    return int(key), int(ncyc)
