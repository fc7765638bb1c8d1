"""Symmetric-group machinery on word-form permutations.

A permutation of ``{0, ..., t-1}`` is a tuple ``w`` with ``w[i]`` the image of
``i``. Composition is ``(a * b)(x) = a(b(x))``, i.e. the right factor acts
first. ``transposition_length`` is the minimal number of transpositions,
``t - (number of cycles)``; a *complete derangement* is a permutation with no
fixed point.

:class:`GroupTables` precomputes, for one value of ``t``, the lexicographic
element list together with inverse/length/class lookups and the pairwise
tables ``dist[i, j] = |s_i^{-1} s_j|`` and ``product_class[i, j] =
class(s_i^{-1} s_j)`` that the downstream operator builders index into.
"""

from __future__ import annotations

import itertools
import math
from functools import cache, cached_property

import numpy as np

from . import _accel

Word = tuple[int, ...]


def identity(t: int) -> Word:
    return tuple(range(t))


def compose(a: Word, b: Word) -> Word:
    """Product a * b acting as a(b(x))."""
    return tuple(a[x] for x in b)


def inverse(w: Word) -> Word:
    out = [0] * len(w)
    for i, x in enumerate(w):
        out[x] = i
    return tuple(out)


def cycles(w: Word) -> list[tuple[int, ...]]:
    """Cycle decomposition, each cycle starting at its smallest element."""
    seen = [False] * len(w)
    out = []
    for start in range(len(w)):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        cur = w[start]
        while cur != start:
            seen[cur] = True
            cyc.append(cur)
            cur = w[cur]
        out.append(tuple(cyc))
    return out


def cycle_type(w: Word) -> tuple[int, ...]:
    """Cycle lengths, sorted descending (a partition of t)."""
    return tuple(sorted((len(c) for c in cycles(w)), reverse=True))


def transposition_length(w: Word) -> int:
    return len(w) - len(cycles(w))


def fixed_points(w: Word) -> int:
    return sum(1 for i, x in enumerate(w) if i == x)


def is_derangement(w: Word) -> bool:
    return fixed_points(w) == 0


def all_words(t: int) -> list[Word]:
    """All t! permutations in lexicographic order."""
    return list(itertools.permutations(range(t)))


def lehmer_rank(w: Word) -> int:
    """Position of w in the lexicographic ordering of its group."""
    t = len(w)
    rank = 0
    fact = math.factorial(t - 1) if t else 1
    rest = list(w)
    for i in range(t - 1):
        smaller = sum(1 for x in rest[i + 1 :] if x < rest[i])
        rank += smaller * fact
        fact //= t - 1 - i
    return rank


def word_from_rank(t: int, rank: int) -> Word:
    avail = list(range(t))
    out = []
    fact = math.factorial(t)
    for i in range(t):
        fact //= t - i
        idx, rank = divmod(rank, fact)
        out.append(avail.pop(idx))
    return tuple(out)


def transposition(t: int, a: int, b: int) -> Word:
    w = list(range(t))
    w[a], w[b] = w[b], w[a]
    return tuple(w)


def point_factors(w: Word) -> list[tuple[int, int]]:
    """Factor w into transpositions (a_k, b_k) with b_1 < b_2 < ... .

    Peels the largest moved point: if b is the largest point with
    ``w(b) != b`` and ``a = w^{-1}(b)``, then ``w * (a b)`` fixes b and
    everything above it. The resulting factorization
    ``w = (a_1 b_1) * ... * (a_K b_K)`` has strictly increasing, pairwise
    distinct b's, ``a_k < b_k``, and is the unique one of that form. Its
    length K equals ``transposition_length(w)``.
    """
    t = len(w)
    cur = list(w)
    rev = []
    for b in range(t - 1, 0, -1):
        if cur[b] == b:
            continue
        a = cur.index(b)
        cur[a], cur[b] = cur[b], cur[a]
        rev.append((a, b))
    rev.reverse()
    return rev


def coset_split(w: Word, level: int) -> tuple[Word, Word]:
    """Split w = prefix * suffix at a point-factor boundary.

    ``prefix`` collects the factors with ``b < level`` (so it permutes only
    ``{0, ..., level-1}``), ``suffix`` the rest. ``suffix`` is the unique
    minimal-length representative of the left coset ``S_level * w``.
    """
    t = len(w)
    pre = identity(t)
    suf = identity(t)
    for a, b in point_factors(w):
        tr = transposition(t, a, b)
        if b < level:
            pre = compose(pre, tr)
        else:
            suf = compose(suf, tr)
    return pre, suf


@cache
def partitions(n: int) -> tuple[tuple[int, ...], ...]:
    """Partitions of n, parts descending, in reverse lexicographic order."""

    def gen(remaining: int, maxpart: int):
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, maxpart), 0, -1):
            for rest in gen(remaining - first, first):
                yield (first,) + rest

    return tuple(gen(n, n))


class GroupTables:
    """Cached lookup tables for S_t in lexicographic element order."""

    def __init__(self, t: int):
        if t < 1:
            raise ValueError("t must be >= 1")
        self.t = t
        self.order = math.factorial(t)
        words = np.array(all_words(t), dtype=np.int8).reshape(self.order, t)
        self.words = words
        cols = np.arange(t)
        inv = np.empty_like(words)
        rows = np.repeat(np.arange(self.order), t)
        inv[rows, words.astype(np.intp).ravel()] = np.tile(cols, self.order).astype(
            np.int8
        )
        self.inverse_words = inv
        self.inverse_rank = np.fromiter(
            (self._rank_row(inv[i]) for i in range(self.order)),
            dtype=np.int64,
            count=self.order,
        )
        keys = np.empty(self.order, dtype=np.int64)
        ncyc = np.empty(self.order, dtype=np.int64)
        for i in range(self.order):
            k, c = _accel.cycle_key(words[i])
            keys[i], ncyc[i] = k, c
        self.length = (t - ncyc).astype(np.int8)
        self.class_types = partitions(t)
        type_to_id = {pt: i for i, pt in enumerate(self.class_types)}
        key_to_id = {}
        class_ids = np.empty(self.order, dtype=np.int16)
        for i in range(self.order):
            k = int(keys[i])
            if k not in key_to_id:
                key_to_id[k] = type_to_id[cycle_type(tuple(int(x) for x in words[i]))]
            class_ids[i] = key_to_id[k]
        self.class_ids = class_ids
        self.class_sizes = np.bincount(class_ids, minlength=len(self.class_types))
        self.deranged_mask = (words != np.arange(t, dtype=np.int8)).all(axis=1)
        self.deranged_indices = np.nonzero(self.deranged_mask)[0]
        self._key_to_id = key_to_id
        self._rank_cache: dict[Word, int] = {}

    @staticmethod
    def _rank_row(row: np.ndarray) -> int:
        return lehmer_rank(tuple(int(x) for x in row))

    def rank_of(self, w: Word) -> int:
        r = self._rank_cache.get(w)
        if r is None:
            r = lehmer_rank(w)
            self._rank_cache[w] = r
        return r

    def class_id_of_type(self, cycle_type_: tuple[int, ...]) -> int:
        return self.class_types.index(tuple(cycle_type_))

    @cached_property
    def _pair(self) -> tuple[np.ndarray, np.ndarray]:
        dist, keys = _accel.pair_tables(self.words, self.inverse_words)
        uniq, invmap = np.unique(keys, return_inverse=True)
        lut = np.empty(len(uniq), dtype=np.int16)
        for pos, k in enumerate(uniq):
            kid = self._key_to_id.get(int(k))
            if kid is None:
                # key seen only among products; decode it through any element
                # with that key (must exist in the group, so search once)
                row, col = np.argwhere(keys == k)[0]
                w = compose(
                    tuple(int(x) for x in self.inverse_words[row]),
                    tuple(int(x) for x in self.words[col]),
                )
                kid = self.class_types.index(cycle_type(w))
                self._key_to_id[int(k)] = kid
            lut[pos] = kid
        pclass = lut[invmap].reshape(keys.shape).astype(np.int16)
        return dist, pclass

    @property
    def dist(self) -> np.ndarray:
        """dist[i, j] = transposition length of s_i^{-1} s_j (symmetric)."""
        return self._pair[0]

    @property
    def product_class(self) -> np.ndarray:
        """product_class[i, j] = class id of s_i^{-1} s_j (symmetric)."""
        return self._pair[1]

    @cached_property
    def product_dist(self) -> np.ndarray:
        """product_dist[i, j] = transposition length of s_i s_j."""
        return self.dist[self.inverse_rank, :]

    def word(self, i: int) -> Word:
        return tuple(int(x) for x in self.words[i])


@cache
def tables(t: int) -> GroupTables:
    return GroupTables(t)
