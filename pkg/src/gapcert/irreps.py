"""Irreducible representations of the symmetric group.

Shapes are partitions (descending tuples). Matrices are built in Young's
orthogonal form: real orthogonal, with the adjacent transposition ``(k k+1)``
acting through axial distances of tableau entries. Characters are computed
independently by the Murnaghan-Nakayama rule (exact integers), which gives a
second route to every trace used in tests.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import cache

import numpy as np

from .permutations import GroupTables, Word, partitions, tables

Shape = tuple[int, ...]
Tableau = tuple[tuple[int, ...], ...]


def check_shape(shape: Shape) -> Shape:
    shape = tuple(shape)
    if any(a <= 0 for a in shape) or any(
        shape[i] < shape[i + 1] for i in range(len(shape) - 1)
    ):
        raise ValueError(f"not a partition: {shape}")
    return shape


@cache
def hook_lengths(shape: Shape) -> tuple[int, ...]:
    shape = check_shape(shape)
    cols = _conjugate(shape)
    out = []
    for r, row_len in enumerate(shape):
        for c in range(row_len):
            out.append((row_len - c) + (cols[c] - r) - 1)
    return tuple(out)


@cache
def _conjugate(shape: Shape) -> Shape:
    if not shape:
        return ()
    return tuple(sum(1 for a in shape if a > c) for c in range(shape[0]))


def dimension(shape: Shape) -> int:
    n = sum(shape)
    prod = 1
    for h in hook_lengths(shape):
        prod *= h
    return math.factorial(n) // prod


def cell_contents(shape: Shape) -> tuple[int, ...]:
    """Contents col - row, cells in row-major order."""
    return tuple(c - r for r, row_len in enumerate(shape) for c in range(row_len))


@cache
def standard_tableaux(shape: Shape) -> tuple[Tableau, ...]:
    shape = check_shape(shape)
    n = sum(shape)
    if n == 0:
        return ((),)
    out: list[Tableau] = []
    for r in range(len(shape)):
        # the largest entry sits at an inner corner
        if r + 1 < len(shape) and shape[r] == shape[r + 1]:
            continue
        smaller = list(shape)
        smaller[r] -= 1
        if smaller[r] == 0:
            smaller.pop()
        for tab in standard_tableaux(tuple(smaller)):
            rows = [list(row) for row in tab]
            while len(rows) <= r:
                rows.append([])
            rows[r].append(n - 1)
            out.append(tuple(tuple(row) for row in rows))
    return tuple(out)


@cache
def _tableau_data(shape: Shape):
    """Per-tableau entry contents and adjacent-swap partners."""
    tabs = standard_tableaux(shape)
    n = sum(shape)
    index = {tab: i for i, tab in enumerate(tabs)}
    contents = np.empty((len(tabs), n), dtype=np.int64)
    rowcol = np.empty((len(tabs), n, 2), dtype=np.int64)
    for i, tab in enumerate(tabs):
        for r, row in enumerate(tab):
            for c, entry in enumerate(row):
                contents[i, entry] = c - r
                rowcol[i, entry] = (r, c)
    partner = np.full((len(tabs), max(n - 1, 0)), -1, dtype=np.int64)
    for i, tab in enumerate(tabs):
        for k in range(n - 1):
            (r1, c1), (r2, c2) = rowcol[i, k], rowcol[i, k + 1]
            if r1 == r2 or c1 == c2:
                continue
            rows = [list(row) for row in tab]
            rows[r1][c1], rows[r2][c2] = k + 1, k
            partner[i, k] = index[tuple(tuple(row) for row in rows)]
    return tabs, contents, partner


@cache
def adjacent_generator(shape: Shape, k: int) -> np.ndarray:
    """Orthogonal-form matrix of the transposition (k, k+1)."""
    tabs, contents, partner = _tableau_data(shape)
    d = len(tabs)
    mat = np.zeros((d, d))
    for i in range(d):
        ax = int(contents[i, k + 1] - contents[i, k])
        mat[i, i] = 1.0 / ax
        j = partner[i, k]
        if j >= 0 and j > i:
            off = math.sqrt(1.0 - 1.0 / ax**2)
            mat[i, j] = off
            mat[j, i] = off
    return mat


def adjacent_factors(w: Word) -> list[int]:
    """Indices [j_1, ..., j_m] with w = s_{j_m} * ... * s_{j_1}.

    Each s_j is the adjacent transposition (j, j+1) and the right factor acts
    first, so a representation matrix is built by left-multiplying the
    generator matrices in list order.
    """
    a = list(w)
    out = []
    changed = True
    while changed:
        changed = False
        for j in range(len(a) - 1):
            if a[j] > a[j + 1]:
                a[j], a[j + 1] = a[j + 1], a[j]
                out.append(j)
                changed = True
    return out


def rep_matrix(shape: Shape, w: Word) -> np.ndarray:
    """Orthogonal-form matrix of w; exact +-1 for the one-dimensional shapes."""
    n = sum(shape)
    if len(shape) == 1:
        return np.ones((1, 1))
    if shape[0] == 1:
        from .permutations import transposition_length

        return np.array([[(-1.0) ** transposition_length(w)]])
    mat = np.eye(dimension(shape))
    for j in adjacent_factors(w):
        mat = adjacent_generator(shape, j) @ mat
    return mat


@cache
def rep_matrices_all(t: int, shape: Shape) -> np.ndarray:
    """Stack of orthogonal-form matrices for every element of S_t.

    Indexed by the lexicographic rank used in :class:`GroupTables`; shape
    ``(t!, d, d)``.
    """
    tb = tables(t)
    d = dimension(shape)
    out = np.empty((tb.order, d, d))
    for i in range(tb.order):
        out[i] = rep_matrix(shape, tb.word(i))
    return out


def _betas(shape: Shape, length: int) -> tuple[int, ...]:
    padded = list(shape) + [0] * (length - len(shape))
    return tuple(padded[i] + (length - 1 - i) for i in range(length))


def _shape_from_betas(betas: list[int]) -> Shape:
    betas = sorted(betas, reverse=True)
    length = len(betas)
    parts = tuple(b - (length - 1 - i) for i, b in enumerate(betas))
    return tuple(p for p in parts if p > 0)


@cache
def character(shape: Shape, cycle_type: tuple[int, ...]) -> int:
    """Murnaghan-Nakayama character value (exact integer)."""
    shape = check_shape(shape) if shape else ()
    n = sum(shape)
    if n != sum(cycle_type):
        raise ValueError("cycle type and shape describe different sizes")
    if n == 0:
        return 1
    k = cycle_type[0]
    rest = tuple(cycle_type[1:])
    length = len(shape) + k  # enough rows for any border strip
    betas = set(_betas(shape, length))
    total = 0
    for b in sorted(betas, reverse=True):
        nb = b - k
        if nb < 0 or nb in betas:
            continue
        crossings = sum(1 for x in betas if nb < x < b)
        newset = list(betas - {b}) + [nb]
        total += (-1) ** crossings * character(_shape_from_betas(newset), rest)
    return total


@cache
def character_table(t: int) -> np.ndarray:
    """Rows: shapes in partitions(t) order; columns: classes in same order."""
    shapes = partitions(t)
    return np.array(
        [[character(s, c) for c in shapes] for s in shapes], dtype=np.int64
    )


def isotypic_projector(t: int, shape: Shape, exact: bool = False) -> np.ndarray:
    """Group-algebra projector onto the given isotypic component.

    Entry (i, j) is dim(shape)/t! times the character of s_i^{-1} s_j. As a
    central element it commutes with both regular actions; the matrices for
    different shapes are orthogonal idempotents summing to the identity.
    """
    tb = tables(t)
    chi = [character(shape, c) for c in tb.class_types]
    d = dimension(shape)
    if exact:
        coeff = [Fraction(d * x, tb.order) for x in chi]
        lut = np.array(coeff, dtype=object)
        return lut[tb.product_class]
    lut = np.array(chi, dtype=np.float64) * (d / tb.order)
    return lut[tb.product_class]


def schur_orthogonality_residual(t: int, shape_a: Shape, shape_b: Shape) -> float:
    """Max deviation from the Schur orthogonality relations (float route)."""
    ra = rep_matrices_all(t, shape_a)
    rb = rep_matrices_all(t, shape_b)
    tb = tables(t)
    da = dimension(shape_a)
    # sum_g A(g)_{ij} B(g)_{kl} = t!/d delta_AB delta_ik delta_jl
    acc = np.einsum("gij,gkl->ikjl", ra, rb)
    if shape_a == shape_b:
        target = np.einsum("ik,jl->ikjl", np.eye(da), np.eye(da)) * (tb.order / da)
    else:
        target = np.zeros_like(acc)
    return float(np.abs(acc - target).max())
