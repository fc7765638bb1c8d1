"""Weingarten calculus in the pseudo-normalized convention.

All operators act on the group-algebra coefficient space of S_t, indexed by
the lexicographic element order of :class:`~gapcert.permutations.GroupTables`.

The Gram matrix of normalized permutation operators at local dimension d is
``G[s, u] = d^{-|s^{-1} u|}``. Its eigenvalue on the isotypic component of a
shape is ``c_shape(d) = d^{-t} prod_cells (d + content)``, nonnegative, and
zero exactly when the shape has more than d rows. The Weingarten matrix is
the Moore-Penrose inverse ``W = sum_{c != 0} c^{-1} P_shape``; ``W G`` is the
projector onto the physically realizable components (the identity when
``d >= t``).

``Wg(class, d)`` is also available as a ratio of integer polynomials in
``z = 1/d``: the denominator ``f_t`` is the least common multiple of the cell
polynomials ``p_shape(z) = prod_cells (1 + content z)`` and the numerators
``g_class`` carry integer coefficients.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import cache

import numpy as np

from . import polynomials as poly
from .irreps import cell_contents, character, dimension
from .permutations import partitions, tables

Shape = tuple[int, ...]


def gram_eigenvalue(shape: Shape, d) -> Fraction | float:
    """Eigenvalue c_shape(d) of the Gram matrix, exact for integer d."""
    t = sum(shape)
    if isinstance(d, int):
        num = 1
        for c in cell_contents(shape):
            num *= d + c
        return Fraction(num, d**t)
    prod = 1.0
    for c in cell_contents(shape):
        prod *= (d + c) / d
    return prod


def admissible_shapes(t: int, d: int) -> tuple[Shape, ...]:
    """Shapes with at most d rows: exactly those with c_shape(d) != 0."""
    return tuple(s for s in partitions(t) if len(s) <= d)


@cache
def weingarten_class_values(t: int, d: int) -> tuple[Fraction, ...]:
    """Wg(class, d) for each class in partitions(t) order, exact."""
    tb = tables(t)
    out = []
    shapes = admissible_shapes(t, d)
    weights = [
        (Fraction(dimension(s), tb.order), 1 / gram_eigenvalue(s, d), s)
        for s in shapes
    ]
    for ctype in tb.class_types:
        val = Fraction(0)
        for w, cinv, s in weights:
            val += w * cinv * character(s, ctype)
        out.append(val)
    return tuple(out)


@cache
def gram_class_identity_residual(t: int, d: int) -> Fraction:
    """Exact check that sum_shape c_shape (dim/t!) chi == d^{-length} per class."""
    tb = tables(t)
    worst = Fraction(0)
    for cid, ctype in enumerate(tb.class_types):
        val = Fraction(0)
        for s in partitions(t):
            val += (
                Fraction(dimension(s), tb.order)
                * gram_eigenvalue(s, d)
                * character(s, ctype)
            )
        length = t - len(ctype)
        worst = max(worst, abs(val - Fraction(1, d**length)))
    return worst


def _from_class_values(t: int, values, exact: bool) -> np.ndarray:
    tb = tables(t)
    if exact:
        lut = np.array(values, dtype=object)
    else:
        lut = np.array([float(v) for v in values])
    return lut[tb.product_class]


def gram_matrix(t: int, d, exact: bool = False) -> np.ndarray:
    tb = tables(t)
    if exact:
        lut = np.array([Fraction(1, int(d) ** k) for k in range(t)], dtype=object)
        return lut[tb.dist]
    return np.power(float(d), -tb.dist.astype(np.float64))


def weingarten_matrix(t: int, d: int, exact: bool = False) -> np.ndarray:
    return _from_class_values(t, weingarten_class_values(t, d), exact)


def physical_projector(t: int, d: int, exact: bool = False) -> np.ndarray:
    """Projector onto components with at most d rows (pseudo-inverse image)."""
    tb = tables(t)
    values = []
    shapes = admissible_shapes(t, d)
    for ctype in tb.class_types:
        val = Fraction(0)
        for s in shapes:
            val += Fraction(dimension(s), tb.order) * character(s, ctype)
        values.append(val)
    return _from_class_values(t, values, exact)


def norm_certificate(t: int, d: int) -> dict:
    """Largest-magnitude eigenvalues of W and G with their shapes, exact."""
    best_w, best_w_shape = None, None
    best_g, best_g_shape = None, None
    for s in partitions(t):
        c = gram_eigenvalue(s, d)
        if c != 0:
            w = 1 / c
            if best_w is None or w > best_w:
                best_w, best_w_shape = w, s
        if best_g is None or c > best_g:
            best_g, best_g_shape = c, s
    return {
        "weingarten_norm": best_w,
        "weingarten_shape": best_w_shape,
        "gram_norm": best_g,
        "gram_shape": best_g_shape,
    }


def cell_polynomial(shape: Shape) -> tuple:
    """p_shape(z) = prod over cells of (1 + content * z), integer coefficients."""
    out: tuple = (1,)
    for c in cell_contents(shape):
        out = poly.mul(out, (1, c))
    return out


@cache
def denominator_polynomial(t: int) -> tuple:
    """f_t(z): least common multiple of the cell polynomials (constant term 1).

    Computed as prod over nonzero contents k of (1 + k z)^(max multiplicity of
    the factor among all shapes).
    """
    maxmult: dict[int, int] = {}
    for s in partitions(t):
        counts: dict[int, int] = {}
        for c in cell_contents(s):
            if c != 0:
                counts[c] = counts.get(c, 0) + 1
        for k, m in counts.items():
            maxmult[k] = max(maxmult.get(k, 0), m)
    out: tuple = (1,)
    for k in sorted(maxmult):
        out = poly.mul(out, poly.pow_((1, k), maxmult[k]))
    return out


@cache
def numerator_polynomials(t: int) -> dict[tuple[int, ...], tuple]:
    """g_class(z) per cycle type: integer polynomials with Wg = g(1/d)/f_t(1/d)."""
    ft = denominator_polynomial(t)
    fact = math.factorial(t)
    out = {}
    for ctype in partitions(t):
        acc: tuple = (0,)
        for s in partitions(t):
            quotient = poly.divide_exact(ft, cell_polynomial(s))
            acc = poly.add(
                acc,
                poly.scale(
                    quotient, Fraction(dimension(s) * character(s, ctype), fact)
                ),
            )
        coeffs = []
        for c in acc:
            frac = Fraction(c)
            if frac.denominator != 1:
                raise ArithmeticError(f"non-integer numerator for class {ctype}")
            coeffs.append(int(frac))
        out[ctype] = poly.trim(coeffs)
    return out


def rational_identity_residual(t: int, d: int) -> Fraction:
    """Exact worst-class residual of Wg(c, d) == g_c(1/d) / f_t(1/d), d >= t."""
    if d < t:
        raise ValueError("rational form requires d >= t")
    z = Fraction(1, d)
    fval = poly.evaluate(denominator_polynomial(t), z)
    nums = numerator_polynomials(t)
    values = weingarten_class_values(t, d)
    worst = Fraction(0)
    for cid, ctype in enumerate(partitions(t)):
        worst = max(worst, abs(values[cid] - poly.evaluate(nums[ctype], z) / fval))
    return worst
