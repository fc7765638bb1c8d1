"""Derangement polynomials and the bounds they certify.

``d_t(x)`` sums ``x^(|s^{-1} u| + |u|)`` over complete derangements s and all
u in S_t. It controls the Frobenius bound on the distance-times-diagonal
factor of the half product, hence the factored subleading bounds for large t.

Three independent routes are implemented: a plain double loop (small t), a
conjugacy-class-collapsed sum (the inner sum is a class function of s), and
the alternating product form. All are exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import cache

import numpy as np

from . import polynomials as poly
from .permutations import tables


def double_loop_polynomial(t: int) -> tuple:
    """Exponent-by-exponent brute force over all pairs; use only for t <= 5."""
    tb = tables(t)
    coeffs = [0] * (2 * t + 1)
    dist = tb.dist
    for s in tb.deranged_indices:
        for u in range(tb.order):
            coeffs[int(dist[s, u]) + int(tb.length[u])] += 1
    return poly.trim(coeffs)


def _product_lengths(tb, index: int) -> np.ndarray:
    """Transposition lengths of s_index^{-1} u for every u, without the
    quadratic pair table (usable at t = 7, 8)."""
    t = tb.t
    prods = tb.inverse_words[index][tb.words]  # (order, t)
    n = prods.shape[0]
    visited = np.zeros((n, t), dtype=bool)
    ncyc = np.zeros(n, dtype=np.int64)
    rows = np.arange(n)
    for start in range(t):
        fresh = ~visited[:, start]
        if not fresh.any():
            continue
        ncyc += fresh
        visited[:, start] = True
        cur = prods[:, start].astype(np.intp)
        active = fresh & (cur != start)
        while active.any():
            visited[rows[active], cur[active]] = True
            cur[active] = prods[rows[active], cur[active]]
            active &= cur != start
    return (t - ncyc).astype(np.int64)


@cache
def brute_force_polynomial(t: int) -> tuple:
    """Class-collapsed exact sum: one length histogram per deranged class."""
    tb = tables(t)
    coeffs = np.zeros(2 * t + 1, dtype=np.int64)
    lengths = tb.length.astype(np.int64)
    for cid, ctype in enumerate(tb.class_types):
        if 1 in ctype:
            continue
        rep = int(np.nonzero(tb.class_ids == cid)[0][0])
        size = int(tb.class_sizes[cid])
        expo = _product_lengths(tb, rep) + lengths
        coeffs += size * np.bincount(expo, minlength=2 * t + 1)
    return poly.trim([int(c) for c in coeffs])


@cache
def product_form_polynomial(t: int) -> tuple:
    """Alternating closed form; equals the brute-force polynomial."""
    total: tuple = (0,)
    for k in range(t + 1):
        term: tuple = (math.comb(t, k),)
        for m in range(k + 1, t + 1):
            term = poly.mul(term, (1, 0, m - 1))  # 1 + (m-1) x^2
        sq: tuple = (1,)
        for m in range(1, k + 1):
            sq = poly.mul(sq, (1, m - 1))  # 1 + (m-1) x
        term = poly.mul(term, poly.mul(sq, sq))
        if k % 2:
            term = poly.scale(term, -1)
        total = poly.add(total, term)
    if t % 2:
        total = poly.scale(total, -1)
    return total


@cache
def length_generating_polynomial(t: int) -> tuple:
    """c_t(x) = sum over S_t of x^|u| = prod_{l=1}^{t} (1 + (l-1)x).

    The product form is the Jucys-Murphy factorization; for t <= 8 it is
    cross-checked against a direct histogram in the tests.
    """
    out: tuple = (1,)
    for m in range(1, t + 1):
        out = poly.mul(out, (1, m - 1))
    return out


def length_histogram_polynomial(t: int) -> tuple:
    """c_t(x) by direct enumeration (t <= 8)."""
    tb = tables(t)
    counts = np.bincount(tb.length.astype(np.int64), minlength=t)
    return poly.trim([int(c) for c in counts])


def value(t: int, x) -> Fraction | float:
    return poly.evaluate(product_form_polynomial(t), x)


def inverse_square_value(t: int) -> Fraction:
    """d_t(1/t^2), exact."""
    return value(t, Fraction(1, t * t))


def scaled_inverse_square(t: int) -> Fraction:
    """t^2 d_t(1/t^2): the per-t constant whose range maximum gives the
    uniform factored-bound coefficient."""
    return t * t * inverse_square_value(t)


@cache
def uniform_constant(t_lo: int = 7, t_hi: int = 28) -> Fraction:
    """max over t in [t_lo, t_hi] of t^2 d_t(1/t^2) (attained at t_lo)."""
    return max(scaled_inverse_square(t) for t in range(t_lo, t_hi + 1))


def factored_constant() -> float:
    """e^2 times the uniform constant: the coefficient of the
    product-of-factor-norms bound on the coarse-grained gate."""
    return math.e**2 * float(uniform_constant())


def frobenius_bound(t: int, q: int) -> float:
    """sqrt(d_t(q^-2)): Frobenius bound on the deranged-row restriction of
    the distance-times-diagonal factor at local dimensions >= q."""
    return math.sqrt(float(value(t, Fraction(1, q * q))))


def factored_bound(t: int, q: int) -> float:
    """e^2 d_t(q^-2): product bound (Weingarten norm e per half, Frobenius
    bound per half) on the deranged coarse-grained gate norm, t <= q."""
    if q < t:
        raise ValueError("factored bound requires q >= t")
    return math.e**2 * float(value(t, Fraction(1, q * q)))


def analytic_envelope(t: int) -> float:
    """Closed-form envelope for t^2 d_t(1/t^2)-style tails, adequate t >= 29:
    (t^2/2) e^(1/(2t^2)) [ (1/2 + 3/t)^t + (4/sqrt(t))^t ]."""
    return (
        0.5
        * t
        * t
        * math.exp(1.0 / (2 * t * t))
        * ((0.5 + 3.0 / t) ** t + (4.0 / math.sqrt(t)) ** t)
    )


def analytic_bound(t: int, q: int) -> float:
    """Closed-form bound on d_t(q^-2) for t <= q:
    analytic_envelope(t) * (t/q)^(t-2) / q^2."""
    if q < t:
        raise ValueError("analytic bound requires q >= t")
    return analytic_envelope(t) * (t / q) ** (t - 2) / (q * q)


def rising_factor_bound_residual(t: int, x: Fraction) -> float:
    """Check c_t(x^2) <= exp(t(t-1)x^2/2) with c_t the length generating
    polynomial. Returns exp-bound minus exact value (must be >= 0)."""
    y = x * x
    exact = poly.evaluate(length_generating_polynomial(t), y)
    return math.exp(t * (t - 1) * float(y) / 2) - float(exact)
