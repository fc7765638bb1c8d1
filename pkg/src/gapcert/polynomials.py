"""Dense univariate polynomials with exact coefficients.

Coefficients are Python ints or Fractions, lowest degree first. Just enough
arithmetic for the rational Weingarten forms and the derangement polynomials;
nothing here ever rounds.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Coeffs = tuple


def trim(p: Sequence) -> Coeffs:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p) if p else (0,)

def add(p: Sequence, q: Sequence) -> Coeffs:
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def scale(p: Sequence, k) -> Coeffs:
    return trim([k * c for c in p])


def mul(p: Sequence, q: Sequence) -> Coeffs:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def pow_(p: Sequence, k: int) -> Coeffs:
    out: Coeffs = (1,)
    for _ in range(k):
        out = mul(out, p)
    return out


def divide_exact(p: Sequence, q: Sequence) -> Coeffs:
    """Quotient p / q, raising if the division leaves a remainder."""
    p = list(trim(p))
    q = trim(q)
    if q == (0,):
        raise ZeroDivisionError
    if trim(p) == (0,):
        return (0,)
    dq = len(q) - 1
    out = [0] * (len(p) - dq)
    for i in range(len(p) - 1 - dq, -1, -1):
        c = Fraction(p[i + dq], 1) / q[-1]
        out[i] = c
        for j, b in enumerate(q):
            p[i + j] -= c * b
    if any(x != 0 for x in p):
        raise ValueError("polynomial division is not exact")
    return trim([int(c) if c.denominator == 1 else c for c in map(Fraction, out)])


def evaluate(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def as_string(p: Sequence, var: str = "z") -> str:
    terms = []
    for i, c in enumerate(trim(p)):
        if c == 0 and len(p) > 1:
            continue
        if i == 0:
            terms.append(str(c))
        elif i == 1:
            terms.append(f"{c}*{var}")
        else:
            terms.append(f"{c}*{var}^{i}")
    return " + ".join(terms) if terms else "0"
