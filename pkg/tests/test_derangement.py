import math
from fractions import Fraction

import pytest

from gapcert import derangement as dg, polynomials as poly


@pytest.mark.parametrize("t", [2, 3, 4, 5])
def test_double_loop_matches_product_form(t):
    assert dg.double_loop_polynomial(t) == dg.product_form_polynomial(t)


@pytest.mark.parametrize("t", [2, 3, 4, 5, 6, 7, 8])
def test_brute_force_matches_product_form(t):
    assert dg.brute_force_polynomial(t) == dg.product_form_polynomial(t)


@pytest.mark.parametrize("t", [2, 3, 4, 5, 6, 7, 8])
def test_length_generating_polynomial(t):
    assert dg.length_generating_polynomial(t) == dg.length_histogram_polynomial(t)


def test_small_polynomials_by_hand():
    # t = 2: the only derangement is the swap; the two pairs (swap, id) and
    # (swap, swap) contribute x^(1+0) and x^(0+1), so d_2(x) = 2x.
    assert dg.product_form_polynomial(2) == (0, 2)
    assert dg.value(2, Fraction(1, 4)) == Fraction(1, 2)


def test_d7_value():
    x = float(dg.value(7, Fraction(1, 49)))
    assert x == pytest.approx(0.0010123816974644817, rel=1e-12)
    # shares its three-significant-figure rounding with the quoted 1.013e-3
    assert f"{x:.2e}" == "1.01e-03"
    assert f"{1.013e-3:.2e}" == "1.01e-03"


def test_scaled_values_monotone_decreasing():
    vals = [dg.scaled_inverse_square(t) for t in range(7, 33)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_uniform_constant():
    c = dg.uniform_constant()
    assert c == dg.scaled_inverse_square(7)
    assert f"{float(c):.3g}" == "0.0496"


def test_factored_constant_chain():
    fc = dg.factored_constant()
    assert fc == pytest.approx(math.e**2 * float(dg.uniform_constant()), rel=1e-15)
    assert f"{fc:.3g}" == "0.367"


def test_factored_and_analytic_bounds():
    with pytest.raises(ValueError):
        dg.factored_bound(5, 4)
    with pytest.raises(ValueError):
        dg.analytic_bound(5, 4)
    for t, q in ((3, 3), (4, 5), (5, 7)):
        fb = dg.factored_bound(t, q)
        assert fb == pytest.approx(math.e**2 * float(dg.value(t, Fraction(1, q * q))))
        # the analytic envelope dominates the exact value it replaces
        assert dg.analytic_bound(t, q) >= float(dg.value(t, Fraction(1, q * q)))
    assert dg.frobenius_bound(4, 5) == pytest.approx(
        math.sqrt(float(dg.value(4, Fraction(1, 25))))
    )


def test_analytic_envelope_dominates_scaled_values():
    assert dg.analytic_envelope(7) == pytest.approx(461.59652933621044, rel=1e-12)
    for t in range(29, 40):
        assert dg.analytic_envelope(t) >= float(dg.scaled_inverse_square(t))


def test_rising_factor_bound():
    for t in (2, 3, 5, 8):
        assert dg.rising_factor_bound_residual(t, Fraction(1, t)) >= 0
        assert dg.rising_factor_bound_residual(t, Fraction(1, t * t)) >= 0


def test_polynomial_counts_pairs():
    derangement_counts = {3: 2, 4: 9, 5: 44, 6: 265, 7: 1854}
    for t, dcount in derangement_counts.items():
        p = dg.product_form_polynomial(t)
        # counting polynomial: degree 2(t-1), nonnegative coefficients, no
        # constant term, and total mass = (#derangements) * t!
        assert len(p) == 2 * t - 1
        assert all(c >= 0 for c in p)
        assert p[0] == 0
        assert poly.evaluate(p, 1) == dcount * math.factorial(t)
    assert dg.value(5, 0) == 0
