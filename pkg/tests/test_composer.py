import math
from fractions import Fraction

import numpy as np
import pytest

from gapcert import composer as cp


def test_mu_from_lambda():
    assert cp.mu_from_lambda(0.2) == pytest.approx(0.4, rel=1e-15)
    assert cp.mu_from_lambda(0.0) == 0.0


def test_gershgorin_bound_values():
    assert cp.gershgorin_bound(0.2) == pytest.approx(0.7177708763999663, rel=1e-15)
    assert cp.gershgorin_bound(0.29) == pytest.approx(0.9846, abs=1e-4)
    assert cp.gershgorin_bound(0.0) == 0.0
    with pytest.raises(ValueError):
        cp.gershgorin_bound(0.51)
    with pytest.raises(ValueError):
        cp.gershgorin_bound(-0.01)


def test_collatz_wielandt_bound():
    # the optimal test vector reproduces the Gershgorin value exactly
    assert cp.collatz_wielandt_bound(0.2) == pytest.approx(
        cp.gershgorin_bound(0.2), rel=1e-14
    )
    # any admissible suboptimal c still gives a valid, larger bound
    for c in (0.5, 0.9, 1.2):
        assert cp.collatz_wielandt_bound(0.2, c) >= cp.gershgorin_bound(0.2) - 1e-14
    with pytest.raises(ValueError):
        cp.collatz_wielandt_bound(0.2, -1.0)


def test_nontriviality_threshold():
    thr = cp.nontriviality_threshold()
    assert thr == pytest.approx(0.29560, abs=1e-5)
    assert cp.gershgorin_bound(thr - 1e-6) < 1.0
    assert cp.gershgorin_bound(thr + 1e-6) > 1.0


def test_comparison_matrix_matches_matvec():
    rng = np.random.default_rng(5)
    for n, lam, lam1 in ((7, 0.2, None), (12, 0.13, 0.25), (120, 0.2, None)):
        a = cp.comparison_matrix(n, lam, lam1)
        x = rng.standard_normal(n)
        assert np.abs(a @ x - cp.comparison_matvec(x, lam, lam1)).max() < 1e-12


def test_pivots_positive_brackets_perron_root():
    # float route
    assert cp.pivots_positive(50, 0.72, 0.2)
    assert not cp.pivots_positive(50, 0.70, 0.2)
    # exact rational route certifies the same enclosure
    lam = Fraction(1, 5)
    assert cp.pivots_positive(100, Fraction(72, 100), lam)
    assert not cp.pivots_positive(100, Fraction(71, 100), lam)


def test_dominant_eigenvalue_small_sizes():
    assert cp.dominant_eigenvalue(1, 0.2).value == pytest.approx(0.2, abs=1e-12)
    assert cp.dominant_eigenvalue(1, 0.2, 0.25).value == pytest.approx(0.25, abs=1e-12)
    # n = 2: eigenvalues of [[lam, mu], [lam*mu, lam]]
    lam = 0.2
    mu = cp.mu_from_lambda(lam)
    exact = lam + mu * math.sqrt(lam * mu * mu / mu)
    dense = np.array([[lam, mu], [lam * mu, lam]])
    exact = max(np.linalg.eigvals(dense).real)
    assert cp.dominant_eigenvalue(2, lam).value == pytest.approx(exact, abs=1e-10)


def test_dominant_eigenvalue_matches_dense_and_power():
    for n, lam, lam1 in ((12, 0.2, None), (20, 0.13, 0.25)):
        dense = cp.comparison_matrix(n, lam, lam1)
        exact = max(np.linalg.eigvals(dense).real)
        bis = cp.dominant_eigenvalue(n, lam, lam1)
        assert bis.value == pytest.approx(exact, abs=1e-9)
    pw = cp.dominant_eigenvalue(100, 0.2, method="power")
    bis = cp.dominant_eigenvalue(100, 0.2)
    assert pw.value == pytest.approx(bis.value, abs=1e-6)
    with pytest.raises(ValueError):
        cp.dominant_eigenvalue(10, 0.2, method="qr")
    with pytest.raises(ValueError):
        cp.dominant_eigenvalue(0, 0.2)


def test_dominant_eigenvalue_monotone_and_capped():
    values = [cp.dominant_eigenvalue(n, 0.2).value for n in (5, 10, 50, 200, 1000)]
    assert all(a < b + 1e-12 for a, b in zip(values, values[1:]))
    cap = cp.gershgorin_bound(0.2)
    for v in values:
        assert v <= cap + 1e-12


def test_first_block_bound():
    # at these arguments the uniform Gershgorin term dominates the corner
    assert cp.first_block_bound(0.2, 0.25) == pytest.approx(
        cp.gershgorin_bound(0.2), rel=1e-15
    )
    corner = 0.25 + (1 + math.sqrt(0.8)) * math.sqrt(0.75 * 0.2 * 0.25)
    assert corner == pytest.approx(0.6168542480672585, rel=1e-14)
    assert cp.first_block_bound(0.2, 0.2) == pytest.approx(
        cp.gershgorin_bound(0.2), rel=1e-15
    )
    # large first block: the corner term takes over
    lam, lam1 = 0.07, 0.5
    expected = lam1 + (1 + math.sqrt(1 - lam)) * math.sqrt((1 - lam1) * lam * lam1)
    assert cp.first_block_bound(lam, lam1) == pytest.approx(expected, rel=1e-15)
    assert expected > cp.gershgorin_bound(lam)
    with pytest.raises(ValueError):
        cp.first_block_bound(0.06, 0.25)  # below the hypothesis floor
    with pytest.raises(ValueError):
        cp.first_block_bound(0.2, 0.1)  # lam1 < lam
    with pytest.raises(ValueError):
        cp.first_block_bound(0.2, 0.6)


def test_first_block_dominant_eigenvalue_respects_cap():
    cap = cp.first_block_bound(0.2, 0.25)
    for n in (10, 200, 2000):
        assert cp.dominant_eigenvalue(n, 0.2, 0.25).value <= cap + 1e-12


def test_staircase_bound():
    sb = cp.staircase_bound(0.2)
    assert sb.value == pytest.approx(cp.gershgorin_bound(0.2))
    assert sb.nontrivial
    assert not cp.staircase_bound(0.31).nontrivial


def test_gap_bounds_values():
    lo, hi = cp.gap_bounds(2)
    assert lo == pytest.approx(0.2822291236000337, rel=1e-15)
    assert hi == pytest.approx(0.36, rel=1e-14)
    assert cp.gap_bounds(2, 10)[1] == pytest.approx(0.42111456180001683, rel=1e-15)
    # finite chains have a larger (weaker) upper bound than the limit
    assert cp.gap_bounds(2, 10)[1] > hi
    with pytest.raises(ValueError):
        cp.gap_bounds(1)
    with pytest.raises(ValueError):
        cp.gap_bounds(2, 1)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_gap_lower_closed_form(q):
    # 1 - (2q/(q^2+1))^2 * ((1 + sqrt(1+1/q^2))/2)^2 equals the Gershgorin
    # composition of the exact two-site subleading value 1/(q^2+1)
    lo, _ = cp.gap_bounds(q)
    closed = 1.0 - (2.0 * q / (q * q + 1.0) * (1.0 + math.sqrt(1.0 + 1.0 / q**2)) / 2.0) ** 2
    assert lo == pytest.approx(closed, rel=1e-14)


def test_sev_ratio():
    r = cp.sev_ratio(2)
    assert r == pytest.approx(1.1215169943749475, rel=1e-15)
    assert r == pytest.approx(((1 + math.sqrt(1.25)) / 2) ** 2, rel=1e-15)
    assert r - 1.0 <= 0.15  # within 15 percent of the true value at q = 2
    assert cp.sev_ratio(3) < r


def test_design_constant():
    c = cp.design_constant(2)
    assert c == pytest.approx(6.0312744284951325, rel=1e-15)
    assert c <= 6.032
    assert cp.design_constant(3) < c


def test_design_depth_pinned():
    db = cp.design_depth(100, 4, 4, 1e-4)
    assert db.additive == pytest.approx(1515.2107281681483, rel=1e-14)
    assert db.additive_layers == 1516
    assert db.multiplicative_layers == 758
    assert db.constant == pytest.approx(cp.design_constant(4), rel=1e-15)
    with pytest.raises(ValueError):
        cp.design_depth(math.inf, 4, 4, 1e-4)
    with pytest.raises(ValueError):
        cp.design_depth(100, 4, 4, 1.5)
    with pytest.raises(ValueError):
        cp.design_depth(100, 4, 4, 1e-4, lam_stair=1.0)


def test_lambda_table_structure():
    table, trail = cp.lambda_table(3, 3, m_max=5)
    assert len(table.entries) == 5
    # at m = 1 the moment-3 uniform bound (~0.0922) edges out the exact
    # moment-2 value 0.09; from m = 2 on the moment-2 value dominates
    assert table.entries[0].source == "uniform-bound(k>=3)"
    for e in table.entries[1:]:
        assert e.source == "t2-closed-form"
    values = [e.value for e in table.entries]
    assert values == sorted(values)
    assert table.tail == pytest.approx(0.1, rel=1e-15)
    assert table.tail_source == "t2-supremum"
    assert table.sup == pytest.approx(0.1, rel=1e-15)
    assert any("t2-closed-form" in s for s in trail)
    with pytest.raises(ValueError):
        cp.lambda_table(2, 3)


def test_certify_infinite_wide():
    cert = cp.certify(math.inf, 4, 4)
    assert cert.certified
    assert cert.lam_sup == pytest.approx(1 / 17, rel=1e-14)
    assert cert.gap_lower == pytest.approx(0.7716787370071236, rel=1e-14)
    assert cert.depth is None  # no depth without a finite size and eps
    assert cert.nontrivial
    assert "gershgorin-composition" in cert.method_trail


def test_certify_finite_wide():
    cert = cp.certify(100, 4, 4, eps=1e-4)
    assert cert.certified
    assert cert.depth is not None
    # the finite-size bisection tightens the uniform cap by one layer
    assert cert.depth.additive_layers == 1515
    assert any(s.startswith("mmatrix-bisection") for s in cert.method_trail)
    assert any(s.startswith("depth-formula") for s in cert.method_trail)


def test_certify_q2_numerical_regime():
    cert = cp.certify(100, 2, 5)
    assert cert.certified
    assert cert.lam_stair == pytest.approx(0.7171552171133738, rel=1e-12)
    assert any("q2-numerical-values" in s for s in cert.method_trail)
    assert any("tail-assumption" in s for s in cert.method_trail)


def test_certify_no_certificate():
    cert = cp.certify(math.inf, 2, 7)
    assert not cert.certified
    assert cert.gap_lower is None
    assert cert.gap_upper == pytest.approx(cp.gap_bounds(2)[1], rel=1e-15)
    assert "no certificate" in cert.reason
    with pytest.raises(ValueError):
        cp.certify(math.inf, 1, 4)
