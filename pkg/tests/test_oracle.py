import math
from fractions import Fraction

import numpy as np
import pytest

from gapcert import composer, gate_blocks as gb, oracle, permutations as pm


def test_requires_independent_operators():
    with pytest.raises(ValueError):
        oracle.transfer_matrices(3, 3, 2)
    with pytest.raises(ValueError):
        oracle.km_direct(1, 3, 2)


def test_pair_gate_tensor_preserves_aligned_weight():
    # an aligned input pair (s, s) emits total weight one over outputs
    b = oracle.pair_gate_tensor(2, 2, 2)
    assert b.shape == (2, 2, 2)
    totals = b.sum(axis=0)
    assert np.abs(np.diag(totals) - 1.0).max() < 1e-12
    exact = oracle.pair_gate_tensor(2, 2, 2, exact=True)
    assert np.abs(exact.astype(np.float64) - b).max() < 1e-15
    b3 = oracle.pair_gate_tensor(3, 3, 3)
    assert np.abs(np.einsum("oss->s", b3) - 1.0).max() < 1e-12


def test_staircase_sev_values():
    assert oracle.staircase_sev(2, 2, 2) == 0.0
    assert oracle.staircase_sev(3, 2, 2) == pytest.approx(0.16, abs=1e-10)
    assert oracle.staircase_sev(4, 2, 2) == pytest.approx(0.32, abs=1e-10)
    assert oracle.staircase_sev(3, 2, 3) == pytest.approx(0.09, abs=1e-10)
    assert oracle.staircase_sev(3, 3, 3) == pytest.approx(0.09, abs=1e-10)
    assert oracle.staircase_sev(5, 2, 2) == pytest.approx(0.4188854381999833, abs=1e-10)


def test_staircase_sev_below_composed_bound():
    # composition bound with the exact per-gate value 1/(q^2+1)
    for N, t, q in ((3, 2, 2), (4, 2, 2), (5, 2, 2), (3, 2, 3), (3, 3, 3), (4, 3, 3)):
        sev = oracle.staircase_sev(N, t, q)
        cap = composer.gershgorin_bound(1.0 / (q * q + 1.0))
        assert sev <= cap + 1e-12
        # and the finite-size comparison-matrix bound is tighter still
        finite = composer.dominant_eigenvalue(N - 1, 1.0 / (q * q + 1.0)).value
        assert sev <= finite + 1e-9


def test_stair_brick_same_nonzero_spectrum():
    for N, t, q in ((3, 2, 2), (4, 2, 2), (3, 2, 3), (3, 3, 3)):
        stair, brick = oracle.transfer_matrices(N, t, q)
        assert oracle.multisets_match(
            oracle.nonzero_eigenvalues(stair), oracle.nonzero_eigenvalues(brick)
        )


def test_unit_eigenvalue_count():
    stair, brick = oracle.transfer_matrices(3, 2, 2)
    # t! unit eigenvalues: one per globally aligned permutation
    assert oracle.unit_eigenvalue_count(stair) == 2
    assert oracle.unit_eigenvalue_count(brick) == 2
    stair33, _ = oracle.transfer_matrices(3, 3, 3)
    assert oracle.unit_eigenvalue_count(stair33) == 6


def test_multisets_match_detects_mismatch():
    assert oracle.multisets_match([1.0, 0.5], [0.5, 1.0])
    assert not oracle.multisets_match([1.0, 0.5], [1.0])
    assert not oracle.multisets_match([1.0, 0.5], [1.0, 0.4])


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_km_direct_exact_matches_closed_form(m, q):
    assert oracle.km_direct(m, 2, q, exact=True) == gb.closed_form_subleading_t2(m, q)


def test_km_direct_specific_value():
    assert oracle.km_direct(2, 2, 3, exact=True) == Fraction(9, 91)


def test_km_direct_float_route():
    assert oracle.km_direct(1, 2, 2) == pytest.approx(0.16, abs=1e-10)
    assert oracle.km_direct(1, 3, 3) == pytest.approx(
        gb.km_subleading_bound(1, 3, 3).value, abs=1e-8
    )


def test_km_direct_rejects_bad_m():
    with pytest.raises(ValueError):
        oracle.km_direct(0, 2, 2)


def test_deranged_tuple_mask_counts():
    # t = 2: only the all-identity and all-swap tuples share a pair
    mask = oracle.deranged_tuple_mask(3, 2)
    assert mask.sum() == 6 and mask.size == 8
    assert oracle.deranged_tuple_mask(2, 3).sum() == 12


def test_deranged_split_report():
    rep = oracle.deranged_split_report(3, 2, 2)
    assert rep.ok
    assert rep.dim == 8 and rep.n_deranged == 6
    assert rep.triangular_residual == 0.0
    assert rep.invariant_span == "aligned-span"
    for N, t, q in ((4, 2, 2), (3, 2, 3), (3, 3, 3)):
        assert oracle.deranged_split_check(N, t, q)


def test_translation_commutation():
    assert oracle.commutation_residual(3, 2, 2) < 1e-12
    assert oracle.commutation_residual(3, 3, 3) < 1e-12
    assert oracle.commutation_residual(3, 2, 3, side="left") < 1e-12
    # the index map is a bijection of the tuple basis
    p = oracle.translation_permutation(3, 2, 1)
    assert sorted(p) == list(range(8))
    with pytest.raises(ValueError):
        oracle.translation_permutation(3, 2, 1, side="middle")


def test_embedding_residuals():
    assert oracle.embedding_residual(3, 2, 4, 9) < 1e-12
    assert oracle.embedding_residual(3, 3, 3, 3) < 1e-12
    assert oracle.embedding_residual(4, 2, 4, 4) < 1e-12
    with pytest.raises(ValueError):
        oracle.embedding_ranks(3, 4)


def test_embedding_ranks_form_subgroup():
    ranks = oracle.embedding_ranks(4, 2)
    tb = pm.tables(4)
    words = [tb.word(int(i)) for i in ranks]
    assert all(w[2:] == (2, 3) for w in words)
    assert len(words) == 2


def test_permutation_state_overlaps():
    # <sigma|tau> = d^-|sigma^-1 tau| including the norm-one diagonal
    v_id = oracle.permutation_state((0, 1), 2)
    v_sw = oracle.permutation_state((1, 0), 2)
    assert float(v_id @ v_id) == pytest.approx(1.0, abs=1e-15)
    assert float(v_id @ v_sw) == pytest.approx(0.5, abs=1e-15)
    assert oracle.physical_gram_residual(3, 2) < 1e-12
    assert oracle.physical_gram_residual(2, 3) < 1e-12


def test_physical_projector_residual():
    assert oracle.physical_projector_residual(2, 2, 2) < 1e-12
    assert oracle.physical_projector_residual(3, 2, 2) < 1e-12
    with pytest.raises(ValueError):
        oracle.physical_projector_residual(3, 1, 2)


def test_nonzero_eigenvalues_sorted():
    m = np.diag([0.5, 1.0, 0.0, 0.25])
    out = oracle.nonzero_eigenvalues(m)
    assert np.abs(out - np.array([1.0, 0.5, 0.25])).max() < 1e-12
