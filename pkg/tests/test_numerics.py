import numpy as np
import pytest

from gapcert import _numerics as nm


def test_dominant_singular_value_known_matrix():
    a = np.array([[3.0, 0.0], [4.0, 5.0]])
    exact = np.linalg.svd(a, compute_uv=False)[0]
    res = nm.dominant_singular_value(lambda v: a @ v, lambda v: a.T @ v, 2)
    assert res.value == pytest.approx(exact, rel=1e-10)
    assert res.residual < 1e-8
    assert res.iterations >= 1


def test_dominant_singular_value_zero_operator():
    res = nm.dominant_singular_value(lambda v: 0 * v, lambda v: 0 * v, 3)
    assert res.value == 0.0


def test_dominant_singular_value_rejects_zero_start():
    with pytest.raises(ValueError):
        nm.dominant_singular_value(
            lambda v: v, lambda v: v, 2, start=np.zeros(2)
        )


def test_dominant_singular_value_convergence_error():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((6, 6))
    with pytest.raises(nm.ConvergenceError) as exc:
        nm.dominant_singular_value(lambda v: a @ v, lambda v: a.T @ v, 6, maxiter=2)
    assert exc.value.iterations == 2
    assert exc.value.last_vector is not None


def test_dominant_eigenvalue_power_nonnegative():
    a = np.array([[2.0, 1.0], [1.0, 3.0]])
    exact = max(np.linalg.eigvalsh(a))
    res = nm.dominant_eigenvalue_power(lambda v: a @ v, 2)
    assert res.value == pytest.approx(exact, rel=1e-10)


def test_lanczos_recovers_spectrum_euclidean():
    rng = np.random.default_rng(1)
    q, _ = np.linalg.qr(rng.standard_normal((12, 12)))
    eigs = np.linspace(0.1, 2.0, 12)
    a = q @ np.diag(eigs) @ q.T
    alphas, betas, basis = nm.lanczos_self_adjoint(
        lambda v: a @ v,
        lambda x, y: float(x @ y),
        rng.standard_normal(12),
        max_steps=12,
        reorth_tol=1e-14,
    )
    ritz = nm.tridiagonal_eigenvalues(alphas, betas)
    assert np.abs(np.sort(ritz) - eigs).max() < 1e-8
    # the returned basis is orthonormal thanks to full reorthogonalization
    b = np.array(basis)
    assert np.abs(b @ b.T - np.eye(len(basis))).max() < 1e-12


def test_lanczos_weighted_inner_product():
    # operator self-adjoint in <x, y>_M = x^T M y but not in the plain one
    rng = np.random.default_rng(2)
    m = np.diag(rng.uniform(0.5, 2.0, size=10))
    s = rng.standard_normal((10, 10))
    s = s + s.T
    a = np.linalg.solve(m, s)  # M a = S symmetric => a is M-self-adjoint
    exact = np.sort(np.linalg.eigvals(a).real)
    alphas, betas, _ = nm.lanczos_self_adjoint(
        lambda v: a @ v,
        lambda x, y: float(x @ (m @ y)),
        rng.standard_normal(10),
        max_steps=10,
        reorth_tol=1e-14,
    )
    ritz = np.sort(nm.tridiagonal_eigenvalues(alphas, betas))
    assert np.abs(ritz - exact).max() < 1e-8


def test_lanczos_rejects_zero_start():
    with pytest.raises(ValueError):
        nm.lanczos_self_adjoint(
            lambda v: v, lambda x, y: float(x @ y), np.zeros(4), max_steps=3
        )


def test_lanczos_early_stop_on_invariant_subspace():
    a = np.diag([1.0, 2.0, 3.0, 4.0])
    start = np.array([1.0, 1.0, 0.0, 0.0])
    alphas, betas, basis = nm.lanczos_self_adjoint(
        lambda v: a @ v,
        lambda x, y: float(x @ y),
        start,
        max_steps=4,
        reorth_tol=1e-12,
    )
    # the Krylov space of this start has dimension two
    assert len(alphas) == 2
    ritz = np.sort(nm.tridiagonal_eigenvalues(alphas, betas))
    assert np.abs(ritz - np.array([1.0, 2.0])).max() < 1e-12


def test_tridiagonal_eigenvalues_empty_and_single():
    assert nm.tridiagonal_eigenvalues(np.zeros(0), np.zeros(0)).size == 0
    out = nm.tridiagonal_eigenvalues(np.array([5.0]), np.zeros(0))
    assert out == pytest.approx([5.0])
