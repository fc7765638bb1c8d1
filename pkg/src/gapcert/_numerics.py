"""Deterministic iterative eigensolvers used by the bound computations.

Everything here is plain numpy with fixed start vectors: reruns are
byte-identical and convergence is certified by an explicit residual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ConvergenceError(RuntimeError):
    """Iteration cap reached before the tolerance was met."""

    def __init__(self, message, last_vector=None, residual=None, iterations=None):
        super().__init__(message)
        self.last_vector = last_vector
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class IterationResult:
    value: float
    residual: float
    iterations: int


def dominant_singular_value(
    matvec,
    rmatvec,
    n: int,
    start: np.ndarray | None = None,
    tol: float = 1e-12,
    maxiter: int = 100_000,
) -> IterationResult:
    """Largest singular value of A via power iteration on A^T A.

    Stops when the Rayleigh quotient (the squared singular value) changes by
    at most tol relative to its size. The residual reported is
    ||A^T A v - theta v||ic / theta for the final iterate.
    """
    if start is None:
        v = np.ones(n)
    else:
        v = np.asarray(start, dtype=float).copy()
    nv = np.linalg.norm(v)
    if nv == 0:
        raise ValueError("start vector is zero")
    v /= nv
    theta = 0.0
    for it in range(1, maxiter + 1):
        w = rmatvec(matvec(v))
        theta_new = float(v @ w)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return IterationResult(0.0, 0.0, it)
        v_new = w / nw
        if abs(theta_new - theta) <= tol * max(abs(theta_new), 1e-300):
            resid = float(np.linalg.norm(w - theta_new * v)) / max(theta_new, 1e-300)
            return IterationResult(float(np.sqrt(max(theta_new, 0.0))), resid, it)
        theta = theta_new
        v = v_new
    raise ConvergenceError(
        f"singular-value iteration did not converge in {maxiter} steps",
        last_vector=v,
        residual=abs(theta_new - theta),
        iterations=maxiter,
    )


def dominant_eigenvalue_power(
    matvec,
    n: int,
    start: np.ndarray | None = None,
    tol: float = 1e-13,
    maxiter: int = 200_000,
) -> IterationResult:
    """Perron eigenvalue of an entrywise-nonnegative operator by power
    iteration; theta is the Rayleigh quotient of the current iterate."""
    v = np.ones(n) if start is None else np.asarray(start, dtype=float).copy()
    v /= np.linalg.norm(v)
    theta = 0.0
    for it in range(1, maxiter + 1):
        w = matvec(v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return IterationResult(0.0, 0.0, it)
        theta_new = float(v @ w) / float(v @ v)
        v_new = w / nw
        if abs(theta_new - theta) <= tol * max(abs(theta_new), 1e-300):
            resid = float(np.linalg.norm(w - theta_new * v))
            return IterationResult(theta_new, resid, it)
        theta = theta_new
        v = v_new
    raise ConvergenceError(
        f"power iteration did not converge in {maxiter} steps",
        last_vector=v,
        residual=abs(theta_new - theta),
        iterations=maxiter,
    )


def lanczos_self_adjoint(
    matvec,
    inner,
    start: np.ndarray,
    max_steps: int,
    reorth_tol: float = 0.0,
) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
    """Lanczos tridiagonalization of an operator self-adjoint with respect to
    the (possibly non-Euclidean) inner product ``inner(x, y)``.

    Full reorthogonalization against every stored basis vector, in the given
    inner product. Returns (alphas, betas, basis); the tridiagonal matrix has
    alphas on the diagonal and betas off it. Stops early when the next
    residual norm falls below reorth_tol times the first vector's norm.
    """
    v = np.array(start, dtype=float, copy=True)
    nrm = np.sqrt(max(inner(v, v), 0.0))
    if nrm == 0:
        raise ValueError("start vector is zero in the given inner product")
    v /= nrm
    basis = [v]
    alphas: list[float] = []
    betas: list[float] = []
    w = None
    for _ in range(max_steps):
        w = matvec(basis[-1])
        a = inner(basis[-1], w)
        alphas.append(float(a))
        w = w - a * basis[-1]
        if len(basis) > 1:
            w = w - betas[-1] * basis[-2]
        for u in basis:  # full reorthogonalization, twice for safety
            w = w - inner(u, w) * u
        for u in basis:
            w = w - inner(u, w) * u
        b = np.sqrt(max(inner(w, w), 0.0))
        if b <= reorth_tol:
            break
        betas.append(float(b))
        basis.append(w / b)
    if len(betas) == len(alphas):
        betas = betas[:-1]
        basis = basis[:-1]
    return np.array(alphas), np.array(betas), basis


def tridiagonal_eigenvalues(alphas: np.ndarray, betas: np.ndarray) -> np.ndarray:
    k = len(alphas)
    if k == 0:
        return np.zeros(0)
    T = np.diag(alphas)
    if k > 1:
        T += np.diag(betas, 1) + np.diag(betas, -1)
    return np.linalg.eigvalsh(T)
