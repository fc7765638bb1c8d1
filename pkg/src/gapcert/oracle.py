"""Dense spectral oracles on the full permutation-coefficient space.

Everything here is deliberately brute force: circuit-averaged operators
are materialized as dense matrices over the tuple basis S_t^{x N} and
handed to LAPACK.  The structured routes (gate_blocks, composer,
coderanged) are fast but easy to get subtly wrong; this module is slow
and hard to get wrong, and the test suite holds the two against each
other.  Dimensions are capped at t!^N <= 20736, which keeps every dense
eigensolve well inside a second.

The one piece of physics that the coefficient formalism takes on faith,
the inner products of permutation-invariant states, is re-derived here
from explicitly constructed vectors (permutation_state and the
physical_* checks), so the chain coefficient algebra -> physical
operators is anchored at both ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cache

import numpy as np

from . import weingarten
from .permutations import tables

__all__ = [
    "COEFFICIENT_CAP",
    "pair_gate_tensor",
    "gate_operator",
    "layer_operator",
    "transfer_matrices",
    "nonzero_eigenvalues",
    "unit_eigenvalue_count",
    "multisets_match",
    "km_direct",
    "staircase_sev",
    "deranged_tuple_mask",
    "DerangedSplit",
    "deranged_split_report",
    "deranged_split_check",
    "translation_permutation",
    "commutation_residual",
    "embedding_ranks",
    "embedding_residual",
    "permutation_state",
    "physical_gram_residual",
    "physical_projector_residual",
]

# Hard ceiling on the tuple-basis dimension t!^N for dense work.
COEFFICIENT_CAP = 20736


def _require_independent(t: int, q: int) -> None:
    if t > q:
        raise ValueError(
            f"dense oracles require t <= q (got t={t}, q={q}); permutation "
            "operators are linearly dependent below that, use the coderanged "
            "module instead"
        )


def _check_cap(dim: int) -> None:
    if dim > COEFFICIENT_CAP:
        raise ValueError(
            f"coefficient dimension {dim} exceeds the dense cap {COEFFICIENT_CAP}"
        )


def _eye_exact(n: int) -> np.ndarray:
    out = np.full((n, n), Fraction(0), dtype=object)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


@cache
def pair_gate_tensor(t: int, d1: int, d2: int, exact: bool = False) -> np.ndarray:
    """Coefficient action of the averaged two-site gate, as a (t!, t!, t!)
    tensor B with B[tau, s1, s2] the weight of the aligned output pair
    (tau, tau) on the input pair (s1, s2):

        B[tau, s1, s2] = sum_pi Wg(tau^-1 pi, d1 d2) d1^-|pi^-1 s1| d2^-|pi^-1 s2|

    Cached; treat the result as read-only.  Summing the Gram factors over
    a single input permutation gives W G = identity (for d1 d2 >= t), so
    aligned pairs are fixed exactly: the gate is a projector.
    """
    tb = tables(t)
    dist = tb.dist
    w = weingarten.weingarten_matrix(t, d1 * d2, exact=exact)
    if exact:
        q1 = np.array(
            [[Fraction(1, d1 ** int(k)) for k in row] for row in dist], dtype=object
        )
        q2 = np.array(
            [[Fraction(1, d2 ** int(k)) for k in row] for row in dist], dtype=object
        )
    else:
        q1 = float(d1) ** (-dist.astype(np.float64))
        q2 = float(d2) ** (-dist.astype(np.float64))
    out = np.empty((tb.order, tb.order, tb.order), dtype=object if exact else np.float64)
    for tau in range(tb.order):
        out[tau] = (w[tau][:, None] * q1).T @ q2
    return out


def _pair_matrix(b: np.ndarray) -> np.ndarray:
    """Reshape the gate tensor to a (t!^2, t!^2) matrix on the pair basis."""
    f = b.shape[0]
    exact = b.dtype == object
    m = np.full((f * f, f * f), Fraction(0), dtype=object) if exact else np.zeros(
        (f * f, f * f)
    )
    for i in range(f):
        m[i * f + i, :] = b[i].reshape(f * f)
    return m


def gate_operator(N: int, t: int, q: int, site: int, exact: bool = False) -> np.ndarray:
    """Dense averaged gate on sites (site, site+1) of an N-site chain,
    acting on the full tuple basis (dimension t!^N).  site is 0-based,
    0 <= site <= N-2.  Local dimension q at every site.
    """
    _require_independent(t, q)
    if not 0 <= site <= N - 2:
        raise ValueError(f"site must lie in [0, {N - 2}] for N={N}")
    f = math.factorial(t)
    dim = f**N
    _check_cap(dim)
    m2 = _pair_matrix(pair_gate_tensor(t, q, q, exact=exact))
    left = f**site
    right = f ** (N - site - 2)
    eye = _eye_exact if exact else np.eye
    return np.kron(np.kron(eye(left), m2), eye(right))


def layer_operator(N: int, t: int, q: int, parity: int) -> np.ndarray:
    """Product of all gates whose left site has the given parity (0 or 1).
    The gates in one layer act on disjoint pairs, so the order is
    immaterial.
    """
    f = math.factorial(t)
    dim = f**N
    _check_cap(dim)
    out = np.eye(dim)
    for site in range(parity, N - 1, 2):
        out = gate_operator(N, t, q, site) @ out
    return out


def transfer_matrices(N: int, t: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    """(T_stair, T_brick) on the tuple basis: the staircase applies the
    gates left to right, one per step; the brickwork applies the even
    layer then the odd layer.
    """
    _require_independent(t, q)
    f = math.factorial(t)
    _check_cap(f**N)
    stair = np.eye(f**N)
    for site in range(N - 1):
        stair = gate_operator(N, t, q, site) @ stair
    brick = layer_operator(N, t, q, 0) @ layer_operator(N, t, q, 1)
    return stair, brick


def nonzero_eigenvalues(m: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Eigenvalues with |lambda| > tol, sorted by decreasing magnitude
    (ties broken by real then imaginary part, descending)."""
    eig = np.linalg.eigvals(m)
    eig = eig[np.abs(eig) > tol]
    order = np.lexsort((-eig.imag, -eig.real, -np.abs(eig)))
    return eig[order]


def unit_eigenvalue_count(m: np.ndarray, tol: float = 1e-6) -> int:
    eig = np.linalg.eigvals(m)
    return int(np.count_nonzero(np.abs(eig - 1.0) <= tol))


def multisets_match(a, b, tol: float = 1e-8) -> bool:
    """Greedy multiset comparison of two complex spectra: each element of
    a must claim a distinct element of b within tol."""
    a = np.asarray(a, dtype=complex)
    rem = list(np.asarray(b, dtype=complex))
    if len(a) != len(rem):
        return False
    for x in sorted(a, key=abs, reverse=True):
        gaps = [abs(x - y) for y in rem]
        j = int(np.argmin(gaps))
        if gaps[j] > tol:
            return False
        rem.pop(j)
    return True


# ---------------------------------------------------------------------------
# coarse step: one wide site (dimension q^m) against a fresh pair


def _char_poly(a: np.ndarray) -> list[Fraction]:
    """Characteristic polynomial of an exact matrix by the trace recursion
    (Faddeev-LeVerrier); coefficients highest degree first, monic."""
    n = a.shape[0]
    coeffs = [Fraction(1)]
    m = a.copy()
    for k in range(1, n + 1):
        c = -Fraction(np.trace(m), k)
        coeffs.append(c)
        if k < n:
            m = a @ (m + c * _eye_exact(n))
    return coeffs


def _divide_linear(coeffs: list[Fraction], root: Fraction):
    """Synthetic division of a (highest-first) polynomial by (x - root)."""
    out = [coeffs[0]]
    for c in coeffs[1:]:
        out.append(c + out[-1] * root)
    return out[:-1], out[-1]


def _coarse_step(m: int, t: int, q: int, exact: bool) -> np.ndarray:
    f = math.factorial(t)
    eye = _eye_exact(f) if exact else np.eye(f)
    pi12 = np.kron(_pair_matrix(pair_gate_tensor(t, q**m, q, exact=exact)), eye)
    g23 = np.kron(eye, _pair_matrix(pair_gate_tensor(t, q, q, exact=exact)))
    return pi12 @ g23 @ pi12


def km_direct(m: int, t: int, q: int, exact: bool = False, unit_tol: float = 1e-6):
    """Subleading eigenvalue of the coarse three-site step: a block of
    width q^m already projected, one fresh gate across the seam, projected
    again.  Dense eigensolve on the t!^3 tuple basis.

    The exact backend (t = 2 only) factors the characteristic polynomial
    over the rationals: it must be x^a (x-1)^2 (x-lam)^2, and lam is
    returned as a Fraction.  Anything else raises.
    """
    _require_independent(t, q)
    if m < 1:
        raise ValueError("m must be >= 1")
    f = math.factorial(t)
    _check_cap(f**3)
    if exact:
        if t != 2:
            raise ValueError("the exact coarse-step backend is implemented at t = 2")
        coeffs = _char_poly(_coarse_step(m, t, q, exact=True))
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        for _ in range(2):
            coeffs, rem = _divide_linear(coeffs, Fraction(1))
            if rem != 0:
                raise RuntimeError("coarse step: (x - 1)^2 does not divide")
        if len(coeffs) != 3 or coeffs[0] != 1:
            raise RuntimeError("coarse step: unexpected residual factor degree")
        beta, gamma = coeffs[1], coeffs[2]
        if beta * beta != 4 * gamma:
            raise RuntimeError("coarse step: residual factor is not a square")
        lam = -beta / 2
        if not 0 < lam < 1:
            raise RuntimeError("coarse step: eigenvalue outside (0, 1)")
        return lam
    eig = np.linalg.eigvals(_coarse_step(m, t, q, exact=False))
    sub = eig[np.abs(eig - 1.0) > unit_tol]
    return float(np.max(np.abs(sub))) if len(sub) else 0.0


def staircase_sev(N: int, t: int, q: int, unit_tol: float = 1e-6) -> float:
    """Largest non-unit eigenvalue magnitude of the staircase transfer
    matrix (0.0 when everything is a unit eigenvalue or zero)."""
    stair, _ = transfer_matrices(N, t, q)
    eig = np.linalg.eigvals(stair)
    sub = eig[np.abs(eig - 1.0) > unit_tol]
    return float(np.max(np.abs(sub))) if len(sub) else 0.0


# ---------------------------------------------------------------------------
# deranged / aligned split of the transfer spectrum


def deranged_tuple_mask(N: int, t: int) -> np.ndarray:
    """Boolean mask over the t!^N tuple basis: True where the tuple
    (s_1, ..., s_N) has no common pair, i.e. no (a, b) with s_i(a) = b
    for every site i."""
    tb = tables(t)
    f = tb.order
    dim = f**N
    _check_cap(dim)
    digits = np.stack(
        np.unravel_index(np.arange(dim), (f,) * N), axis=1
    )  # (dim, N) ranks
    aligned = np.zeros(dim, dtype=bool)
    for a in range(t):
        vals = tb.words[digits, a]
        aligned |= (vals == vals[:, :1]).all(axis=1)
    return ~aligned


@dataclass(frozen=True)
class DerangedSplit:
    dim: int
    n_deranged: int
    triangular_residual: float
    invariant_span: str
    multiset_ok: bool
    lower_moment_ok: bool

    @property
    def ok(self) -> bool:
        return self.multiset_ok and self.lower_moment_ok


def _set_close(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    """Symmetric set-level comparison of two complex spectra."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if len(a) == 0 or len(b) == 0:
        return len(a) == len(b)
    da = np.min(np.abs(a[:, None] - b[None, :]), axis=1)
    db = np.min(np.abs(b[:, None] - a[None, :]), axis=1)
    return float(max(da.max(), db.max())) <= tol


def deranged_split_report(N: int, t: int, q: int, tol: float = 1e-8) -> DerangedSplit:
    """Split the staircase transfer matrix along the deranged / aligned
    partition of the tuple basis and check the spectral consequences:

    - one off-diagonal block vanishes, so the full nonzero spectrum is the
      multiset union of the two diagonal blocks' nonzero spectra;
    - the aligned block carries, as a set, exactly the nonzero spectrum of
      the full moment-(t-1) transfer matrix (multiplicities at the unit
      eigenvalue genuinely differ between the two sides, so the
      lower-moment comparison is at the level of sets, not multisets).
    """
    stair, _ = transfer_matrices(N, t, q)
    mask = deranged_tuple_mask(N, t)
    der = np.nonzero(mask)[0]
    ali = np.nonzero(~mask)[0]
    if len(der) == 0 or len(ali) == 0:
        # t = 1: a single aligned tuple, nothing to split
        return DerangedSplit(stair.shape[0], len(der), 0.0, "trivial", True, True)
    # stair[der, ali] = 0 means aligned inputs keep aligned support, so the
    # aligned span is the invariant one (and vice versa); either triangle
    # makes the two diagonal blocks carry the whole spectrum.
    da = float(np.max(np.abs(stair[np.ix_(der, ali)])))
    ad = float(np.max(np.abs(stair[np.ix_(ali, der)])))
    if da <= ad:
        residual, span = da, "aligned-span"
    else:
        residual, span = ad, "deranged-span"
    full = nonzero_eigenvalues(stair, tol=tol)
    block_d = nonzero_eigenvalues(stair[np.ix_(der, der)], tol=tol)
    block_a = nonzero_eigenvalues(stair[np.ix_(ali, ali)], tol=tol)
    multiset_ok = residual <= tol and multisets_match(
        full, np.concatenate([block_d, block_a]), tol=10 * tol
    )
    if t >= 2:
        prev, _ = transfer_matrices(N, t - 1, q)
        lower_ok = _set_close(block_a, nonzero_eigenvalues(prev, tol=tol), 10 * tol)
    else:
        lower_ok = True
    return DerangedSplit(
        stair.shape[0], len(der), residual, span, multiset_ok, lower_ok
    )


def deranged_split_check(N: int, t: int, q: int, tol: float = 1e-8) -> bool:
    return deranged_split_report(N, t, q, tol=tol).ok


# ---------------------------------------------------------------------------
# symmetries: global translations, moment blindness


def translation_permutation(N: int, t: int, g: int, side: str = "right") -> np.ndarray:
    """Index permutation p of the tuple basis implementing simultaneous
    translation by group element rank g at every site: right maps each
    s_i to s_i g, left to g s_i.  As a matrix, R[i, j] = 1 iff i = p[j].
    """
    tb = tables(t)
    f = tb.order
    dim = f**N
    _check_cap(dim)
    wg = tb.words[g]
    if side == "right":
        site_map = np.array(
            [tb.rank_of(tuple(int(x) for x in tb.words[i][wg])) for i in range(f)]
        )
    elif side == "left":
        site_map = np.array(
            [tb.rank_of(tuple(int(x) for x in wg[tb.words[i]])) for i in range(f)]
        )
    else:
        raise ValueError("side must be 'left' or 'right'")
    digits = np.stack(np.unravel_index(np.arange(dim), (f,) * N), axis=1)
    return np.ravel_multi_index(tuple(site_map[digits].T), (f,) * N)


def commutation_residual(N: int, t: int, q: int, side: str = "right") -> float:
    """max over gates and group elements g of the commutator between the
    gate and the global translation by g, measured entrywise after
    conjugation: |R^-1 G R - G|."""
    f = math.factorial(t)
    worst = 0.0
    for site in range(N - 1):
        gate = gate_operator(N, t, q, site)
        for g in range(f):
            p = translation_permutation(N, t, g, side=side)
            worst = max(worst, float(np.max(np.abs(gate[np.ix_(p, p)] - gate))))
    return worst


def embedding_ranks(t: int, k: int) -> np.ndarray:
    """Ranks in S_t of the copy of S_k fixing the last t - k points."""
    if not 1 <= k <= t:
        raise ValueError("need 1 <= k <= t")
    tb_t = tables(t)
    tb_k = tables(k)
    tail = tuple(range(k, t))
    return np.array(
        [tb_t.rank_of(tuple(int(x) for x in tb_k.words[i]) + tail) for i in range(tb_k.order)]
    )


def embedding_residual(t: int, k: int, d1: int, d2: int, exact: bool = False) -> float:
    """The moment-t gate tensor, restricted to pairs from the embedded
    S_k, must reproduce the moment-k gate tensor entry for entry and put
    no weight on aligned outputs outside the embedding.  Returns the
    worst absolute deviation over both requirements."""
    bt = pair_gate_tensor(t, d1, d2, exact=exact)
    bk = pair_gate_tensor(k, d1, d2, exact=exact)
    emb = embedding_ranks(t, k)
    inside = bt[np.ix_(emb, emb, emb)] - bk
    out_rows = np.setdiff1d(np.arange(bt.shape[0]), emb)
    worst = max((abs(x) for x in inside.ravel()), default=0)
    if len(out_rows):
        outside = bt[np.ix_(out_rows, emb, emb)]
        worst = max(worst, max(abs(x) for x in outside.ravel()))
    return float(worst)


# ---------------------------------------------------------------------------
# physical anchors: explicit permutation-invariant states


def permutation_state(word: tuple[int, ...], d: int) -> np.ndarray:
    """The normalized t-fold permutation state on a site of dimension d,
    as a vector over the doubled index (a_1..a_t, b_1..b_t): b = sigma(a)
    in the sense b_k = a_{sigma(k)}.  Satisfies <sigma|tau> =
    d^-|sigma^-1 tau| by construction of the normalization d^(-t/2).
    """
    t = len(word)
    n = d**t
    idx = np.stack(np.unravel_index(np.arange(n), (d,) * t), axis=1)
    left = np.arange(n)
    right = np.ravel_multi_index(tuple(idx[:, list(word)].T), (d,) * t)
    out = np.zeros(n * n)
    out[left * n + right] = d ** (-t / 2)
    return out


def physical_gram_residual(t: int, d: int) -> float:
    """Worst deviation between explicit state overlaps and the closed-form
    Gram matrix d^-|sigma^-1 tau|: the bridge between physical space and
    the coefficient formalism."""
    tb = tables(t)
    m = np.stack([permutation_state(tb.word(i), d) for i in range(tb.order)], axis=1)
    gram = m.T @ m
    target = float(d) ** (-tb.dist.astype(np.float64))
    return float(np.max(np.abs(gram - target)))


def physical_projector_residual(
    t: int, d1: int, d2: int, trials: int = 6, seed: int = 0
) -> float:
    """Compare two routes to the uniform two-site projector in physical
    space: the Weingarten form sum_{tau pi} W[tau, pi] |tau tau><pi pi|
    against the orthogonal projector onto the span of the aligned states
    (via QR).  Also folds in the idempotence defect of the Weingarten
    route.  Requires d1 d2 >= t so the projector is full rank on the
    span."""
    if d1 * d2 < t:
        raise ValueError("physical check requires d1 * d2 >= t")
    tb = tables(t)
    cols = []
    for i in range(tb.order):
        w = tb.word(i)
        cols.append(np.kron(permutation_state(w, d1), permutation_state(w, d2)))
    m = np.stack(cols, axis=1)
    w = weingarten.weingarten_matrix(t, d1 * d2)
    qmat, _ = np.linalg.qr(m)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        x = rng.standard_normal(m.shape[0])
        pw = m @ (w @ (m.T @ x))
        worst = max(worst, float(np.max(np.abs(pw - qmat @ (qmat.T @ x)))))
        pww = m @ (w @ (m.T @ pw))
        worst = max(worst, float(np.max(np.abs(pww - pw))))
    return worst
