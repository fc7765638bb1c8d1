"""Composition of per-gate norm bounds into staircase gap certificates.

The comparison matrix A majorizes the block structure of the staircase
transfer operator in the deranged/non-deranged splitting: diagonal lam,
subdiagonal mu = sqrt(lam*(1-lam)), and upper triangle lam*mu^(j-i). Its
Perron eigenvalue bounds the staircase subleading eigenvalue, and a
Collatz-Wielandt argument with the geometric test vector x_i = c^i,
c = 1/(sqrt(lam)+mu), caps that eigenvalue at (1+sqrt(1-lam))^2*lam
uniformly in the matrix size.

A warning on numerics: A is severely non-normal, and any normwise
backward-stable eigensolver is pseudospectrum-limited on it for n beyond
a few hundred. Dense LAPACK eigenvalues can exceed the proven
Collatz-Wielandt cap by tens of percent, and even float power iteration
overshoots the cap by ~4e-3 at n = 2000 (the iterate's tail rounds off
in absolute terms, which the exponentially mismatched left/right Perron
vectors amplify). The Perron root is perfectly conditioned under
componentwise-relative perturbations, though, so the default eigenvalue
routine bisects on the M-matrix pivot test for xI - A (all leading LU
pivots positive iff x exceeds the Perron root), whose scalar recurrence
has componentwise backward error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cache

import numpy as np

from ._numerics import IterationResult, dominant_eigenvalue_power
from . import gate_blocks

__all__ = [
    "mu_from_lambda",
    "comparison_matrix",
    "comparison_matvec",
    "gershgorin_bound",
    "collatz_wielandt_bound",
    "nontriviality_threshold",
    "pivots_positive",
    "dominant_eigenvalue",
    "first_block_bound",
    "StairBound",
    "staircase_bound",
    "gap_bounds",
    "sev_ratio",
    "design_constant",
    "DepthBounds",
    "design_depth",
    "LambdaEntry",
    "LambdaTable",
    "lambda_table",
    "GapCertificate",
    "certify",
]

# mu <= 1/2 always, so a length-96 kernel truncates the geometric tail of
# the matvec below 2^-96 in relative terms.
KERNEL_CUTOFF = 96

# Hypothesis floor of the first-block lemma: the root of
# (1+sqrt(1-lam))*sqrt(lam*(1-lam)) = 1/2.
SPECIAL_MIN_LAMBDA = 0.06963

# Above this matrix size, finite-N certificates fall back (explicitly, in
# the method trail) to the size-uniform Gershgorin cap.
FINITE_N_ITERATION_CAP = 20_000


def mu_from_lambda(lam: float) -> float:
    """Off-diagonal weight sqrt(lam*(1-lam)) of the comparison matrix."""
    if not 0.0 <= lam <= 0.5:
        raise ValueError(f"lam={lam} outside [0, 1/2]")
    return math.sqrt(lam * (1.0 - lam))


def comparison_matrix(n: int, lam: float, lam1: float | None = None) -> np.ndarray:
    """Dense n x n comparison matrix.

    Layout: A[i,i] = lam, A[i+1,i] = mu, A[i,j] = lam*mu^(j-i) for j > i.
    With lam1 given, the first row becomes (lam1, lam*mu1, lam*mu*mu1, ...)
    and the first subdiagonal entry becomes mu1 = sqrt(lam1*(1-lam1)).

    Only for inspection and small-n cross-checks; use comparison_matvec for
    anything spectral.
    """
    if n < 1:
        raise ValueError("matrix size must be >= 1")
    mu = mu_from_lambda(lam)
    a = np.zeros((n, n))
    powers = mu ** np.arange(n)
    for i in range(n):
        a[i, i] = lam
        a[i, i + 1 :] = lam * powers[1 : n - i]
        if i + 1 < n:
            a[i + 1, i] = mu
    if lam1 is not None:
        mu1 = mu_from_lambda(lam1)
        if lam1 < lam:
            raise ValueError(f"lam1={lam1} below lam={lam}")
        a[0, 0] = lam1
        if n > 1:
            a[0, 1:] = lam * mu1 * powers[: n - 1]
            a[1, 0] = mu1
    return a


def comparison_matvec(x: np.ndarray, lam: float, lam1: float | None = None) -> np.ndarray:
    """Product A @ x in O(n * KERNEL_CUTOFF) without forming A.

    The upper-triangle contribution is the suffix sum
    s_i = sum_{k>=1} mu^k x_{i+k}, evaluated by correlation with the
    geometric kernel truncated at KERNEL_CUTOFF terms (relative truncation
    error below 2^-96 since mu <= 1/2).
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    mu = mu_from_lambda(lam)
    k = min(n - 1, KERNEL_CUTOFF)
    if k > 0 and mu > 0.0:
        kernel = mu ** np.arange(k, 0, -1)  # [mu^k, ..., mu^1]
        full = np.convolve(x, kernel)
        s = np.zeros(n)
        s[: n - 1] = full[k : k + n - 1]
    else:
        s = np.zeros(n)
    y = lam * x + lam * s
    if n > 1:
        y[1:] += mu * x[:-1]
    if lam1 is not None:
        if lam1 < lam:
            raise ValueError(f"lam1={lam1} below lam={lam}")
        mu1 = mu_from_lambda(lam1)
        if n == 1:
            y[0] = lam1 * x[0]
        else:
            y[0] = lam1 * x[0] + lam * mu1 * (x[1] + s[1])
            y[1] += (mu1 - mu) * x[0]
    return y


def gershgorin_bound(lam: float) -> float:
    """Size-uniform cap (1+sqrt(1-lam))^2 * lam on the Perron value of A.

    Equal to (sqrt(lam)+mu)^2; see collatz_wielandt_bound for why it holds
    for every matrix size. Nontrivial (below 1) iff lam is below
    nontriviality_threshold().
    """
    if not 0.0 <= lam <= 0.5:
        raise ValueError(f"lam={lam} outside [0, 1/2]")
    return (1.0 + math.sqrt(1.0 - lam)) ** 2 * lam


def collatz_wielandt_bound(lam: float, c: float | None = None) -> float:
    """Row-quotient bound lam + mu/c + lam*mu*c/(1-mu*c) for x_i = c^i.

    Every row quotient (A x)_i / x_i of the nonnegative matrix A against
    the geometric test vector is at most this value, for every matrix
    size, so the Perron eigenvalue is too. The default c = 1/(sqrt(lam)+mu)
    minimizes the expression, giving exactly gershgorin_bound(lam).
    """
    mu = mu_from_lambda(lam)
    if c is None:
        c = 1.0 / (math.sqrt(lam) + mu) if lam > 0.0 else 1.0
    if c <= 0.0 or mu * c >= 1.0:
        raise ValueError("need c > 0 with mu*c < 1")
    return lam + mu / c + lam * mu * c / (1.0 - mu * c)


@cache
def nontriviality_threshold() -> float:
    """Root of (1+sqrt(1-lam))^2 * lam = 1 in (0, 1/2), about 0.29560."""
    lo, hi = 0.0, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if gershgorin_bound(mid) < 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def pivots_positive(n: int, x, lam, lam1=None) -> bool:
    """Whether all leading LU pivots of xI - A are positive.

    xI - A is a Z-matrix, so this holds iff x exceeds the Perron root.
    Gaussian elimination preserves the geometric upper structure, which
    collapses the pivots to the scalar recurrence
    d_{i+1} = (x - lam + mu^2) - mu^2*x/d_i.

    Only mu^2 = lam*(1-lam) enters, so passing Fraction arguments runs the
    test in exact rational arithmetic; bisecting with it then gives
    certified enclosures of the Perron root.
    """
    musq = lam * (1 - lam)
    d = x - (lam if lam1 is None else lam1)
    if d <= 0:
        return False
    start = 1
    if lam1 is not None and n > 1:
        d = (x - lam) - lam * lam1 * (1 - lam1) / d
        if d <= 0:
            return False
        start = 2
    a = x - lam + musq
    b = musq * x
    for _ in range(start, n):
        d = a - b / d
        if d <= 0:
            return False
    return True


def _row_sum_cap(lam: float, lam1: float | None) -> float:
    """Size-uniform infinity-norm cap on the comparison matrix."""
    # mu <= 1/2 always, so the geometric row tails converge.
    mu = mu_from_lambda(lam)
    tail = lam * mu / (1.0 - mu)
    cap = lam + mu + tail
    if lam1 is not None:
        mu1 = mu_from_lambda(lam1)
        cap = max(cap, lam1 + lam * mu1 / (1.0 - mu), mu1 + lam + tail)
    return cap


def dominant_eigenvalue(
    n: int,
    lam: float,
    lam1: float | None = None,
    tol: float = 1e-13,
    maxiter: int = 3_000_000,
    method: str = "bisection",
) -> IterationResult:
    """Perron eigenvalue of the n x n comparison matrix.

    The default bisects on the M-matrix pivot test, which is reliable at
    any size because the Perron root has componentwise-relative condition
    number one and the pivot recurrence has componentwise backward error.
    method="power" runs plain power iteration on the matvec instead; that
    is a useful cross-check for n up to a few hundred but overshoots the
    proven size-uniform cap beyond that (non-normal rounding amplification),
    and its stagnation stop also slows down as the spectral gap closes
    like 1/n^2.
    """
    if n < 1:
        raise ValueError("matrix size must be >= 1")
    if method == "power":

        def matvec(v):
            return comparison_matvec(v, lam, lam1)

        return dominant_eigenvalue_power(matvec, n, tol=tol, maxiter=maxiter)
    if method != "bisection":
        raise ValueError(f"unknown method {method!r}")
    lo = 0.0
    hi = _row_sum_cap(lam, lam1) + 1e-9
    it = 0
    while hi - lo > tol * max(hi, 1e-300) and it < 200:
        mid = 0.5 * (lo + hi)
        if pivots_positive(n, mid, lam, lam1):
            hi = mid
        else:
            lo = mid
        it += 1
    return IterationResult(0.5 * (lo + hi), 0.5 * (hi - lo), it)


def first_block_bound(lam: float, lam1: float) -> float:
    """Composition cap when the first gate's norm lam1 exceeds the others.

    max((1+sqrt(1-lam))^2*lam, lam1 + (1+sqrt(1-lam))*sqrt((1-lam1)*lam*lam1)),
    valid for 0.06963 <= lam <= lam1 <= 1/2. At lam1 = lam it reduces to
    gershgorin_bound(lam).
    """
    if lam < SPECIAL_MIN_LAMBDA:
        raise ValueError(f"lam={lam} below the hypothesis floor {SPECIAL_MIN_LAMBDA}")
    if lam > 0.5:
        raise ValueError(f"lam={lam} above 1/2")
    if lam1 < lam:
        raise ValueError(f"lam1={lam1} below lam={lam}")
    if lam1 > 0.5:
        raise ValueError(f"lam1={lam1} above 1/2")
    root = 1.0 + math.sqrt(1.0 - lam)
    corner = lam1 + root * math.sqrt((1.0 - lam1) * lam * lam1)
    return max(gershgorin_bound(lam), corner)


@dataclass(frozen=True)
class StairBound:
    """Composed staircase bound with its triviality flag."""

    value: float
    nontrivial: bool


def staircase_bound(lam_sup: float) -> StairBound:
    """Gershgorin composition of a uniform per-gate bound lam_sup."""
    if not 0.0 <= lam_sup <= 0.5:
        raise ValueError(f"lam_sup={lam_sup} outside [0, 1/2]")
    value = gershgorin_bound(lam_sup)
    return StairBound(value, value < 1.0)


def gap_bounds(q: int, n_sites: float = math.inf) -> tuple[float, float]:
    """Spectral-gap lower and upper bounds (gap_lower, gap_upper).

    gap_lower = 1 - gershgorin_bound(1/(q^2+1)) is size-uniform and valid
    for moments t <= q. gap_upper = 1 - (2q/(q^2+1) * cos(pi/N))^2 is valid
    for every t >= 2; the N -> inf limit replaces the cosine by 1.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    if n_sites != math.inf and n_sites < 2:
        raise ValueError("need at least 2 sites")
    lam = 1.0 / (q * q + 1.0)
    gap_lower = 1.0 - gershgorin_bound(lam)
    cosine = 1.0 if math.isinf(n_sites) else math.cos(math.pi / n_sites)
    gap_upper = 1.0 - (2.0 * q / (q * q + 1.0) * cosine) ** 2
    return gap_lower, gap_upper


def sev_ratio(q: int) -> float:
    """Ratio (1-gap_lower)/(1-gap_upper) at N = inf: ((1+sqrt(1+1/q^2))/2)^2."""
    if q < 2:
        raise ValueError("q must be >= 2")
    return ((1.0 + math.sqrt(1.0 + 1.0 / (q * q))) / 2.0) ** 2


def design_constant(q: int) -> float:
    """Depth constant C(q) = 2/log(1/lam_stair) for the q-only staircase cap."""
    lam_stair = gershgorin_bound(1.0 / (q * q + 1.0))
    return 2.0 / math.log(1.0 / lam_stair)


@dataclass(frozen=True)
class DepthBounds:
    """Circuit-depth bounds for an eps-approximate design."""

    constant: float
    additive: float
    additive_layers: int
    multiplicative_layers: int


def design_depth(
    n_sites: int,
    q: int,
    t: int,
    eps: float,
    lam_stair: float | None = None,
) -> DepthBounds:
    """Depth bounds from a staircase subleading-eigenvalue cap.

    additive = 1 + (2/log(1/lam_stair)) * (2*N*t*log(q) + log(1/eps));
    multiplicative doubles the ceiling of half the same budget. Natural
    logarithms throughout.
    """
    if math.isinf(n_sites):
        raise ValueError("depth bounds need a finite site count")
    if n_sites < 2 or q < 2 or t < 1:
        raise ValueError("need n_sites >= 2, q >= 2, t >= 1")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps={eps} outside (0, 1)")
    if lam_stair is None:
        lam_stair = gershgorin_bound(1.0 / (q * q + 1.0))
    if not 0.0 < lam_stair < 1.0:
        raise ValueError(f"lam_stair={lam_stair} outside (0, 1)")
    rate = math.log(1.0 / lam_stair)
    budget = 2.0 * n_sites * t * math.log(q) + math.log(1.0 / eps)
    constant = 2.0 / rate
    additive = 1.0 + constant * budget
    return DepthBounds(
        constant=constant,
        additive=additive,
        additive_layers=math.ceil(additive),
        multiplicative_layers=2 * math.ceil(budget / (2.0 * rate)),
    )


@dataclass(frozen=True)
class LambdaEntry:
    """Per-gate-index bound with its provenance tag."""

    m: int
    value: float
    source: str


@dataclass(frozen=True)
class LambdaTable:
    """Per-m subleading bounds plus the m-uniform tail."""

    q: int
    t: int
    entries: tuple[LambdaEntry, ...]
    tail: float
    tail_source: str

    @property
    def sup(self) -> float:
        head = max((e.value for e in self.entries), default=0.0)
        return max(head, self.tail)


def _uniform_rest_bound(q: int, t: int) -> tuple[float, tuple[str, ...]]:
    """m-uniform bound over moments 3..t and the trail entries it used."""
    best = 0.0
    trail: list[str] = []
    for k in range(3, t + 1):
        value, regime = gate_blocks.subleading_bound(k, q)
        best = max(best, float(value))
        trail.append(f"uniform-bound(k={k}, regime={regime})")
    return best, tuple(trail)


def lambda_table(
    q: int,
    t: int,
    m_max: int = 64,
    exact: bool = False,
) -> tuple[LambdaTable, tuple[str, ...]]:
    """Per-m table of 3-site subleading bounds for moments up to t <= q.

    Each entry is the max of the exact closed-form moment-2 value at that m
    and the m-uniform bounds for moments 3..t (those hold for every m >= 1,
    not just the tail). With exact=True the per-m entries are instead the
    exact deranged-block norms from the 3-site factorization, which is slow
    above t = 5.
    """
    if t > q:
        raise ValueError("per-m table needs t <= q; use the q=2 numerical route")
    rest, trail = _uniform_rest_bound(q, t)
    entries = []
    for m in range(1, m_max + 1):
        if exact:
            sweep = gate_blocks.km_subleading_bound(m, q, t)
            entries.append(LambdaEntry(m, float(sweep.value), "exact-block-norms"))
        else:
            t2 = float(gate_blocks.closed_form_subleading_t2(m, q))
            if t2 >= rest:
                entries.append(LambdaEntry(m, t2, "t2-closed-form"))
            else:
                entries.append(LambdaEntry(m, rest, "uniform-bound(k>=3)"))
    tail = max(1.0 / (q * q + 1.0), rest)
    tail_source = "t2-supremum" if tail == 1.0 / (q * q + 1.0) else "uniform-bound(k>=3)"
    table = LambdaTable(q=q, t=t, entries=tuple(entries), tail=tail, tail_source=tail_source)
    trail = ("t2-closed-form(m<=%d)" % m_max,) + trail + ("tail: " + tail_source,)
    return table, trail


@dataclass(frozen=True)
class GapCertificate:
    """Composed spectral-gap certificate for a staircase/brickwork circuit."""

    n_sites: float
    q: int
    t: int
    eps: float | None
    certified: bool
    reason: str
    lam_table: LambdaTable | None
    lam_sup: float | None
    lam_stair: float | None
    gap_lower: float | None
    gap_upper: float
    depth: DepthBounds | None
    nontrivial: bool
    method_trail: tuple[str, ...]


def _compose(
    n_sites: float,
    lam: float,
    lam1: float | None,
    trail: list[str],
    tol: float,
    maxiter: int,
) -> float:
    """Staircase cap for a uniform lam (and optional first-gate lam1)."""
    uniform = (
        first_block_bound(lam, lam1) if lam1 is not None else gershgorin_bound(lam)
    )
    if math.isinf(n_sites):
        trail.append(
            "first-block-composition" if lam1 is not None else "gershgorin-composition"
        )
        return uniform
    n = int(n_sites) - 1
    if n > FINITE_N_ITERATION_CAP:
        trail.append(f"size-uniform-cap(n={n} above iteration cap)")
        return uniform
    res = dominant_eigenvalue(n, lam, lam1, tol=tol, maxiter=maxiter)
    trail.append(f"mmatrix-bisection(n={n}, width={res.residual:.2e})")
    # The size-uniform cap is rigorous for every n, so it trims the
    # bisection's final half-interval.
    return min(res.value, uniform)


def certify(
    n_sites: float,
    q: int,
    t: int,
    eps: float | None = None,
    m_max: int = 64,
    exact: bool = False,
    tol: float = 1e-12,
    maxiter: int = 3_000_000,
) -> GapCertificate:
    """Full certificate: per-gate bounds, composition, gap, and depth.

    Regimes: t <= q composes the closed-form and table/analytic bounds;
    q = 2 with 3 <= t <= 6 uses the numerically verified per-gate values
    lam = 1/5 (lam1 = 1/4 when t >= 4); anything else yields an explicit
    no-certificate result (the gap upper bound is still reported, since it
    holds for every t).
    """
    if q < 2 or t < 2:
        raise ValueError("need q >= 2 and t >= 2")
    if n_sites != math.inf:
        if int(n_sites) != n_sites or n_sites < 2:
            raise ValueError("n_sites must be an integer >= 2 or inf")
        n_sites = int(n_sites)
    _, gap_upper = gap_bounds(q, n_sites)
    trail: list[str] = []

    if t <= q:
        table, t_trail = lambda_table(q, t, m_max=m_max, exact=exact)
        trail.extend(t_trail)
        lam_sup = table.sup
        lam1 = None
    elif q == 2 and t <= 6:
        lam_sup = 0.2
        lam1 = 0.25 if t >= 4 else None
        entries = tuple(
            LambdaEntry(m, 0.25 if (m == 1 and t >= 4) else 0.2, "verified-numerics")
            for m in range(1, m_max + 1)
        )
        table = LambdaTable(
            q=q, t=t, entries=entries, tail=0.2, tail_source="tail-assumption"
        )
        trail.append("q2-numerical-values(lam=1/5%s)" % (", lam1=1/4" if lam1 else ""))
        trail.append("tail-assumption(m beyond numerical sweep)")
    else:
        return GapCertificate(
            n_sites=n_sites,
            q=q,
            t=t,
            eps=eps,
            certified=False,
            reason=f"no certificate: t={t} > q={q} is only covered numerically at q=2, t<=6",
            lam_table=None,
            lam_sup=None,
            lam_stair=None,
            gap_lower=None,
            gap_upper=gap_upper,
            depth=None,
            nontrivial=False,
            method_trail=("gap-upper-bound-only",),
        )

    lam_stair = _compose(n_sites, lam_sup, lam1, trail, tol, maxiter)
    nontrivial = lam_stair < 1.0
    gap_lower = 1.0 - lam_stair

    depth = None
    if eps is not None and nontrivial and not math.isinf(n_sites):
        depth = design_depth(n_sites, q, t, eps, lam_stair=lam_stair)
        trail.append("depth-formula(additive, multiplicative)")
    elif eps is not None and math.isinf(n_sites):
        trail.append("depth-skipped(n_sites=inf)")

    return GapCertificate(
        n_sites=n_sites,
        q=q,
        t=t,
        eps=eps,
        certified=True,
        reason="",
        lam_table=table,
        lam_sup=lam_sup,
        lam_stair=lam_stair,
        gap_lower=gap_lower,
        gap_upper=gap_upper,
        depth=depth,
        nontrivial=nontrivial,
        method_trail=tuple(trail),
    )
