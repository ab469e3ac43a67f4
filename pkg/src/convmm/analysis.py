"""Diagnostics: ATPQ collision counting, spectral closed forms, error metrics.

The quality of a truncated or collision-prone embedding is governed by two
things this module quantifies: the additive triple-product quantity rho
(number of solutions of s1-s2+t1-t2+u1-u2 = 0) and, for the slab truncation,
closed-form second moments of the embedded spectra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constructions import IndexingTriplet
from .groups import AbelianGroup


# ---------------------------------------------------------------------------
# ATPQ


@dataclass
class CollisionReport:
    """Solution count rho and its bucket decomposition over (x, y) in S x U."""

    triplet: IndexingTriplet
    rho: int
    buckets: np.ndarray  # shape (|S|, |U|), bucket sizes

    @property
    def trivial(self) -> int:
        ns, nt, nu = self.triplet.sizes
        return ns * nt * nu

    @property
    def collisions(self) -> int:
        return self.rho - self.trivial


def atpq_count(t: IndexingTriplet, size_cap: int = 80) -> CollisionReport:
    """Count solutions of s1-s2+t1-t2+u1-u2 = 0 by value tallying.

    Enumerates the quadruples (s2, t1, t2, u1), tallies the value
    -s2+t1-t2+u1 on the group, and matches against the difference multiset
    {y-x : x in S, y in U}; O(n^4) instead of the naive O(n^6).
    """
    ns, nt, nu = t.sizes
    if max(ns, nt, nu) > size_cap:
        raise ValueError(f"triplet size exceeds the n <= {size_cap} enumeration cap")
    g = t.group
    d = g.ndim
    ts = (t.T[:, None, :] - t.S[None, :, :]).reshape(-1, d)   # t1 - s2
    ut = (t.U[:, None, :] - t.T[None, :, :]).reshape(-1, d)   # u1 - t2
    quad = g.reduce(ts[:, None, :] + ut[None, :, :]).reshape(-1, d)
    hist = np.bincount(g.index(quad), minlength=g.size)
    su = g.index(g.reduce(t.U[None, :, :] - t.S[:, None, :]).reshape(-1, d)).reshape(ns, nu)
    buckets = hist[su]
    return CollisionReport(t, int(buckets.sum()), buckets)


def atpq_count_naive(t: IndexingTriplet) -> int:
    """Literal six-fold enumeration, for cross-checking small instances."""
    g = t.group
    d = g.ndim
    count = 0
    flatS, flatT, flatU = (g.index(x) for x in (t.S, t.T, t.U))
    for s1 in t.S:
        for s2 in t.S:
            base1 = s1.astype(np.int64) - s2
            for t1 in t.T:
                for t2 in t.T:
                    base2 = base1 + t1 - t2
                    rem = g.reduce(base2[None, None, :] + t.U[:, None, :] - t.U[None, :, :])
                    count += int(np.count_nonzero(g.index(rem.reshape(-1, d)) == 0))
    return count


def lower_bound_check(t: IndexingTriplet) -> int:
    """Slack of rho against the abelian bound rho >= (|S||T||U|)^2 / |G|.

    Returns rho - ceil(bound); negative would falsify the bound.
    """
    report = atpq_count(t)
    ns, nt, nu = t.sizes
    bound = -((-((ns * nt * nu) ** 2)) // t.group.size)  # ceil division
    return report.rho - bound


# ---------------------------------------------------------------------------
# input distributions


@dataclass(frozen=True)
class DistributionSpec:
    """Entry distribution with the moments the concentration analysis needs.

    mu = E[x], nu = E[x^2], sigma2 = Var(x); p is the sub-Gaussian variance
    proxy of x^2 used only in the diagnostic exponent gamma.
    """

    kind: str
    mu: float
    nu: float
    p: float

    def __post_init__(self):
        if self.nu < self.mu**2 - 1e-12:
            raise ValueError("second moment below squared mean")
        if self.nu <= 0 or self.sigma2 <= 0:
            raise ValueError("concentration analysis needs nonzero variance and second moment")

    @property
    def sigma2(self) -> float:
        return self.nu - self.mu**2

    def sample(self, rng: np.random.Generator, shape) -> np.ndarray:
        if self.kind == "rademacher":
            return rng.integers(0, 2, shape) * 2.0 - 1.0
        if self.kind == "bernoulli01":
            return rng.integers(0, 2, shape) * 1.0
        if self.kind == "gaussian":
            return rng.standard_normal(shape)
        if self.kind == "folded_gaussian":
            return np.abs(rng.standard_normal(shape))
        raise ValueError(f"cannot sample custom distribution {self.kind!r}")


DISTRIBUTIONS = {
    "rademacher": DistributionSpec("rademacher", mu=0.0, nu=1.0, p=1.0),
    "bernoulli01": DistributionSpec("bernoulli01", mu=0.5, nu=0.5, p=0.5),
    "gaussian": DistributionSpec("gaussian", mu=0.0, nu=1.0, p=1.0),
    "folded_gaussian": DistributionSpec("folded_gaussian",
                                        mu=math.sqrt(2 / math.pi), nu=1.0, p=1.0),
}


def gamma_exponent(dist_a: DistributionSpec, dist_b: DistributionSpec) -> float:
    """Diagnostic exponent of the exponential tail term."""
    return (6 - 4 * math.sqrt(2)) * min(dist_a.nu**2 / dist_a.p**2,
                                        dist_b.nu**2 / dist_b.p**2)


# ---------------------------------------------------------------------------
# spectral closed forms


def indicator_spectrum(m: int, i: int, xi) -> float:
    """Fourier coefficient of the indicator of X_i at xi (closed form).

    X_1 = {(x,y,0): x,y != 0}, X_2 = {(0,x,y): x,y != 0},
    X_3 = {(x,0,y): x,y != 0}; the value depends only on whether the two
    frequency coordinates xi_i, xi_{i+1} (cyclically) vanish.
    """
    if i not in (1, 2, 3):
        raise ValueError("i must be 1, 2 or 3")
    xi = np.mod(np.asarray(xi, dtype=np.int64), m)
    pair = {1: (0, 1), 2: (1, 2), 3: (2, 0)}[i]
    f = lambda z: (m - 1.0) if z == 0 else -1.0
    return float(f(xi[pair[0]]) * f(xi[pair[1]]) / m**1.5)


def c_ab_formula(dist: DistributionSpec, side: str, m: int, delta) -> float:
    """Exact E[ahat(xi) conj(ahat(eta))] for xi - eta = delta, both outside K.

    Side 'a' spectra are sums of the X1 and X2 plane transforms, side 'b' of
    X2 and X3; for frequencies with no zero coordinate the mean contributes a
    flat 4 mu^2 / m^3 and the variance couples through the indicator spectra.
    """
    if side not in ("a", "b"):
        raise ValueError("side must be 'a' or 'b'")
    i1, i2 = (1, 2) if side == "a" else (2, 3)
    coupling = indicator_spectrum(m, i1, delta) + indicator_spectrum(m, i2, delta)
    return 4 * dist.mu**2 / m**3 + dist.sigma2 * coupling / m**1.5


def t_delta(m: int, delta) -> complex:
    """Geometric sum sum_{x in X1 u X3} omega^{x . delta} (closed form)."""
    val = indicator_spectrum(m, 1, delta) + indicator_spectrum(m, 3, delta)
    return complex(m**1.5 * val)


def s_delta(m: int, r: int, delta) -> int:
    """|K^c intersect (K^c - delta)| via per-axis cyclic interval intersection.

    K^c is the cube [r, m-1]^3; per axis the count is the overlap of
    [r, m-1] with its cyclic shift by -delta_i.
    """
    if not (0 <= r <= m):
        raise ValueError("need 0 <= r <= m")
    delta = np.mod(np.asarray(delta, dtype=np.int64), m)
    total = 1
    L = m - r  # interval length
    for d in delta:
        d = int(d)
        # x in [r, m-1] and (x + d) mod m in [r, m-1]
        # shifting [r, m-1] by -d splits it into at most two runs
        lo, hi = r - d, m - 1 - d
        count = _overlap(lo % m, hi - lo + 1, r, L, m)
        total *= count
    return int(total)


def _overlap(start: int, length: int, r: int, L: int, m: int) -> int:
    """|cyclic interval [start, start+length) intersect [r, r+L)| in Z_m."""
    count = 0
    # split the shifted interval at the wrap point
    first = min(length, m - start)
    for s, l in ((start, first), (0, length - first)):
        if l <= 0:
            continue
        lo = max(s, r)
        hi = min(s + l, r + L)
        count += max(0, hi - lo)
    return count


def truncation_error_bound(m: int, r: int, dist_a: DistributionSpec,
                           dist_b: DistributionSpec, constant: float = 16.0) -> float:
    """Leading-order expected normalized error of the slab truncation."""
    main = constant * (m - r) ** 3 / (m - 1) ** 4
    main *= dist_a.sigma2 * dist_b.sigma2 / (dist_a.nu * dist_b.nu)
    tail = 8 * (m - 1) ** 2 * math.exp(-gamma_exponent(dist_a, dist_b) * (m - 1) ** 2)
    return main + tail


# ---------------------------------------------------------------------------
# error metrics and rank diagnostics


@dataclass(frozen=True)
class ErrorReport:
    normalized_error: float   # |C - AB|_F^2 / (|A|_F^2 |B|_F^2)
    absolute_error: float     # |C - AB|_F
    max_abs_entry: float


def error_metrics(C: np.ndarray, C_exact: np.ndarray, A: np.ndarray,
                  B: np.ndarray) -> ErrorReport:
    diff = np.asarray(C) - np.asarray(C_exact)
    denom = float(np.linalg.norm(A) ** 2) * float(np.linalg.norm(B) ** 2)
    fro = float(np.linalg.norm(diff))
    return ErrorReport(fro**2 / denom, fro, float(np.max(np.abs(diff), initial=0.0)))


@dataclass(frozen=True)
class RankReport:
    rank: int
    nuclear_norm: float        # sum of singular values (standard meaning)
    sum_sq_singvals: float     # squared Frobenius norm
    singular_values: np.ndarray = field(repr=False)


def rank_diagnostics(C: np.ndarray, tol: float | None = None) -> RankReport:
    """Numerical rank plus both flavours of 'nuclear norm' with explicit labels."""
    sv = np.linalg.svd(np.asarray(C, dtype=np.float64), compute_uv=False)
    cutoff = (tol if tol is not None else 1e-8) * (sv[0] if sv.size else 0.0)
    return RankReport(int(np.count_nonzero(sv > cutoff)),
                      float(sv.sum()), float((sv**2).sum()), sv)


def best_rank_r(M: np.ndarray, r: int) -> np.ndarray:
    """Frobenius-optimal rank-r approximation from a full SVD."""
    M = np.asarray(M, dtype=np.float64)
    if r >= min(M.shape):
        return M.copy()
    u, s, vt = np.linalg.svd(M, full_matrices=False)
    return (u[:, :r] * s[:r]) @ vt[:r]
