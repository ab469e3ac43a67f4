"""Exact matrix multiplication through STPP convolutions, plus cost models.

One convolution in Z_m^{3N} carries 2^N independent (m-1)^N x (m-1)^N block
products.  Larger matrices are handled by a 2^N x 2^N block grid: each output
block needs one inner-sum pass, i.e. one batched convolution per grid cell.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .constructions import cksu_stpp, decode_stpp_batch, embed_stpp_batch
from .transforms import convolve, realify


def naive_multiply(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Cubic-time reference product (delegates to the BLAS behind numpy)."""
    return np.asarray(A) @ np.asarray(B)


def stpp_batch_multiply(m: int, N: int, As, Bs) -> list[np.ndarray]:
    """Multiply 2^N independent q x q pairs (q = (m-1)^N) with one convolution."""
    family = cksu_stpp(m, N)
    a, b = embed_stpp_batch(family, As, Bs)
    c = convolve(a, b)
    outs = decode_stpp_batch(c, family)
    if all(np.isrealobj(np.asarray(A)) for A in As) and all(np.isrealobj(np.asarray(B)) for B in Bs):
        outs = [realify(C, "stpp_batch_multiply") for C in outs]
    return outs


@dataclass(frozen=True)
class BlockingScheme:
    """Block layout for an STPP-backed square multiply."""

    m: int
    N: int

    @property
    def q(self) -> int:
        """Side of one block."""
        return (self.m - 1) ** self.N

    @property
    def k(self) -> int:
        """Blocks per side (= batch width of one convolution)."""
        return 2**self.N

    @property
    def n0(self) -> int:
        """Native matrix side q * k."""
        return self.q * self.k

    @classmethod
    def for_size(cls, n: int) -> "BlockingScheme":
        """Smallest N=1 scheme whose native side covers n."""
        m = max(3, (n + 1) // 2 + 1)
        return cls(m=m, N=1)


def blocked_multiply(A: np.ndarray, B: np.ndarray, m: int | None = None,
                     N: int | None = None, parallel: bool = False) -> np.ndarray:
    """Exact product of two n x n matrices via batched STPP convolutions.

    Inputs with n below the native side n0 are zero-padded.  Each of the
    k^2 output blocks is produced by one batched convolution whose 2^N slots
    hold the inner-dimension pairs, accumulated in ascending slot order, so
    results are bitwise deterministic whether or not ``parallel`` is set.
    """
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    n = A.shape[0]
    if A.shape != (n, n) or B.shape != (n, n):
        raise ValueError("square matrices of equal size required")
    if m is None or N is None:
        scheme = BlockingScheme.for_size(n)
    else:
        scheme = BlockingScheme(m, N)
    q, k, n0 = scheme.q, scheme.k, scheme.n0
    if n > n0:
        raise ValueError(f"matrix side {n} exceeds native side {n0} for (m={scheme.m}, N={scheme.N})")
    Ap = np.zeros((n0, n0))
    Bp = np.zeros((n0, n0))
    Ap[:n, :n] = A
    Bp[:n, :n] = B

    def blk(M, i, j):
        return M[i * q:(i + 1) * q, j * q:(j + 1) * q]

    def cell(ij):
        i, j = ij
        outs = stpp_batch_multiply(scheme.m, scheme.N,
                                   [blk(Ap, i, t) for t in range(k)],
                                   [blk(Bp, t, j) for t in range(k)])
        acc = np.zeros((q, q))
        for t in range(k):
            acc += outs[t]
        return i, j, acc

    cells = [(i, j) for i in range(k) for j in range(k)]
    C = np.zeros((n0, n0))
    if parallel:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(cell, cells))
    else:
        results = [cell(ij) for ij in cells]
    for i, j, acc in results:
        C[i * q:(i + 1) * q, j * q:(j + 1) * q] = acc
    return C[:n, :n]


def blocked_rect_multiply(X: np.ndarray, Y: np.ndarray, m: int | None = None,
                          N: int | None = None) -> np.ndarray:
    """Exact rectangular product via STPP batches over a padded block grid.

    Both factors are padded to multiples of the block side q; inner-dimension
    block pairs are fed through batched convolutions k at a time and
    accumulated in ascending order (deterministic).
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    p, s = X.shape
    s2, t = Y.shape
    if s != s2:
        raise ValueError("inner dimensions differ")
    if m is None:
        scheme = BlockingScheme.for_size(max(p, s, t))
    else:
        scheme = BlockingScheme(m, N if N is not None else 1)
    q, k = scheme.q, scheme.k
    pa, pi, pc = (-(-d // q) for d in (p, s, t))
    Xp = np.zeros((pa * q, pi * q))
    Yp = np.zeros((pi * q, pc * q))
    Xp[:p, :s] = X
    Yp[:s, :t] = Y
    zero = np.zeros((q, q))

    def blk(M, i, j):
        return M[i * q:(i + 1) * q, j * q:(j + 1) * q]

    C = np.zeros((pa * q, pc * q))
    for i in range(pa):
        for j in range(pc):
            acc = np.zeros((q, q))
            for t0 in range(0, pi, k):
                As = [blk(Xp, i, t0 + u) if t0 + u < pi else zero for u in range(k)]
                Bs = [blk(Yp, t0 + u, j) if t0 + u < pi else zero for u in range(k)]
                for out in stpp_batch_multiply(scheme.m, scheme.N, As, Bs):
                    acc += out
            C[i * q:(i + 1) * q, j * q:(j + 1) * q] = acc
    return C[:p, :t]


# ---------------------------------------------------------------------------
# cost models


@dataclass(frozen=True)
class ExponentReport:
    m: int
    tau: float
    eta: float
    exponent: float


def exponent_calculator(m: int) -> ExponentReport:
    """Asymptotic FLOP exponent of the recursive STPP scheme at base m.

    With tau = 3 ln m / ln(m-1) and eta = ln 2 / ln(m-1) the per-entry work
    scales as n^((tau + 2 eta) / (1 + eta)).
    """
    if m < 3:
        raise ValueError("need m >= 3")
    tau = 3 * math.log(m) / math.log(m - 1)
    eta = math.log(2) / math.log(m - 1)
    return ExponentReport(m, tau, eta, (tau + 2 * eta) / (1 + eta))


def best_exponent(m_range=range(3, 101)) -> ExponentReport:
    """Minimising base over an integer range."""
    return min((exponent_calculator(m) for m in m_range), key=lambda r: r.exponent)


@dataclass(frozen=True)
class ThresholdReport:
    m: int
    C: float
    N: int

    @property
    def n(self) -> int:
        """Total matrix side at the crossover."""
        return (2 * (self.m - 1)) ** self.N


def threshold_calculator(m: int, C: float, max_N: int = 200) -> ThresholdReport:
    """Minimal N where one batched convolution beats naive block products.

    Compares C * m^{3N} * log2(m^{3N}) FLOPs for the convolution against
    2 * 2^N * (m-1)^{3N} - 2^N * (m-1)^{2N} FLOPs for the 2^N naive block
    products it replaces.  Evaluated in logs to avoid overflow.
    """
    for N in range(1, max_N + 1):
        lhs = math.log(C) + 3 * N * math.log(m) + math.log(3 * N * math.log2(m))
        # rhs = 2^N (m-1)^{2N} (2 (m-1)^N - 1)
        rhs = N * math.log(2) + 2 * N * math.log(m - 1) + math.log(2 * (m - 1) ** N - 1)
        if lhs < rhs:
            return ThresholdReport(m, C, N)
    raise ValueError(f"no crossover found below N = {max_N}")
