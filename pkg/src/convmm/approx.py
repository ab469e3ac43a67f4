"""Approximate matrix multiplication: JL sketching, PolyForm, Fourier truncation.

Three families of algorithms trade accuracy for a multiplication budget of
roughly r*n^2:

* jl_sketch_mm / sketch_and_solve: classical sketch-and-solve, with the two
  thin products optionally evaluated through the exact STPP block algorithm.
* polyform: embed into Z_{r*n^2} on an arithmetic-progression triplet with
  random signs and orderings; one FFT convolution, signed decode.
* stpp_truncated_* / tpp_truncated: keep only a heavy frequency set K of the
  convolution spectrum and invert just that part on the read-off positions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constructions import ap_triplet, vanilla_tpp
from .exact import blocked_rect_multiply
from .groups import AbelianGroup, ContractError, IntervalUnion, Signal, SlabUnion
from .transforms import Spectrum


# ---------------------------------------------------------------------------
# JL sketching


@dataclass(frozen=True)
class SketchSpec:
    """Gaussian sketching matrix: n x r i.i.d. normals scaled by 1/sqrt(r)."""

    n: int
    r: int
    seed: int = 0

    def matrix(self) -> np.ndarray:
        if not (1 <= self.r):
            raise ValueError("sketch width must be >= 1")
        rng = np.random.default_rng(self.seed)
        return rng.standard_normal((self.n, self.r)) / np.sqrt(self.r)


def jl_sketch_mm(A: np.ndarray, B: np.ndarray, r: int, seed: int = 0,
                 sketch: np.ndarray | None = None) -> np.ndarray:
    """(AS)(S^T B) with a Gaussian sketch S; expected error O(1/r) relative."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    n = A.shape[0]
    if r < 1:
        raise ValueError("sketch width must be >= 1")
    S = sketch if sketch is not None else SketchSpec(n, r, seed).matrix()
    return (A @ S) @ (S.T @ B)


def sketch_and_solve(A: np.ndarray, B: np.ndarray, r: int, m: int | None = None,
                     N: int = 1, seed: int = 0,
                     sketch: np.ndarray | None = None) -> np.ndarray:
    """Same contract as jl_sketch_mm, but evaluates the three products with
    exact blocked STPP convolutions (slower at desk scale; bitwise-close)."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    n = A.shape[0]
    S = sketch if sketch is not None else SketchSpec(n, r, seed).matrix()
    AS = blocked_rect_multiply(A, S, m=m, N=N)
    StB = blocked_rect_multiply(S.T, B, m=m, N=N)
    return blocked_rect_multiply(AS, StB, m=m, N=N)


# ---------------------------------------------------------------------------
# PolyForm


@dataclass(frozen=True)
class PolyFormRandomness:
    """Random orderings of S, T, U and the three sign vectors."""

    perm_s: np.ndarray
    perm_t: np.ndarray
    perm_u: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    @classmethod
    def draw(cls, n: int, seed: int) -> "PolyFormRandomness":
        # fixed draw order (three permutations, then three sign vectors) so
        # results are citable per seed
        rng = np.random.default_rng(seed)
        perms = [rng.permutation(n) for _ in range(3)]
        signs = [rng.integers(0, 2, n) * 2 - 1 for _ in range(3)]
        return cls(*perms, *signs)


def polyform(A: np.ndarray, B: np.ndarray, r: int, seed: int = 0,
             rand: PolyFormRandomness | None = None,
             flip_gamma: bool = False) -> np.ndarray:
    """Randomized approximate product through one convolution in Z_{r*n^2}.

    Embeds sum_{i,k} alpha_i gamma_k A[i,k] x^{S(i)+T(k)} and
    sum_{l,j} gamma_l beta_j B[l,j] x^{-T(l)+U(j)} on the randomly reordered
    AP triplet, convolves, and reads alpha_i beta_j c[S(i)+U(j)].
    Expected squared error is (rho - n^3)/n^4 * |A|_F^2 |B|_F^2 with
    rho = n^3 * floor(n/r); r = n is exact.
    """
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    n = A.shape[0]
    if A.shape != (n, n) or B.shape != (n, n):
        raise ValueError("square matrices of equal size required")
    if not (1 <= r <= n):
        raise ValueError("need 1 <= r <= n")
    rnd = rand if rand is not None else PolyFormRandomness.draw(n, seed)
    gamma = -rnd.gamma if flip_gamma else rnd.gamma
    t = ap_triplet(n, r)
    D = t.group.size
    S = t.flat("S")[rnd.perm_s]
    T = t.flat("T")[rnd.perm_t]
    U = t.flat("U")[rnd.perm_u]

    a = np.zeros(D)
    b = np.zeros(D)
    np.add.at(a, (S[:, None] + T[None, :]) % D, np.outer(rnd.alpha, gamma) * A)
    np.add.at(b, (U[None, :] - T[:, None]) % D, np.outer(gamma, rnd.beta) * B)
    c = np.fft.ifft(np.fft.fft(a) * np.fft.fft(b))
    return np.outer(rnd.alpha, rnd.beta) * c[(S[:, None] + U[None, :]) % D].real


# ---------------------------------------------------------------------------
# Fourier-slab truncation


@dataclass(frozen=True)
class TruncationPlan:
    """Width-r slab union K = K1 u K2 u K3 in the frequency cube of Z_m^3."""

    m: int
    r: int

    def __post_init__(self):
        if not (0 <= self.r <= self.m):
            raise ValueError("need 0 <= r <= m")

    @property
    def K(self) -> SlabUnion:
        return SlabUnion(self.m, self.r)

    @property
    def kept(self) -> int:
        return self.m**3 - (self.m - self.r) ** 3


class SlabSpectrum:
    """Spectrum values on a slab union K, stored on three disjoint regions.

    Region 0 is the slab xi0 < r; region 1 is xi1 < r minus region 0; region 2
    is xi2 < r minus both.  Arrays are indexed [c, *rest] where c is the
    constrained coordinate, and the off-slab coordinates of regions 1 and 2
    start at r.
    """

    def __init__(self, plan: TruncationPlan, regions: list[np.ndarray]):
        m, r = plan.m, plan.r
        shapes = [(r, m, m), (r, m - r, m), (r, m - r, m - r)]
        if len(regions) != 3 or any(a.shape != s for a, s in zip(regions, shapes)):
            raise ValueError("region arrays have wrong shapes")
        self.plan = plan
        self.regions = [np.asarray(a, dtype=np.complex128) for a in regions]

    @classmethod
    def from_dense(cls, spectrum: Spectrum, plan: TruncationPlan,
                   require_supported: bool = True) -> "SlabSpectrum":
        m, r = plan.m, plan.r
        g = spectrum.grid()
        if require_supported:
            off = g[r:, r:, r:]
            if off.size and np.max(np.abs(off)) > 1e-12 * max(1.0, float(np.max(np.abs(g)))):
                raise ContractError("spectrum has support outside the slab union")
        return cls(plan, [g[:r].copy(),
                          g[r:, :r].transpose(1, 0, 2).copy(),
                          g[r:, r:, :r].transpose(2, 0, 1).copy()])

    def dense(self) -> Spectrum:
        m, r = self.plan.m, self.plan.r
        g = np.zeros((m, m, m), dtype=np.complex128)
        g[:r] = self.regions[0]
        g[r:, :r] = self.regions[1].transpose(1, 0, 2)
        g[r:, r:, :r] = self.regions[2].transpose(1, 2, 0)
        return Spectrum(AbelianGroup((m, m, m)), g.reshape(-1))

    def norm(self) -> float:
        return float(np.sqrt(sum(np.linalg.norm(a) ** 2 for a in self.regions)))


class PlanarSpectrum:
    """Full spectrum of a signal supported on two coordinate planes of Z_m^3.

    Side 'a' signals live on {xi3=0} u {xi1=0} (the X1 u X2 supports of the
    pair embedding), side 'b' on {xi1=0} u {xi2=0}.  The spectrum is then a
    sum of two functions of two frequency coordinates each, recoverable from
    two m x m 2-D FFTs.
    """

    def __init__(self, m: int, side: str, F1: np.ndarray, F2: np.ndarray):
        self.m = m
        self.side = side
        self.F1 = F1  # 'a': function of (xi0, xi1);  'b': function of (xi1, xi2)
        self.F2 = F2  # 'a': function of (xi1, xi2);  'b': function of (xi0, xi2)

    @classmethod
    def analyze(cls, signal: Signal, side: str) -> "PlanarSpectrum":
        g = signal.grid()
        m = g.shape[0]
        if g.shape != (m, m, m):
            raise ValueError("signal must live on Z_m^3")
        scale = m ** 1.5
        if side == "a":
            # planes z=0 and x=0; the shared line (x, z) = (0, 0) must be
            # empty so the two slices partition the support
            if np.any(g[1:, :, 1:]) or np.any(g[0, :, 0]):
                raise ContractError("side-a signal has support outside X1 u X2")
            return cls(m, "a", np.fft.fft2(g[:, :, 0]) / scale, np.fft.fft2(g[0, :, :]) / scale)
        if side == "b":
            if np.any(g[1:, 1:, :]) or np.any(g[0, 0, :]):
                raise ContractError("side-b signal has support outside X2 u X3")
            return cls(m, "b", np.fft.fft2(g[0, :, :]) / scale, np.fft.fft2(g[:, 0, :]) / scale)
        raise ValueError("side must be 'a' or 'b'")

    def dense(self) -> Spectrum:
        m = self.m
        if self.side == "a":
            g = self.F1[:, :, None] + self.F2[None, :, :]
        else:
            g = self.F1[None, :, :] + self.F2[:, None, :]
        return Spectrum(AbelianGroup((m, m, m)), np.broadcast_to(g, (m, m, m)).reshape(-1).copy())

    def restrict(self, plan: TruncationPlan) -> SlabSpectrum:
        """Materialise the spectrum on K only (O(|K|) assembly)."""
        m, r = plan.m, plan.r
        if self.side == "a":
            r0 = self.F1[:r, :, None] + self.F2[None, :, :]
            r1 = self.F1[r:, :r].T[:, :, None] + self.F2[:r, None, :]
            r2 = self.F1[r:, r:][None, :, :] + self.F2[r:, :r].T[:, None, :]
        else:
            r0 = self.F1[None, :, :] + self.F2[:r, None, :]
            r1 = self.F1[:r, None, :] + self.F2[r:][None, :, :]
            r2 = self.F1[r:, :r].T[:, None, :] + self.F2[r:, :r].T[:, :, None]
        shapes = [(r, m, m), (r, m - r, m), (r, m - r, m - r)]
        return SlabSpectrum(plan, [np.broadcast_to(x, s).copy() for x, s in zip([r0, r1, r2], shapes)])


def slab_partial_fft(signal: Signal, plan: TruncationPlan, side: str | None = None) -> SlabSpectrum:
    """Forward transform restricted to K via two 2-D FFTs plus O(|K|) assembly."""
    if side is None:
        side = _detect_side(signal)
    return PlanarSpectrum.analyze(signal, side).restrict(plan)


def _detect_side(signal: Signal) -> str:
    g = signal.grid()
    if not np.any(g[1:, :, 1:]):
        return "a"
    if not np.any(g[1:, 1:, :]):
        return "b"
    raise ContractError("signal is supported on neither X1 u X2 nor X2 u X3")


def slab_partial_ifft(slab: SlabSpectrum, points: np.ndarray) -> np.ndarray:
    """Inverse transform of a K-supported spectrum at selected points.

    Each region is a stack of axis-aligned frequency planes; one 2-D inverse
    FFT per plane plus a phase-weighted gather over the constrained axis give
    the exact inverse at every requested point.
    """
    m, r = slab.plan.m, slab.plan.r
    pts = np.asarray(points, dtype=np.int64) % m
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError("points must be rows of 3 coordinates")
    out = np.zeros(pts.shape[0], dtype=np.complex128)
    if r == 0:
        return out
    specs = [  # (constrained axis, free axes, offsets of the stored window)
        (0, (1, 2), (0, 0)),
        (1, (0, 2), (r, 0)),
        (2, (0, 1), (r, r)),
    ]
    for region, (axis, free, offs) in zip(slab.regions, specs):
        full = np.zeros((r, m, m), dtype=np.complex128)
        full[:, offs[0]:offs[0] + region.shape[1], offs[1]:offs[1] + region.shape[2]] = region
        G = np.fft.ifft2(full, axes=(1, 2)) * np.sqrt(m)
        phase = np.exp(2j * np.pi * np.outer(pts[:, axis], np.arange(r)) / m)
        vals = G[:, pts[:, free[0]], pts[:, free[1]]]
        out += np.einsum("pc,cp->p", phase, vals)
    return out


def truncated_product(sa: SlabSpectrum, sb: SlabSpectrum) -> SlabSpectrum:
    """sqrt(|G|) * elementwise product on K (the convolution theorem on K)."""
    if sa.plan != sb.plan:
        raise ValueError("plan mismatch")
    scale = sa.plan.m ** 1.5
    return SlabSpectrum(sa.plan, [scale * x * y for x, y in zip(sa.regions, sb.regions)])


# ---------------------------------------------------------------------------
# pair / square truncation algorithms


def embed_stpp_pair(A1, A2, B1, B2) -> tuple[Signal, Signal]:
    """Plane embedding of two (m-1) x (m-1) product pairs into Z_m^3.

    a carries A1[i,k] at (i+1, k+1, 0) and A2[i,k] at (0, i+1, k+1); b carries
    B1[l,j] at (0, m-1-l, j+1) and B2[l,j] at (j+1, 0, m-1-l).  The products
    A1 B1 and A2 B2 then appear on the read positions (i+1, 0, j+1) and
    (j+1, i+1, 0) of the convolution, with no mixing (this is the punctured-
    axes STPP family under a reindexing of its sets).
    """
    A1, A2, B1, B2 = (np.asarray(M, dtype=np.float64) for M in (A1, A2, B1, B2))
    q = A1.shape[0]
    if any(M.shape != (q, q) for M in (A1, A2, B1, B2)):
        raise ValueError("all four blocks must be square and equal-sized")
    m = q + 1
    ga = np.zeros((m, m, m))
    gb = np.zeros((m, m, m))
    ga[1:, 1:, 0] = A1
    ga[0, 1:, 1:] = A2
    gb[0, 1:, 1:] = B1[::-1, :]          # (0, m-1-l, j+1)
    gb[1:, 0, 1:] = B2.T[:, ::-1]        # (j+1, 0, m-1-l)
    group = AbelianGroup((m, m, m))
    return Signal(group, ga.reshape(-1)), Signal(group, gb.reshape(-1))


def _pair_read_points(m: int) -> np.ndarray:
    q = m - 1
    i, j = np.meshgrid(np.arange(1, m), np.arange(1, m), indexing="ij")
    r1 = np.stack([i.ravel(), np.zeros(q * q, dtype=np.int64), j.ravel()], axis=1)
    r2 = np.stack([j.ravel(), i.ravel(), np.zeros(q * q, dtype=np.int64)], axis=1)
    return np.concatenate([r1, r2], axis=0)


def stpp_truncated_pair(A1, A2, B1, B2, r: int) -> tuple[np.ndarray, np.ndarray]:
    """Two simultaneous approximate products via slab-truncated convolution.

    Deterministic: embed, two slab-restricted forward transforms, pointwise
    product scaled by sqrt(|G|) on K, partial inverse on the read region.
    r = m retains everything and is exact; r = 0 returns zeros.
    """
    a, b = embed_stpp_pair(A1, A2, B1, B2)
    q = np.asarray(A1).shape[0]
    m = q + 1
    plan = TruncationPlan(m, r)
    sa = slab_partial_fft(a, plan, side="a")
    sb = slab_partial_fft(b, plan, side="b")
    vals = slab_partial_ifft(truncated_product(sa, sb), _pair_read_points(m))
    C1 = vals[:q * q].reshape(q, q).real
    C2 = vals[q * q:].reshape(q, q).real
    return C1, C2


def stpp_truncated_square(A: np.ndarray, B: np.ndarray, r: int,
                          return_effective_size: bool = False):
    """Approximate n x n product from four truncated pair invocations.

    Splits into a 2 x 2 block grid with m = n/2 + 1; each invocation carries
    the two block products of one output block.  Odd n is zero-padded by one
    row/column (the effective size is reported on request).
    """
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    n = A.shape[0]
    if A.shape != (n, n) or B.shape != (n, n):
        raise ValueError("square matrices of equal size required")
    ne = n + (n % 2)
    if ne != n:
        Ap = np.zeros((ne, ne))
        Bp = np.zeros((ne, ne))
        Ap[:n, :n] = A
        Bp[:n, :n] = B
        A, B = Ap, Bp
    q = ne // 2
    m = q + 1
    if not (0 <= r <= m):
        raise ValueError("need 0 <= r <= n/2 + 1")

    def blk(M, i, j):
        return M[i * q:(i + 1) * q, j * q:(j + 1) * q]

    C = np.zeros((ne, ne))
    for i in range(2):
        for j in range(2):
            D1, D2 = stpp_truncated_pair(blk(A, i, 0), blk(A, i, 1),
                                         blk(B, 0, j), blk(B, 1, j), r)
            C[i * q:(i + 1) * q, j * q:(j + 1) * q] = D1 + D2
    C = C[:n, :n]
    if return_effective_size:
        return C, ne
    return C


# ---------------------------------------------------------------------------
# TPP truncation (empirical variant)


def tpp_truncation_set(n: int, r: int) -> IntervalUnion:
    """K = {xi < rn^2/2} u {xi = 0 mod n^2} u {xi >= n^3 - rn^2/2} in Z_{n^3}."""
    half = (r * n * n) // 2
    return IntervalUnion(n**3, [(0, 1, min(half, n**3)),
                                (n**3 - min(half, n**3), 1, min(half, n**3)),
                                (0, n * n, n)])


def tpp_truncated(A: np.ndarray, B: np.ndarray, r: int) -> np.ndarray:
    """Truncated convolution over Z_{n^3} on the vanilla TPP embedding.

    Keeps the two end intervals of length rn^2/2 and the n-term comb of
    multiples of n^2.  The restricted transforms are evaluated through
    full-length FFTs followed by masking, which is numerically identical to
    the direct restricted transform (no Õ(rn^2) forward method is known).
    """
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    n = A.shape[0]
    if A.shape != (n, n) or B.shape != (n, n):
        raise ValueError("square matrices of equal size required")
    if r < 0:
        raise ValueError("need r >= 0")
    if n > 220:
        raise ValueError("n^3 would exceed the desk-scale memory cap")
    t = vanilla_tpp(n, n, n)
    D = n**3
    S, T, U = t.flat("S"), t.flat("T"), t.flat("U")
    a = np.zeros(D)
    b = np.zeros(D)
    a[(S[:, None] + T[None, :]) % D] = A
    b[(U[None, :] - T[:, None]) % D] = B
    prod = np.fft.fft(a) * np.fft.fft(b)
    mask = np.zeros(D, dtype=bool)
    mask[tpp_truncation_set(n, r).indices()] = True
    prod[~mask] = 0.0
    c = np.fft.ifft(prod)
    return c[(S[:, None] + U[None, :]) % D].real
