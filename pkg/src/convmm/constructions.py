"""Index-set constructions for matrix multiplication via group convolution.

An indexing triplet (S, T, U) in a finite abelian group G realises an
|S| x |T| by |T| x |U| product: A is embedded on coefficients S(i)+T(k), B on
-T(l)+U(j), and after one group convolution the entry C[i, j] is read off at
S(i)+U(j).  Exactness of the read-off is equivalent to the triple product
property (TPP); without it the decoded matrix is only an approximation whose
quality is governed by the number of additive quadruple collisions.

A simultaneous TPP (STPP) family packs several triplets into one group so a
single convolution carries several independent products.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .groups import AbelianGroup, ContractError, Signal, cyclic
from .transforms import convolve


@dataclass(frozen=True)
class IndexingTriplet:
    """Ordered index sets S, T, U in an abelian group.

    Rows of S, T, U are group elements.  The sets are ordered lists and may in
    degenerate cases contain repeats (they are treated as indexed families
    throughout, which is what the collision accounting assumes).
    """

    group: AbelianGroup
    S: np.ndarray
    T: np.ndarray
    U: np.ndarray

    def __post_init__(self):
        for name in ("S", "T", "U"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            if arr.ndim == 1:
                arr = arr[:, None]
            if arr.shape[1] != self.group.ndim:
                raise ValueError(f"{name} rows must have {self.group.ndim} coordinates")
            object.__setattr__(self, name, self.group.reduce(arr))

    @property
    def sizes(self) -> tuple[int, int, int]:
        return (self.S.shape[0], self.T.shape[0], self.U.shape[0])

    def flat(self, name: str) -> np.ndarray:
        return self.group.index(getattr(self, name))

    def difference_cardinalities(self) -> tuple[int, int]:
        """(|{-s+t}|, |{-t+u}|) over all ordered pairs."""
        st = self.group.index(self.group.reduce(self.T[None, :, :] - self.S[:, None, :]).reshape(-1, self.group.ndim))
        tu = self.group.index(self.group.reduce(self.U[None, :, :] - self.T[:, None, :]).reshape(-1, self.group.ndim))
        return (int(np.unique(st).size), int(np.unique(tu).size))

    def is_indexing_triplet(self) -> bool:
        ns, nt, nu = self.sizes
        a, b = self.difference_cardinalities()
        return a == ns * nt and b == nt * nu


def vanilla_tpp(n: int, m: int, p: int) -> IndexingTriplet:
    """The standard TPP triplet in Z_{nmp}: S = mp*[n], T = p*[m], U = [p]."""
    g = cyclic(n * m * p)
    return IndexingTriplet(
        g,
        m * p * np.arange(n, dtype=np.int64),
        p * np.arange(m, dtype=np.int64),
        np.arange(p, dtype=np.int64),
    )


def ap_triplet(n: int, r: int) -> IndexingTriplet:
    """Arithmetic-progression triplet in Z_{r*n^2} with collision count n^3*floor(n/r).

    S = rn*[n], T = (r-1)*[n], U = r*[n].  For r = n this is a genuine TPP
    triplet; for r < n the products overlap and the decoded output is only
    approximate.  (For r < n the |{-t+u}| cardinality condition fails even
    though the read-off positions S(i)+U(j) stay distinct; the collision
    accounting treats the sets as indexed families, so nothing else is needed.)
    """
    if not (1 <= r <= n):
        raise ValueError("need 1 <= r <= n")
    g = cyclic(r * n * n)
    idx = np.arange(n, dtype=np.int64)
    return IndexingTriplet(g, r * n * idx, (r - 1) * idx, r * idx)


# ---------------------------------------------------------------------------
# embedding / decoding


def _positions(group: AbelianGroup, X: np.ndarray, Y: np.ndarray, negate_x: bool) -> np.ndarray:
    """Flat indices of (-)X[i] + Y[k] for all (i, k), shape (|X|, |Y|)."""
    sign = -1 if negate_x else 1
    coords = group.reduce(sign * X[:, None, :] + Y[None, :, :])
    return group.index(coords.reshape(-1, group.ndim)).reshape(X.shape[0], Y.shape[0])


def embed_pair(t: IndexingTriplet, A: np.ndarray, B: np.ndarray,
               sign_a=None, sign_b=None, accumulate: bool = False) -> tuple[Signal, Signal]:
    """Embed matrices as group-algebra elements a, b.

    a carries A[i, k] at S(i)+T(k); b carries B[l, j] at -T(l)+U(j).  Optional
    sign data (row_signs, col_signs) multiplies entry (i, k) by
    row_signs[i]*col_signs[k].  Unless ``accumulate`` is set, a coefficient
    collision inside either embedding raises ContractError.
    """
    ns, nt, nu = t.sizes
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != (ns, nt) or B.shape != (nt, nu):
        raise ValueError(f"expected shapes {(ns, nt)} and {(nt, nu)}")
    pos_a = _positions(t.group, t.S, t.T, negate_x=False)
    pos_b = _positions(t.group, t.T, t.U, negate_x=True)
    if not accumulate:
        for name, pos in (("a", pos_a), ("b", pos_b)):
            if np.unique(pos).size != pos.size:
                raise ContractError(f"embedding collision in {name}; pass accumulate=True to sum")
    va, vb = A.astype(np.complex128), B.astype(np.complex128)
    if sign_a is not None:
        va = va * np.outer(sign_a[0], sign_a[1])
    if sign_b is not None:
        vb = vb * np.outer(sign_b[0], sign_b[1])
    a = Signal.zeros(t.group)
    b = Signal.zeros(t.group)
    np.add.at(a.values, pos_a.reshape(-1), va.reshape(-1))
    np.add.at(b.values, pos_b.reshape(-1), vb.reshape(-1))
    return a, b


def decode(c, t: IndexingTriplet, sign=None) -> np.ndarray:
    """Read the |S| x |U| output off a convolved signal at positions S(i)+U(j)."""
    vals = c.values if isinstance(c, Signal) else np.asarray(c).reshape(-1)
    pos = _positions(t.group, t.S, t.U, negate_x=False)
    C = vals[pos]
    if sign is not None:
        C = C * np.outer(sign[0], sign[1])
    return C


def triplet_multiply(t: IndexingTriplet, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """One matrix product through a single group convolution (exact iff TPP)."""
    a, b = embed_pair(t, A, B)
    return decode(convolve(a, b), t)


# ---------------------------------------------------------------------------
# STPP families


@dataclass(frozen=True)
class StppFamily:
    """A family of triplets (S1^x, S2^x, S3^x) sharing one group.

    Triplet x realises the product pair embedded on difference sets
    S2^x - S1^x and S3^x - S2^x, read off on S3^x - S1^x.  The simultaneous
    TPP guarantees the 2^N products carried by one convolution do not mix.
    """

    group: AbelianGroup
    triplets: tuple[tuple[np.ndarray, np.ndarray, np.ndarray], ...]
    m: int = 0
    N: int = 0

    @property
    def count(self) -> int:
        return len(self.triplets)

    @property
    def block_size(self) -> int:
        return self.triplets[0][0].shape[0]


def _product_rows(factors: list[np.ndarray]) -> np.ndarray:
    """Cartesian product of row sets, coordinates concatenated, lexicographic order."""
    rows = [np.asarray(f) for f in factors]
    counts = [f.shape[0] for f in rows]
    out = np.empty((int(np.prod(counts)), sum(f.shape[1] for f in rows)), dtype=np.int64)
    for i, combo in enumerate(itertools.product(*[range(c) for c in counts])):
        out[i] = np.concatenate([rows[j][combo[j]] for j in range(len(rows))])
    return out


@lru_cache(maxsize=None)
def cksu_stpp(m: int, N: int) -> StppFamily:
    """STPP family of 2^N triplets of size (m-1)^N in Z_m^{3N}.

    The base case (N=1) uses the three punctured axes H_i \\ {0} of Z_m^3 in
    the two cyclic role assignments; higher N is the coordinate-wise product
    over the bits of the family index (most significant bit first).
    """
    if m < 3 or N < 1:
        raise ValueError("need m >= 3 and N >= 1")
    x = np.arange(1, m, dtype=np.int64)
    z = np.zeros_like(x)
    H1 = np.stack([x, z, z], axis=1)
    H2 = np.stack([z, x, z], axis=1)
    H3 = np.stack([z, z, x], axis=1)
    base = {0: (H1, H2, H3), 1: (H2, H3, H1)}
    triplets = []
    for fam in range(2**N):
        bits = [(fam >> (N - 1 - j)) & 1 for j in range(N)]
        triplets.append(tuple(
            _product_rows([base[b][i] for b in bits]) for i in range(3)
        ))
    group = AbelianGroup((m,) * (3 * N))
    return StppFamily(group, tuple(triplets), m=m, N=N)


def embed_stpp_batch(family: StppFamily, As, Bs) -> tuple[Signal, Signal]:
    """Embed one q x q matrix pair per family member on the difference sets."""
    if len(As) != family.count or len(Bs) != family.count:
        raise ValueError("need one matrix pair per family member")
    q = family.block_size
    a = Signal.zeros(family.group)
    b = Signal.zeros(family.group)
    for (S1, S2, S3), A, B in zip(family.triplets, As, Bs):
        A = np.asarray(A)
        B = np.asarray(B)
        if A.shape != (q, q) or B.shape != (q, q):
            raise ValueError(f"blocks must be {q} x {q}")
        a.values[_positions(family.group, S1, S2, negate_x=True)] = A
        b.values[_positions(family.group, S2, S3, negate_x=True)] = B
    return a, b


def decode_stpp_batch(c, family: StppFamily) -> list[np.ndarray]:
    """Read one q x q product per family member off the read sets S3^x - S1^x."""
    vals = c.values if isinstance(c, Signal) else np.asarray(c).reshape(-1)
    return [vals[_positions(family.group, S1, S3, negate_x=True)]
            for (S1, S2, S3) in family.triplets]


# ---------------------------------------------------------------------------
# verification


def _solution_count(group: AbelianGroup, P: np.ndarray, Q: np.ndarray, R: np.ndarray,
                    chunk: int = 4096) -> int:
    """Number of index triples with P[a] + Q[b] + R[c] = 0 (rows are elements)."""
    d = group.ndim
    hist = np.bincount(group.index(group.reduce(-R).reshape(-1, d)), minlength=group.size)
    total = 0
    for lo in range(0, P.shape[0], chunk):
        block = P[lo:lo + chunk]
        codes = group.index(group.reduce(block[:, None, :] + Q[None, :, :]).reshape(-1, d))
        total += int(hist[codes].sum())
    return total


def _pair_differences(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """All rows x - y for x in X, y in Y."""
    return (X[:, None, :].astype(np.int64) - Y[None, :, :]).reshape(-1, X.shape[1])


def verify_tpp(t: IndexingTriplet) -> bool:
    """Exhaustively check the triple product property.

    Counts all sextuple solutions of s1-s2+t1-t2+u1-u2 = 0; the TPP holds iff
    only the |S|*|T|*|U| trivial solutions exist.
    """
    ns, nt, nu = t.sizes
    count = _solution_count(
        t.group,
        _pair_differences(t.S, t.S),
        _pair_differences(t.T, t.T),
        _pair_differences(t.U, t.U),
    )
    return count == ns * nt * nu


def verify_stpp(family: StppFamily) -> bool:
    """Exhaustively check the simultaneous TPP (each triplet TPP + no mixing).

    For family indices (i, j, k) the equation s_i - s'_j + t_j - t'_k + u_k - u'_i = 0
    with s from S1^i, s' from S1^j, t from S2^j, t' from S2^k, u from S3^k,
    u' from S3^i must have only the trivial solutions, and those only when
    i == j == k.
    """
    q = family.block_size
    for i, j, k in itertools.product(range(family.count), repeat=3):
        S1i, _, S3i = family.triplets[i]
        S1j, S2j, _ = family.triplets[j]
        _, S2k, S3k = family.triplets[k]
        count = _solution_count(
            family.group,
            _pair_differences(S1i, S1j),
            _pair_differences(S2j, S2k),
            _pair_differences(S3k, S3i),
        )
        expected = q**3 if i == j == k else 0
        if count != expected:
            return False
    return True
