"""Finite abelian groups, signals over them, and structured frequency sets.

A group Z_{m1} x ... x Z_{md} is described by its tuple of moduli.  Group
elements are length-d integer tuples (or arrays of such tuples, one row per
element).  Signals and spectra are flat complex arrays of length |G| in
row-major (C) order over the moduli.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np


class ContractError(Exception):
    """A numerical or structural contract was violated."""


@dataclass(frozen=True)
class AbelianGroup:
    """Finite abelian group given as a product of cyclic factors."""

    moduli: tuple[int, ...]

    def __post_init__(self):
        if len(self.moduli) == 0:
            raise ValueError("group needs at least one cyclic factor")
        if any(int(m) < 1 for m in self.moduli):
            raise ValueError("moduli must be positive")
        object.__setattr__(self, "moduli", tuple(int(m) for m in self.moduli))

    @property
    def ndim(self) -> int:
        return len(self.moduli)

    @property
    def size(self) -> int:
        out = 1
        for m in self.moduli:
            out *= m
        return out

    @property
    def identity(self) -> tuple[int, ...]:
        return (0,) * self.ndim

    def elements(self):
        """Iterate over all group elements in row-major order."""
        return itertools.product(*(range(m) for m in self.moduli))

    def reduce(self, coords):
        """Reduce integer coordinates modulo the per-axis moduli."""
        c = np.asarray(coords, dtype=np.int64)
        return np.mod(c, np.asarray(self.moduli, dtype=np.int64))

    def add(self, g, h):
        return self.reduce(np.asarray(g, dtype=np.int64) + np.asarray(h, dtype=np.int64))

    def neg(self, g):
        return self.reduce(-np.asarray(g, dtype=np.int64))

    def index(self, coords):
        """Flat row-major index of an element (vectorised over leading axes)."""
        c = self.reduce(coords)
        if c.ndim == 1:
            return int(np.ravel_multi_index(tuple(c), self.moduli))
        return np.ravel_multi_index(tuple(c.T), self.moduli)

    def coords(self, flat):
        """Inverse of :meth:`index`."""
        flat = np.asarray(flat)
        unraveled = np.unravel_index(flat, self.moduli)
        if flat.ndim == 0:
            return tuple(int(x) for x in unraveled)
        return np.stack(unraveled, axis=-1).astype(np.int64)


def cyclic(order: int) -> AbelianGroup:
    return AbelianGroup((order,))


@dataclass
class Signal:
    """Complex-valued function on an abelian group (time/space side)."""

    group: AbelianGroup
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128).reshape(-1)
        if self.values.size != self.group.size:
            raise ValueError("value array does not match group size")

    @classmethod
    def zeros(cls, group: AbelianGroup) -> "Signal":
        return cls(group, np.zeros(group.size, dtype=np.complex128))

    @classmethod
    def delta(cls, group: AbelianGroup, at) -> "Signal":
        s = cls.zeros(group)
        s.values[group.index(np.asarray(at))] = 1.0
        return s

    def grid(self) -> np.ndarray:
        """Values reshaped onto the moduli grid."""
        return self.values.reshape(self.group.moduli)

    def support(self) -> np.ndarray:
        """Flat indices of nonzero entries."""
        return np.nonzero(self.values)[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def __add__(self, other: "Signal") -> "Signal":
        if other.group != self.group:
            raise ValueError("group mismatch")
        return Signal(self.group, self.values + other.values)


@dataclass
class Spectrum:
    """Complex-valued function on the (self-dual) frequency side."""

    group: AbelianGroup
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128).reshape(-1)
        if self.values.size != self.group.size:
            raise ValueError("value array does not match group size")

    def grid(self) -> np.ndarray:
        return self.values.reshape(self.group.moduli)

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


# ---------------------------------------------------------------------------
# frequency sets


class FrequencySet:
    """A subset K of the frequency grid of a group.

    Concrete subclasses expose membership, cardinality and the flat indices of
    their members (in a fixed deterministic order).
    """

    group: AbelianGroup

    def indices(self) -> np.ndarray:
        raise NotImplementedError

    def mask(self) -> np.ndarray:
        """Boolean mask over the full frequency grid, flat order."""
        m = np.zeros(self.group.size, dtype=bool)
        m[self.indices()] = True
        return m

    def __len__(self) -> int:
        return int(self.indices().size)

    def __contains__(self, xi) -> bool:
        return bool(self.mask()[self.group.index(np.asarray(xi))])


@dataclass
class ExplicitFrequencySet(FrequencySet):
    """Frequency set given by an explicit list of flat indices."""

    group: AbelianGroup
    flat: np.ndarray

    def __post_init__(self):
        self.flat = np.unique(np.asarray(self.flat, dtype=np.int64))
        if self.flat.size and (self.flat[0] < 0 or self.flat[-1] >= self.group.size):
            raise ValueError("index out of range")

    def indices(self) -> np.ndarray:
        return self.flat


@dataclass
class SlabUnion(FrequencySet):
    """Union of the three axis slabs {xi : xi_i < r} in Z_m^3."""

    m: int
    r: int
    group: AbelianGroup = field(init=False)

    def __post_init__(self):
        if not (0 <= self.r <= self.m):
            raise ValueError("slab width must lie in [0, m]")
        self.group = AbelianGroup((self.m, self.m, self.m))

    def mask(self) -> np.ndarray:
        ax = np.arange(self.m) < self.r
        g = ax[:, None, None] | ax[None, :, None] | ax[None, None, :]
        return g.reshape(-1)

    def indices(self) -> np.ndarray:
        return np.nonzero(self.mask())[0]

    def __len__(self) -> int:
        return self.m**3 - (self.m - self.r) ** 3

    def __contains__(self, xi) -> bool:
        x = np.mod(np.asarray(xi, dtype=np.int64), self.m)
        return bool(np.any(x < self.r))


@dataclass
class IntervalUnion(FrequencySet):
    """Union of cyclic intervals and arithmetic progressions in Z_D."""

    order: int
    parts: list[tuple[int, int, int]]  # (start, step, count)
    group: AbelianGroup = field(init=False)

    def __post_init__(self):
        self.group = cyclic(self.order)

    def indices(self) -> np.ndarray:
        chunks = [
            (start + step * np.arange(count, dtype=np.int64)) % self.order
            for start, step, count in self.parts
        ]
        if not chunks:
            return np.empty(0, dtype=np.int64)
        return np.unique(np.concatenate(chunks))
