"""Unitary Fourier transforms and convolution on finite abelian groups.

Conventions.  For G = Z_{m1} x ... x Z_{md} with |G| = M the forward transform
is

    fhat(xi) = M^{-1/2} * sum_g f(g) * exp(-2*pi*i * sum_a g_a xi_a / m_a)

so that the transform is unitary (Parseval holds with constant 1) and the
convolution theorem reads (a*b)^ = sqrt(M) * ahat . bhat.  This is numpy's
fftn up to the M^{-1/2} scale.
"""

from __future__ import annotations

import numpy as np

from .groups import AbelianGroup, ContractError, ExplicitFrequencySet, FrequencySet, Signal, Spectrum

# imaginary residue threshold, relative to the max output magnitude
_REAL_TOL = 1e-8


def fft(signal: Signal) -> Spectrum:
    """Unitary forward transform of a signal."""
    g = signal.group
    vals = np.fft.fftn(signal.grid()) / np.sqrt(g.size)
    return Spectrum(g, vals.reshape(-1))


def ifft(spectrum: Spectrum) -> Signal:
    """Unitary inverse transform of a spectrum."""
    g = spectrum.group
    vals = np.fft.ifftn(spectrum.grid()) * np.sqrt(g.size)
    return Signal(g, vals.reshape(-1))


def realify(values: np.ndarray, where: str = "result") -> np.ndarray:
    """Drop a negligible imaginary part, or fail loudly if it is not negligible."""
    values = np.asarray(values)
    if not np.iscomplexobj(values):
        return values
    scale = float(np.max(np.abs(values))) or 1.0
    resid = float(np.max(np.abs(values.imag)))
    if resid > _REAL_TOL * scale:
        raise ContractError(
            f"{where}: imaginary residue {resid:.3e} exceeds {_REAL_TOL:.0e} * {scale:.3e}"
        )
    return values.real.copy()


def convolve(a: Signal, b: Signal) -> Signal:
    """Cyclic (group) convolution of two signals via the convolution theorem."""
    if a.group != b.group:
        raise ValueError("group mismatch")
    g = a.group
    prod = np.fft.fftn(a.grid()) * np.fft.fftn(b.grid())
    vals = np.fft.ifftn(prod).reshape(-1)
    out = Signal(g, vals)
    if not a.values.imag.any() and not b.values.imag.any():
        # real inputs give a real convolution; scrub FFT round-off
        out.values = realify(out.values, "convolve").astype(np.complex128)
    return out


def _phase_matrix(group: AbelianGroup, freq_flat: np.ndarray, point_flat: np.ndarray,
                  sign: int) -> np.ndarray:
    """exp(sign * 2*pi*i * <xi, x>) for all (xi, x) pairs, shape (|freq|, |points|)."""
    fc = group.coords(freq_flat).reshape(-1, group.ndim).astype(np.float64)
    pc = group.coords(point_flat).reshape(-1, group.ndim).astype(np.float64)
    mod = np.asarray(group.moduli, dtype=np.float64)
    angle = (fc / mod) @ pc.T
    return np.exp(sign * 2j * np.pi * angle)


def partial_fft_direct(signal: Signal, freqs: FrequencySet, chunk: int = 1 << 22):
    """Forward transform evaluated only on a frequency set, by direct summation.

    Cost is O(|K| * |supp(signal)|).  Returns a RestrictedSpectrum whose value
    array is aligned with ``freqs.indices()``.
    """
    g = signal.group
    if freqs.group != g:
        raise ValueError("group mismatch")
    supp = signal.support()
    idx = freqs.indices()
    out = np.zeros(idx.size, dtype=np.complex128)
    if supp.size:
        vals = signal.values[supp]
        step = max(1, chunk // max(1, supp.size))
        for lo in range(0, idx.size, step):
            block = idx[lo:lo + step]
            out[lo:lo + step] = _phase_matrix(g, block, supp, -1) @ vals
    out /= np.sqrt(g.size)
    return RestrictedSpectrum(g, freqs, out)


def partial_ifft_direct(rspec: "RestrictedSpectrum", points, chunk: int = 1 << 22) -> np.ndarray:
    """Inverse transform of a restricted spectrum, evaluated at chosen points.

    ``points`` is an array of group elements (rows of coordinates, or flat
    indices).  Cost is O(|K| * |points|).
    """
    g = rspec.group
    pts = np.asarray(points)
    if pts.ndim == 2 or (pts.ndim == 1 and g.ndim > 1):
        flat = g.index(pts)
    else:
        flat = np.asarray(pts, dtype=np.int64).reshape(-1)
    flat = np.atleast_1d(flat)
    idx = rspec.freqs.indices()
    out = np.zeros(flat.size, dtype=np.complex128)
    if idx.size:
        step = max(1, chunk // max(1, idx.size))
        for lo in range(0, flat.size, step):
            block = flat[lo:lo + step]
            out[lo:lo + step] = _phase_matrix(g, block, idx, +1) @ rspec.values
    return out / np.sqrt(g.size)


class RestrictedSpectrum:
    """Spectrum values known only on a frequency set K (zero elsewhere)."""

    def __init__(self, group: AbelianGroup, freqs: FrequencySet, values: np.ndarray):
        if freqs.group != group:
            raise ValueError("group mismatch")
        values = np.asarray(values, dtype=np.complex128).reshape(-1)
        if values.size != len(freqs):
            raise ValueError("values not aligned with frequency set")
        self.group = group
        self.freqs = freqs
        self.values = values

    @classmethod
    def from_dense(cls, spectrum: Spectrum, freqs: FrequencySet) -> "RestrictedSpectrum":
        """Restrict a dense spectrum; error if it has energy outside K."""
        mask = freqs.mask()
        off = spectrum.values[~mask]
        if off.size and np.max(np.abs(off)) > 1e-12 * max(1.0, float(np.max(np.abs(spectrum.values)))):
            raise ContractError("spectrum has support outside the frequency set")
        return cls(spectrum.group, freqs, spectrum.values[freqs.indices()])

    def dense(self) -> Spectrum:
        vals = np.zeros(self.group.size, dtype=np.complex128)
        vals[self.freqs.indices()] = self.values
        return Spectrum(self.group, vals)
