"""Discrete Fourier transforms for 1D and 2D signals of any size.

Forward transforms are unnormalized; inverse transforms carry the ``1/N``
(``1/(M*N)`` in 2D) factor, so ``energy(x) == energy(dft_forward(x)) / N``.

Lengths that are powers of two go through an iterative radix-2 transform,
all other lengths through a direct O(N^2) evaluation.  A 2D transform is a
row transform followed by a column transform.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .signal import as_signal

__all__ = ["dft_forward", "dft_inverse", "is_power_of_two"]


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@lru_cache(maxsize=64)
def _bit_reverse_permutation(n: int) -> NDArray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    rev.setflags(write=False)
    return rev


@lru_cache(maxsize=64)
def _dft_matrix(n: int, sign: int) -> NDArray:
    # reduce j*k mod n before scaling so the phase argument stays in [0, 2*pi)
    jk = np.outer(np.arange(n), np.arange(n)) % n
    w = np.exp(sign * 2j * np.pi * jk / n)
    w.setflags(write=False)
    return w


def _radix2(a: NDArray, sign: int) -> NDArray:
    """Iterative decimation-in-time FFT along the last axis."""
    n = a.shape[-1]
    lead = a.shape[:-1]
    x = a[..., _bit_reverse_permutation(n)]
    m = 2
    while m <= n:
        half = m // 2
        tw = np.exp(sign * 2j * np.pi * np.arange(half) / m)
        x = x.reshape(lead + (n // m, m))
        even = x[..., :half]
        odd = x[..., half:] * tw
        x = np.concatenate((even + odd, even - odd), axis=-1)
        m *= 2
    return x.reshape(lead + (n,))


def _transform_last_axis(a: NDArray, sign: int) -> NDArray:
    n = a.shape[-1]
    if n == 1:
        return a.astype(np.complex128, copy=True)
    if is_power_of_two(n):
        return _radix2(a.astype(np.complex128), sign)
    return a.astype(np.complex128) @ _dft_matrix(n, sign).T


def _transform(a: NDArray, sign: int) -> NDArray:
    out = _transform_last_axis(a, sign)
    if out.ndim == 2:
        out = _transform_last_axis(out.T, sign).T
    return np.ascontiguousarray(out)


def dft_forward(x: ArrayLike) -> NDArray:
    """Unnormalized DFT of a 1D or 2D signal."""
    return _transform(as_signal(x), -1)


def dft_inverse(spectrum: ArrayLike) -> NDArray:
    """Inverse of :func:`dft_forward`; always returns a complex array."""
    spec = as_signal(spectrum, "spectrum")
    return _transform(spec, +1) / spec.size
