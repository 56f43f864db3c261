"""Zero-phase filters used as the per-stage FILTER of a decomposition.

All filters here are circular: the frequency-domain ones multiply the DFT by
a real, nonnegative, even response; the moving average is a centered
circular convolution.  Each is therefore linear and commutes with circular
shifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .signal import as_signal
from .transform import dft_forward, dft_inverse

__all__ = [
    "FILTER_KINDS",
    "FilterSpec",
    "apply_zero_phase",
    "bin_offsets",
    "gaussian_response",
    "ideal_response",
    "moving_average",
]

FILTER_KINDS = ("gaussian_lowpass", "ideal_lowpass", "moving_average")

#: imaginary residue allowed after a zero-phase filter, relative to signal peak
IMAG_TOL = 1e-10


def _as_shape(shape) -> tuple[int, ...]:
    shape = (int(shape),) if np.isscalar(shape) else tuple(int(s) for s in shape)
    if len(shape) not in (1, 2) or any(s < 1 for s in shape):
        raise ValueError(f"invalid signal shape {shape}")
    return shape


def bin_offsets(n: int) -> NDArray:
    """Wrap-around distance of each DFT bin from DC: ``min(k, n - k)``."""
    k = np.arange(n)
    return np.minimum(k, n - k)


def _mirror_index(shape: tuple[int, ...]):
    return np.ix_(*[(-np.arange(s)) % s for s in shape])


@lru_cache(maxsize=128)
def _gaussian_cached(shape: tuple[int, ...], sigma: float) -> NDArray:
    grids = np.meshgrid(*[bin_offsets(s).astype(float) for s in shape], indexing="ij")
    d2 = sum(g * g for g in grids)
    h = np.exp(-d2 / (2.0 * sigma * sigma))
    h.setflags(write=False)
    return h


def gaussian_response(shape, sigma: float) -> NDArray:
    """Gaussian low-pass ``exp(-D^2 / (2 sigma^2))`` over wrapped bin distance D.

    ``sigma`` is in DFT-bin units.  In 2D, D is the Euclidean distance of the
    wrapped (row, column) bin offsets.
    """
    if not (np.isfinite(sigma) and sigma > 0):
        raise ValueError(f"gaussian sigma must be positive, got {sigma}")
    return _gaussian_cached(_as_shape(shape), float(sigma))


@lru_cache(maxsize=128)
def _ideal_cached(shape: tuple[int, ...], cutoff: float) -> NDArray:
    grids = np.meshgrid(*[bin_offsets(s) / s for s in shape], indexing="ij")
    f = grids[0] if len(grids) == 1 else np.maximum(*grids)
    # the Nyquist bin sits at exactly 0.5 and is kept when cutoff reaches it
    h = (f <= cutoff).astype(float)
    h.setflags(write=False)
    return h


def ideal_response(shape, cutoff: float) -> NDArray:
    """Brick-wall low-pass mask: 1 where ``|f| <= cutoff``, else 0.

    ``cutoff`` is a normalized frequency in [0, 0.5].  For 2D shapes the
    passband is the square ``max(|f_row|, |f_col|) <= cutoff``, which keeps
    ``cutoff = 0.5`` an all-pass in every dimension.
    """
    if not (0.0 <= cutoff <= 0.5):
        raise ValueError(f"ideal cutoff must lie in [0, 0.5], got {cutoff}")
    return _ideal_cached(_as_shape(shape), float(cutoff))


def apply_zero_phase(x: ArrayLike, response: ArrayLike) -> NDArray:
    """Multiply the spectrum of ``x`` by a real, nonnegative, even ``response``.

    For real ``x`` the result is real; an imaginary residue above
    ``IMAG_TOL`` times the signal peak means the response was not even and
    raises instead of being silently dropped.
    """
    x = as_signal(x)
    h = np.asarray(response)
    if h.shape != x.shape:
        raise ValueError(f"response shape {h.shape} does not match signal shape {x.shape}")
    if np.iscomplexobj(h):
        if np.any(h.imag != 0):
            raise ValueError("zero-phase response must be real")
        h = h.real
    h = h.astype(float)
    if not np.all(np.isfinite(h)):
        raise ValueError("response contains non-finite values")
    if np.any(h < 0):
        raise ValueError("zero-phase response must be nonnegative")
    scale = max(float(np.max(np.abs(h))), 1e-300)
    if np.max(np.abs(h - h[_mirror_index(h.shape)])) > 1e-12 * scale:
        raise ValueError("zero-phase response must be even: H[k] == H[-k]")
    y = dft_inverse(h * dft_forward(x))
    if np.iscomplexobj(x):
        return y
    peak = max(float(np.max(np.abs(x))), float(np.max(np.abs(y.real))), 1e-300)
    residue = float(np.max(np.abs(y.imag)))
    if residue > IMAG_TOL * peak:
        raise ValueError(f"imaginary residue {residue:.3e} after zero-phase filtering")
    return np.ascontiguousarray(y.real)


def moving_average(x: ArrayLike, w: int) -> NDArray:
    """Centered circular moving average with odd window ``w``.

    ``y[i] = mean(x[(i + j) % n] for j in -(w-1)/2 .. (w-1)/2)``.  A 2D
    signal is averaged separably along both axes with the same window.
    """
    x = as_signal(x)
    if int(w) != w or w < 1 or w % 2 == 0:
        raise ValueError(f"moving-average window must be a positive odd integer, got {w}")
    w = int(w)
    if w > min(x.shape):
        raise ValueError(f"window {w} exceeds signal length {min(x.shape)}")
    half = (w - 1) // 2
    y = x
    for axis in range(x.ndim):
        acc = np.zeros_like(y)
        for j in range(-half, half + 1):
            acc = acc + np.roll(y, -j, axis=axis)
        y = acc / w
    return y


@dataclass(frozen=True)
class FilterSpec:
    """A filter kind plus one parameter per decomposition stage.

    ``schedule`` holds sigma (bins) for ``gaussian_lowpass``, normalized
    cutoffs for ``ideal_lowpass`` and odd window lengths for
    ``moving_average``.  Ideal cutoffs must increase strictly so that the
    stages carve out nested, disjoint bands.
    """

    kind: str
    schedule: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "schedule", tuple(float(s) for s in self.schedule))
        if self.kind not in FILTER_KINDS:
            raise ValueError(f"unknown filter kind {self.kind!r}; expected one of {FILTER_KINDS}")
        if not self.schedule:
            raise ValueError("filter schedule must have at least one stage")
        s = self.schedule
        if self.kind == "gaussian_lowpass":
            if any(not (math.isfinite(v) and v > 0) for v in s):
                raise ValueError(f"gaussian sigmas must be positive: {s}")
        elif self.kind == "ideal_lowpass":
            if any(not 0.0 <= v <= 0.5 for v in s):
                raise ValueError(f"ideal cutoffs must lie in [0, 0.5]: {s}")
            if any(b <= a for a, b in zip(s, s[1:])):
                raise ValueError(f"ideal cutoffs must be strictly increasing: {s}")
        else:
            if any(v != int(v) or v < 1 or int(v) % 2 == 0 for v in s):
                raise ValueError(f"moving-average windows must be positive odd integers: {s}")

    @property
    def n_stages(self) -> int:
        return len(self.schedule)

    def apply(self, x: ArrayLike, stage: int) -> NDArray:
        """Filter ``x`` with the parameters of ``stage`` (0-based)."""
        x = as_signal(x)
        p = self.schedule[stage]
        if self.kind == "gaussian_lowpass":
            return apply_zero_phase(x, gaussian_response(x.shape, p))
        if self.kind == "ideal_lowpass":
            return apply_zero_phase(x, ideal_response(x.shape, p))
        return moving_average(x, int(p))

    def stage_filters(self) -> list[Callable[[NDArray], NDArray]]:
        return [lambda x, i=i: self.apply(x, i) for i in range(self.n_stages)]

    @classmethod
    def gaussian(cls, shape, n: int, sigma0: float | None = None) -> "FilterSpec":
        """Gaussian low-pass stages with sigma halving each stage.

        ``sigma0`` defaults to an eighth of the largest signal dimension.
        """
        if n < 1:
            raise ValueError("stage count must be >= 1")
        if sigma0 is None:
            sigma0 = max(_as_shape(shape)) / 8.0
        return cls("gaussian_lowpass", tuple(sigma0 / 2.0**i for i in range(n)))

    @classmethod
    def ideal(cls, cutoffs: Sequence[float]) -> "FilterSpec":
        return cls("ideal_lowpass", tuple(cutoffs))

    @classmethod
    def ideal_octaves(cls, n: int) -> "FilterSpec":
        """Nested cutoffs 0.5/2^n, ..., 0.5/4, 0.5/2."""
        if n < 1:
            raise ValueError("stage count must be >= 1")
        return cls.ideal(0.5 / 2.0 ** (n - i) for i in range(n))

    @classmethod
    def moving(cls, windows: Sequence[int]) -> "FilterSpec":
        return cls("moving_average", tuple(windows))

    @classmethod
    def moving_octaves(cls, n: int) -> "FilterSpec":
        """Windows 3, 5, 9, 17, ... (2^i + 1)."""
        if n < 1:
            raise ValueError("stage count must be >= 1")
        return cls.moving([2 ** (i + 1) + 1 for i in range(n)])

    def to_dict(self) -> dict:
        sched = [int(v) for v in self.schedule] if self.kind == "moving_average" else list(self.schedule)
        return {"kind": self.kind, "schedule": sched}
