"""Deterministic test signals.

All random fixtures draw from ``numpy.random.default_rng(seed)`` (PCG64).
"""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import NDArray

__all__ = ["gaussian_bisecting_bins", "multitone", "random_image", "random_signal", "tone", "two_tone"]


def tone(n: int, cycles: float, amplitude: float = 1.0, phase: float = 0.0) -> NDArray:
    """``amplitude * sin(2 pi cycles t + phase)`` sampled at ``t = i / n``, ``i < n``."""
    t = np.arange(n) / n
    return amplitude * np.sin(2 * np.pi * cycles * t + phase)


def two_tone(n: int = 1024, k1: float = 5, k2: float = 50) -> tuple[NDArray, NDArray]:
    """The two tones ``sin(2 pi k1 t)`` and ``sin(2 pi k2 t)`` on ``[0, 1)``."""
    return tone(n, k1), tone(n, k2)


def multitone(n: int = 1024, count: int = 20, f0: float = 1.0) -> list[NDArray]:
    """Tones ``(count + 1 - l) * sin(2 pi l f0 t)`` for ``l = 1..count``."""
    return [tone(n, l * f0, amplitude=count + 1 - l) for l in range(1, count + 1)]


def random_signal(n: int = 1024, seed: int = 0) -> NDArray:
    return np.random.default_rng(seed).standard_normal(n)


def random_image(shape=(64, 64), seed: int = 0) -> NDArray:
    """Integer pixels uniform on 0..255, as float64."""
    return np.random.default_rng(seed).integers(0, 256, size=shape).astype(float)


def gaussian_bisecting_bins(sigmas, stages=(0, 1)) -> list[int]:
    """Bins where the Gaussian of each listed stage has gain closest to 1/2."""
    return [int(round(sigmas[i] * math.sqrt(2 * math.log(2)))) for i in stages]
