"""Filter mode decomposition.

Three iterative filter/residue splits of a signal ``x`` into ``n + 1``
components that sum to ``x``:

``plain``
    ``y_i = F_i(x_i)``, ``x_{i+1} = x_i - y_i``.  Energy is generally not
    preserved unless the filters are brick-wall.
``linoep_residue_side``
    Each stage re-balances the split with a multiple of the residue so the
    kept component is orthogonal to everything that follows.
``linoep_filter_side``
    Same, re-balancing with a multiple of the filter output.

The two ``linoep`` variants produce linearly independent, non-orthogonal
components whose energies nevertheless add up to the input energy, since
each component is orthogonal to the sum of all later ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .filters import FilterSpec
from .signal import ORTHO_EPS, EnergyLedger, as_signal, energy, inner_product, norm

__all__ = [
    "ALGORITHMS",
    "DecompositionResult",
    "LinearDependenceError",
    "build_ledger",
    "decompose",
    "decompose_linoep_filter_side",
    "decompose_linoep_residue_side",
    "decompose_plain",
    "filter_side_step",
    "gram_matrix",
    "gram_schmidt",
    "residue_side_step",
]

ALGORITHMS = ("plain", "linoep_residue_side", "linoep_filter_side")

#: a stage vector this small relative to the stage input counts as zero
DEGENERATE_RTOL = 1e-12

StageFilter = Callable[[NDArray], NDArray]
Filters = Union[FilterSpec, Sequence[StageFilter]]


class LinearDependenceError(ValueError):
    """Raised by :func:`gram_schmidt` when a vector lies in the span of earlier ones."""

    def __init__(self, index: int, message: str):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class DecompositionResult:
    algorithm: str
    components: tuple[NDArray, ...]
    alphas: tuple[float, ...]
    ledger: EnergyLedger
    gram: NDArray
    stages: int
    warnings: tuple[str, ...] = field(default=())

    @property
    def reconstruction(self) -> NDArray:
        return np.sum(np.stack(self.components), axis=0)

    def telescoping_residuals(self) -> list[float]:
        """Normalized ``|<comp_i, sum of later comps>|`` for each non-final i."""
        out = []
        for i in range(len(self.components) - 1):
            tail = np.sum(np.stack(self.components[i + 1 :]), axis=0)
            out.append(_normalized_ip(self.components[i], tail))
        return out

    def max_pairwise_offdiagonal(self) -> float:
        """Largest normalized ``|<comp_i, comp_l>|`` over ``i != l``."""
        return _max_normalized_offdiag(self.gram)


def _normalized_ip(a: NDArray, b: NDArray) -> float:
    denom = norm(a) * norm(b)
    return abs(inner_product(a, b)) / denom if denom > 0 else 0.0


def _max_normalized_offdiag(gram: NDArray) -> float:
    d = np.sqrt(np.abs(np.diag(gram).real))
    worst = 0.0
    for i in range(gram.shape[0]):
        for j in range(gram.shape[0]):
            if i != j and d[i] > 0 and d[j] > 0:
                worst = max(worst, abs(gram[i, j]) / (d[i] * d[j]))
    return worst


def gram_matrix(components: Sequence[ArrayLike]) -> NDArray:
    """Full matrix of pairwise inner products ``G[i, j] = <comp_i, comp_j>``."""
    comps = [as_signal(c) for c in components]
    k = len(comps)
    g = np.zeros((k, k), dtype=complex)
    for i in range(k):
        for j in range(i, k):
            g[i, j] = inner_product(comps[i], comps[j])
            g[j, i] = np.conj(g[i, j])
    return g


def build_ledger(x: ArrayLike, components: Sequence[ArrayLike]) -> EnergyLedger:
    x = as_signal(x)
    if len(components) == 0:
        raise ValueError("no components to account for")
    comps = [as_signal(c) for c in components]
    for c in comps:
        if c.shape != x.shape:
            raise ValueError(f"component shape {c.shape} does not match input {x.shape}")
    return EnergyLedger.from_parts(energy(x), [energy(c) for c in comps])


def _stage_filters(filters: Filters, n: int | None) -> list[StageFilter]:
    if isinstance(filters, FilterSpec):
        fs = filters.stage_filters()
    else:
        fs = list(filters)
        if not all(callable(f) for f in fs):
            raise ValueError("filters must be a FilterSpec or a sequence of callables")
    if n is None:
        n = len(fs)
    if n < 1:
        raise ValueError(f"stage count must be >= 1, got {n}")
    if len(fs) != n:
        raise ValueError(f"filter schedule has {len(fs)} stages but n = {n}")
    return fs


def _run_filter(f: StageFilter, x: NDArray, stage: int) -> NDArray:
    y = np.asarray(f(x))
    if y.shape != x.shape:
        raise ValueError(f"stage {stage + 1} filter changed shape {x.shape} -> {y.shape}")
    if not np.all(np.isfinite(y)):
        raise ValueError(f"stage {stage + 1} filter produced non-finite samples")
    return y


def _finish(algorithm, x, components, alphas, stages, warnings) -> DecompositionResult:
    comps = tuple(as_signal(c, f"component {i + 1}") for i, c in enumerate(components))
    return DecompositionResult(
        algorithm=algorithm,
        components=comps,
        alphas=tuple(alphas),
        ledger=build_ledger(x, comps),
        gram=gram_matrix(comps),
        stages=stages,
        warnings=tuple(warnings),
    )


def _zero_input(algorithm: str, x: NDArray) -> DecompositionResult:
    return _finish(algorithm, x, [np.zeros_like(x)], [], 0, ["zero-energy input; nothing to decompose"])


def residue_side_step(y: ArrayLike, r: ArrayLike) -> tuple[float, NDArray, NDArray]:
    """One re-balanced split keeping the filter output side.

    Returns ``(alpha, c, c_next)`` with ``alpha = Re<y, r> / <r, r>``,
    ``c = y - alpha r`` and ``c_next = (1 + alpha) r``, so that
    ``c + c_next == y + r`` and ``c`` is orthogonal to ``c_next``.
    """
    y = as_signal(y, "y")
    r = as_signal(r, "r")
    rr = energy(r)
    if rr == 0:
        raise ValueError("residue has zero energy; alpha undefined")
    alpha = inner_product(y, r).real / rr
    return alpha, y - alpha * r, (1.0 + alpha) * r


def filter_side_step(y: ArrayLike, r: ArrayLike) -> tuple[float, NDArray, NDArray]:
    """One re-balanced split scaling the filter output.

    Returns ``(alpha, v, v_next)`` with ``alpha = Re<y, r> / <y, y>``,
    ``v = (1 + alpha) y`` and ``v_next = r - alpha y``.
    """
    y = as_signal(y, "y")
    r = as_signal(r, "r")
    yy = energy(y)
    if yy == 0:
        raise ValueError("filter output has zero energy; alpha undefined")
    alpha = inner_product(y, r).real / yy
    return alpha, (1.0 + alpha) * y, r - alpha * y


def decompose_plain(x: ArrayLike, filters: Filters, n: int | None = None) -> DecompositionResult:
    """Split ``x`` into ``n`` filter outputs and the final residue."""
    x = as_signal(x)
    fs = _stage_filters(filters, n)
    if energy(x) == 0:
        return _zero_input("plain", x)
    comps = []
    xi = x
    for i, f in enumerate(fs):
        y = _run_filter(f, xi, i)
        comps.append(y)
        xi = xi - y
    comps.append(xi)
    return _finish("plain", x, comps, [], len(fs), [])


def decompose_linoep_residue_side(x: ArrayLike, filters: Filters, n: int | None = None) -> DecompositionResult:
    """Energy-preserving split, re-balancing each stage along the residue.

    A stage whose residue vanishes ends the decomposition early: the stage
    input becomes the final component and ``stages`` reports how many
    splits actually happened.
    """
    x = as_signal(x)
    fs = _stage_filters(filters, n)
    if energy(x) == 0:
        return _zero_input("linoep_residue_side", x)
    comps, alphas, warnings = [], [], []
    xi = x
    for i, f in enumerate(fs):
        y = _run_filter(f, xi, i)
        r = xi - y
        if norm(r) <= DEGENERATE_RTOL * norm(xi):
            warnings.append(f"stage {i + 1}: residue vanished; stopped after {i} of {len(fs)} stages")
            comps.append(xi)
            return _finish("linoep_residue_side", x, comps, alphas, i, warnings)
        alpha, c, xi = residue_side_step(y, r)
        alphas.append(alpha)
        comps.append(c)
    comps.append(xi)
    return _finish("linoep_residue_side", x, comps, alphas, len(fs), warnings)


def decompose_linoep_filter_side(x: ArrayLike, filters: Filters, n: int | None = None) -> DecompositionResult:
    """Energy-preserving split, re-balancing each stage along the filter output.

    A stage whose filter output vanishes emits a zero component with
    ``alpha = 0`` and hands the whole stage input to the next stage.
    """
    x = as_signal(x)
    fs = _stage_filters(filters, n)
    if energy(x) == 0:
        return _zero_input("linoep_filter_side", x)
    comps, alphas, warnings = [], [], []
    xi = x
    for i, f in enumerate(fs):
        y = _run_filter(f, xi, i)
        if norm(y) <= DEGENERATE_RTOL * norm(xi):
            warnings.append(f"stage {i + 1}: filter output vanished; emitted a zero component")
            alphas.append(0.0)
            comps.append(np.zeros_like(xi))
            continue
        alpha, v, xi = filter_side_step(y, xi - y)
        alphas.append(alpha)
        comps.append(v)
    comps.append(xi)
    return _finish("linoep_filter_side", x, comps, alphas, len(fs), warnings)


_DISPATCH = {
    "plain": decompose_plain,
    "linoep_residue_side": decompose_linoep_residue_side,
    "linoep_filter_side": decompose_linoep_filter_side,
}


def decompose(x: ArrayLike, filters: Filters, n: int | None = None, algorithm: str = "plain") -> DecompositionResult:
    try:
        fn = _DISPATCH[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}") from None
    return fn(x, filters, n)


def gram_schmidt(components: Sequence[ArrayLike], eps: float = 1e-12) -> list[NDArray]:
    """Orthogonalize without normalizing: ``u_k = s_k - sum_j proj_{u_j}(s_k)``.

    Each vector is projected twice against the earlier ones (classical
    Gram-Schmidt with one re-orthogonalization pass), which keeps the output
    orthogonal to working precision even for nearly dependent inputs.

    Raises
    ------
    LinearDependenceError
        If some ``||u_k|| <= eps * ||s_k||``; ``index`` is 1-based.
    """
    vecs = [as_signal(c, f"component {i + 1}") for i, c in enumerate(components)]
    if not vecs:
        return []
    shape = vecs[0].shape
    out: list[NDArray] = []
    for k, s in enumerate(vecs, start=1):
        if s.shape != shape:
            raise ValueError(f"component {k} has shape {s.shape}, expected {shape}")
        s_norm = norm(s)
        u = s
        for _ in range(2):
            coeffs = [inner_product(u, q) / energy(q) for q in out]
            for c, q in zip(coeffs, out):
                if not (np.iscomplexobj(u) or np.iscomplexobj(q)):
                    c = c.real
                u = u - c * q
        if s_norm == 0 or norm(u) <= eps * s_norm:
            raise LinearDependenceError(k, f"component {k} is linearly dependent on components 1..{k - 1}")
        out.append(u)
    return out
