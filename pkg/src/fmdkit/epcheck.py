"""Energy-preserving sequence checks and linearity / shift-invariance probes.

A sequence ``x_1..x_n`` preserves energy when every ``x_k`` is orthogonal to
``x_{k+1} + ... + x_n``; then ``||sum x_k||^2 == sum ||x_k||^2`` whether or
not the vectors are pairwise orthogonal or even independent.

The probes treat a decomposition as a black box mapping a signal to an
ordered component list and compare both sides of the superposition and
shift identities directly.  Shifts are circular, matching the circular
filters in :mod:`fmdkit.filters`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .fmd import ALGORITHMS, Filters, decompose
from .filters import FilterSpec
from .signal import ORTHO_EPS, as_signal, circular_shift, energy, inner_product, norm

__all__ = [
    "CLASSIFICATIONS",
    "FMDSystem",
    "ProbeReport",
    "SequenceVerdict",
    "classify_system",
    "probe_additivity",
    "probe_homogeneity",
    "probe_time_invariance",
    "verify_sequence",
]

CLASSIFICATIONS = ("orthogonal", "linoep", "dependent_energy_preserving", "not_energy_preserving")

#: smallest/largest eigenvalue of the normalized Gram matrix below this is "dependent"
INDEPENDENCE_RTOL = 1e-10
PROBE_TOL = 1e-9

System = Callable[[NDArray], Sequence[NDArray]]


@dataclass(frozen=True)
class SequenceVerdict:
    is_energy_preserving: bool
    per_index_residuals: tuple[float, ...]
    classification: str
    energy_identity_gap: float
    max_pairwise: float
    min_gram_eig_ratio: float

    def to_dict(self) -> dict:
        return {
            "is_energy_preserving": self.is_energy_preserving,
            "classification": self.classification,
            "max_telescoping_residual": max(self.per_index_residuals, default=0.0),
            "per_index_residuals": list(self.per_index_residuals),
            "max_pairwise_offdiagonal": self.max_pairwise,
            "energy_identity_gap": self.energy_identity_gap,
            "min_gram_eig_ratio": self.min_gram_eig_ratio,
        }


def _normalized_abs_ip(a: NDArray, b: NDArray) -> float:
    denom = norm(a) * norm(b)
    return abs(inner_product(a, b)) / denom if denom > 0 else 0.0


def _independence_ratio(xs: Sequence[NDArray]) -> float:
    # scale-free: vectors are normalized first, so a tiny component is not
    # mistaken for a dependent one
    norms = [norm(x) for x in xs]
    if any(n == 0 for n in norms):
        return 0.0
    unit = [x / n for x, n in zip(xs, norms)]
    g = np.array([[inner_product(a, b) for b in unit] for a in unit])
    eig = np.linalg.eigvalsh(g)
    return float(max(eig[0], 0.0) / eig[-1])


def verify_sequence(xs: Sequence[ArrayLike], eps: float = ORTHO_EPS) -> SequenceVerdict:
    """Check the telescoping orthogonality condition and classify the sequence.

    ``per_index_residuals[k]`` is ``|<x_k, sum_{l>k} x_l>|`` divided by the
    product of the two norms (0 when either is zero).
    """
    if len(xs) == 0:
        raise ValueError("verify_sequence needs at least one vector")
    vecs = [as_signal(x, f"x_{i + 1}") for i, x in enumerate(xs)]
    shape = vecs[0].shape
    for i, v in enumerate(vecs, start=1):
        if v.shape != shape:
            raise ValueError(f"x_{i} has shape {v.shape}, expected {shape}")

    residuals = []
    tail = np.zeros_like(vecs[-1], dtype=np.result_type(*vecs))
    tails = []
    for v in reversed(vecs[1:]):
        tail = tail + v
        tails.append(tail)
    tails.reverse()
    for v, t in zip(vecs[:-1], tails):
        residuals.append(_normalized_abs_ip(v, t))
    preserving = all(r <= eps for r in residuals)

    max_pair = 0.0
    for i in range(len(vecs)):
        for j in range(i + 1, len(vecs)):
            max_pair = max(max_pair, _normalized_abs_ip(vecs[i], vecs[j]))
    ratio = _independence_ratio(vecs)

    total = energy(np.sum(np.stack(vecs), axis=0))
    parts = math.fsum(energy(v) for v in vecs)
    if total > 0:
        gap = abs(total - parts) / total
    else:
        gap = 0.0 if parts == 0 else math.inf

    if not preserving:
        cls = "not_energy_preserving"
    elif max_pair <= eps:
        cls = "orthogonal"
    elif ratio > INDEPENDENCE_RTOL:
        cls = "linoep"
    else:
        cls = "dependent_energy_preserving"
    return SequenceVerdict(preserving, tuple(residuals), cls, gap, max_pair, ratio)


class FMDSystem:
    """A decomposition packaged as a system for the probes.

    Early-terminated or zero-input decompositions are padded with zero
    components to the full ``n + 1`` so that outputs of different inputs
    line up component by component.
    """

    def __init__(self, algorithm: str, filters: Filters, n: int | None = None, name: str | None = None):
        if algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algorithm!r}")
        self.algorithm = algorithm
        self.filters = filters
        self.n = filters.n_stages if isinstance(filters, FilterSpec) and n is None else n
        self.name = name or algorithm

    def __call__(self, x: NDArray) -> list[NDArray]:
        res = decompose(x, self.filters, self.n, self.algorithm)
        comps = list(res.components)
        n_out = (self.n if self.n is not None else len(comps) - 1) + 1
        while len(comps) < n_out:
            comps.append(np.zeros_like(comps[0]))
        return comps


@dataclass(frozen=True)
class ProbeReport:
    property: str
    system_name: str
    max_violation: float
    tolerance: float
    passed: bool
    witness: dict[str, Any] = field(default_factory=dict)
    notes: str = ""

    def to_dict(self) -> dict:
        """JSON-ready view; witness arrays are summarized by shape and norm."""
        wit = {}
        for k, v in self.witness.items():
            if isinstance(v, np.ndarray):
                wit[k] = {"shape": list(v.shape), "norm": norm(v)}
            elif isinstance(v, (list, tuple)) and v and isinstance(v[0], np.ndarray):
                wit[k] = [{"shape": list(a.shape), "norm": norm(a)} for a in v]
            else:
                wit[k] = v
        out = {
            "property": self.property,
            "system_name": self.system_name,
            "max_violation": self.max_violation,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "witness": wit,
        }
        if self.notes:
            out["notes"] = self.notes
        return out


def _name(system) -> str:
    return getattr(system, "name", None) or getattr(system, "__name__", None) or type(system).__name__


def _evaluate(system: System, x: NDArray, label: str) -> list[NDArray]:
    try:
        out = [np.asarray(c) for c in system(x)]
    except Exception as exc:
        raise RuntimeError(f"system {_name(system)!r} failed on {label}: {exc}") from exc
    if not out:
        raise RuntimeError(f"system {_name(system)!r} returned no components for {label}")
    return out


def _compare(lhs: list[NDArray], rhs: list[NDArray], scale: float) -> tuple[float, int | None]:
    """Largest ``||lhs_i - rhs_i|| / scale`` and its 1-based index."""
    if len(lhs) != len(rhs):
        return 1.0, None
    worst, where = 0.0, 1
    for i, (a, b) in enumerate(zip(lhs, rhs), start=1):
        v = norm(a - b) / scale
        if v > worst:
            worst, where = v, i
    return worst, where


def _report(prop, system, violation, where, tolerance, witness, notes="") -> ProbeReport:
    witness = dict(witness)
    witness["component"] = where
    if where is None:
        notes = (notes + "; " if notes else "") + "component counts differ"
    return ProbeReport(prop, _name(system), violation, tolerance, violation <= tolerance, witness, notes)


def probe_additivity(system: System, x1: ArrayLike, x2: ArrayLike, *more: ArrayLike,
                     tolerance: float = PROBE_TOL) -> ProbeReport:
    """Compare ``S(x1 + x2 + ...)`` with ``S(x1) + S(x2) + ...`` componentwise.

    The violation is normalized by ``||x1 + x2 + ...||``.
    """
    xs = [as_signal(x, f"x{i + 1}") for i, x in enumerate((x1, x2) + more)]
    total = np.sum(np.stack(xs), axis=0)
    lhs = _evaluate(system, total, "sum of inputs")
    parts = [_evaluate(system, x, f"input {i + 1}") for i, x in enumerate(xs)]
    if any(len(p) != len(lhs) for p in parts):
        return _report("additivity", system, 1.0, None, tolerance, {"inputs": xs})
    rhs = [np.sum(np.stack(cs), axis=0) for cs in zip(*parts)]
    scale = norm(total) or math.fsum(norm(x) for x in xs) or 1.0
    violation, where = _compare(lhs, rhs, scale)
    return _report("additivity", system, violation, where, tolerance, {"inputs": xs})


def probe_homogeneity(system: System, x: ArrayLike, a: float = 2.0,
                      tolerance: float = PROBE_TOL) -> ProbeReport:
    """Compare ``S(a x)`` with ``a S(x)``, normalized by ``|a| ||x||``."""
    if not math.isfinite(a):
        raise ValueError(f"scale factor must be finite, got {a}")
    x = as_signal(x)
    lhs = _evaluate(system, a * x, f"{a} * input")
    rhs = [a * c for c in _evaluate(system, x, "input")]
    scale = (abs(a) * norm(x)) or norm(x) or 1.0
    violation, where = _compare(lhs, rhs, scale)
    return _report("homogeneity", system, violation, where, tolerance, {"inputs": [x], "a": a})


def probe_time_invariance(system: System, x: ArrayLike, tau: int = 17,
                          tolerance: float = PROBE_TOL) -> ProbeReport:
    """Compare ``S(shift(x))`` with ``shift(S(x))`` for a circular delay ``tau``."""
    x = as_signal(x)
    if x.ndim != 1:
        raise ValueError("time-invariance probe expects a 1D signal")
    tau = int(tau) % x.shape[0]
    lhs = _evaluate(system, circular_shift(x, tau), f"input delayed by {tau}")
    rhs = [circular_shift(c, tau) for c in _evaluate(system, x, "input")]
    violation, where = _compare(lhs, rhs, norm(x) or 1.0)
    return _report("time_invariance", system, violation, where, tolerance,
                   {"inputs": [x], "tau": tau, "shift": "circular"})


def classify_system(system: System, x1: ArrayLike, x2: ArrayLike, a: float = 2.0, tau: int = 17,
                    tolerance: float = PROBE_TOL) -> dict[str, Any]:
    """Run all three probes and label the system LTI / NTI / LTV / NTV."""
    add = probe_additivity(system, x1, x2, tolerance=tolerance)
    hom = probe_homogeneity(system, np.asarray(x1) + np.asarray(x2), a, tolerance=tolerance)
    shift = probe_time_invariance(system, np.asarray(x1) + np.asarray(x2), tau, tolerance=tolerance)
    linear = add.passed and hom.passed
    label = ("L" if linear else "N") + ("TI" if shift.passed else "TV")
    return {"label": label, "additivity": add, "homogeneity": hom, "time_invariance": shift}
