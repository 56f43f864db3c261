"""Acceptance criteria, one or more tests per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary lists
one PASS/FAIL line per criterion test.
"""

import math
import time

import numpy as np
import pytest

from fmdkit.epcheck import FMDSystem, probe_additivity, probe_homogeneity, probe_time_invariance
from fmdkit.filters import FilterSpec
from fmdkit.fixtures import gaussian_bisecting_bins, random_image, random_signal, tone, two_tone
from fmdkit.fmd import ALGORITHMS, decompose, filter_side_step, residue_side_step
from fmdkit.signal import inner_product, norm
from fmdkit.spiral import theodorus_2d, theodorus_3d

LINOEP = ["linoep_residue_side", "linoep_filter_side"]
FIXTURES = {
    "image64": lambda: random_image((64, 64), seed=2024),
    "signal1024": lambda: random_signal(1024, seed=2024),
}


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


# 1 -------------------------------------------------------------------------------

@pytest.mark.criterion(1)
@pytest.mark.parametrize("fixture", sorted(FIXTURES))
@pytest.mark.parametrize("algorithm", LINOEP)
def test_energy_preservation(algorithm, fixture):
    x = FIXTURES[fixture]()
    spec = FilterSpec.gaussian(x.shape, 6)
    res, dt = timed(decompose, x, spec, 6, algorithm)
    assert res.stages == 6
    assert abs(res.ledger.pee_percent) <= 1e-10
    assert dt < 1.0


# 2 -------------------------------------------------------------------------------

@pytest.mark.criterion(2)
def test_energy_leakage_on_bisected_tones():
    n = 1024
    spec = FilterSpec.gaussian(n, 6)
    bins = gaussian_bisecting_bins(spec.schedule, stages=(0, 1))
    assert bins == [151, 75]
    x = tone(n, bins[0]) + tone(n, bins[1])
    res, dt = timed(decompose, x, spec, 6, "plain")
    assert res.ledger.pee_percent > 0.1
    assert dt < 1.0


# 3 -------------------------------------------------------------------------------

@pytest.mark.criterion(3)
@pytest.mark.parametrize("fixture", sorted(FIXTURES) + ["twotone"])
@pytest.mark.parametrize("algorithm", LINOEP)
def test_linoep_structure(algorithm, fixture):
    x = sum(two_tone()) if fixture == "twotone" else FIXTURES[fixture]()
    res = decompose(x, FilterSpec.gaussian(x.shape, 6), 6, algorithm)
    comps = res.components
    for i in range(len(comps) - 1):
        tail = np.sum(comps[i + 1:], axis=0)
        assert abs(inner_product(comps[i], tail)) <= 1e-9 * norm(comps[i]) * norm(tail)
    pairwise = [
        abs(inner_product(comps[i], comps[l])) / (norm(comps[i]) * norm(comps[l]))
        for i in range(len(comps) - 1)
        for l in range(i + 1, len(comps))
        if norm(comps[i]) * norm(comps[l]) > 0
    ]
    assert max(pairwise) > 1e-9


# 4 -------------------------------------------------------------------------------

@pytest.mark.criterion(4)
def test_ideal_filters_give_orthogonal_components():
    n = 1024
    bins = [3, 11, 29, 70, 180]
    x = sum(tone(n, k, amplitude=6 - j, phase=0.3 * j) for j, k in enumerate(bins))
    spec = FilterSpec.ideal([6 / n, 20 / n, 50 / n, 120 / n])
    res = decompose(x, spec, 4, "plain")
    comps = res.components
    assert len(comps) == 5
    for i in range(5):
        for l in range(i + 1, 5):
            assert abs(inner_product(comps[i], comps[l])) <= 1e-9 * norm(comps[i]) * norm(comps[l])
    assert abs(res.ledger.pee_percent) <= 1e-9


# 5 -------------------------------------------------------------------------------

@pytest.mark.criterion(5)
def test_spiral_norms():
    t0 = time.perf_counter()
    assert theodorus_2d(17).norms()[-1] == pytest.approx(math.sqrt(17), rel=1e-12)
    for tilt in (math.pi / 720, -math.pi / 720):
        assert theodorus_3d(400, tilt, 18).norms()[-1] == pytest.approx(20.0, rel=1e-12)
    assert time.perf_counter() - t0 < 0.1


@pytest.mark.criterion(5)
@pytest.mark.xfail(
    strict=True,
    reason="with Phi_1 = 0 and Phi_(l+1) = Phi_l + atan(1/sqrt(l)), Phi_18 = 6.3667 > 2 pi; "
    "the full turn falls between Phi_17 = 6.1287 and Phi_18",
)
def test_spiral_angle_bound_as_stated():
    phi = theodorus_2d(19).angles
    direct = [math.fsum(math.atan(1 / math.sqrt(k)) for k in range(1, l)) for l in range(1, 20)]
    np.testing.assert_allclose(phi, direct, atol=1e-12)
    assert phi[17] < 2 * math.pi < phi[18]


# 6 -------------------------------------------------------------------------------

def _two_side_additivity(system, x1, x2):
    lhs = system(x1 + x2)
    rhs = [a + b for a, b in zip(system(x1), system(x2))]
    return max(norm(p - q) for p, q in zip(lhs, rhs)) / norm(x1 + x2)


@pytest.mark.criterion(6)
def test_system_classification():
    t0 = time.perf_counter()
    x1, x2 = two_tone()
    x = x1 + x2
    spec = FilterSpec.gaussian(1024, 6)
    for algorithm in ALGORITHMS:
        system = FMDSystem(algorithm, spec)
        add = probe_additivity(system, x1, x2)
        hom = probe_homogeneity(system, x, 2.0)
        shift = probe_time_invariance(system, x, 17)
        assert add.max_violation == pytest.approx(_two_side_additivity(system, x1, x2), rel=1e-9, abs=1e-15)
        assert hom.passed and shift.passed
        if algorithm == "plain":
            assert add.passed
        else:
            assert add.max_violation > 0.01
    assert time.perf_counter() - t0 < 2.0


# 7 -------------------------------------------------------------------------------

@pytest.mark.criterion(7)
def test_micro_instances():
    alpha, c, c_next = residue_side_step(np.array([2.0, 0.0]), np.array([1.0, 1.0]))
    assert alpha == 1.0
    assert c.tolist() == [1.0, -1.0] and c_next.tolist() == [2.0, 2.0]
    alpha, v, v_next = filter_side_step(np.array([1.0, 1.0]), np.array([2.0, 0.0]))
    assert alpha == 1.0
    assert v.tolist() == [2.0, 2.0] and v_next.tolist() == [1.0, -1.0]


# 8 -------------------------------------------------------------------------------

def _random_case(rng):
    if rng.random() < 0.3:
        shape = (int(rng.integers(8, 40)), int(rng.integers(8, 40)))
    else:
        shape = (int(rng.integers(16, 600)),)
    x = rng.standard_normal(shape) * 10.0 ** rng.uniform(-3, 3)
    stages = int(rng.integers(1, 7))
    kind = ("gaussian", "ideal", "moving")[int(rng.integers(3))]
    if kind == "gaussian":
        spec = FilterSpec.gaussian(shape, stages)
    elif kind == "ideal":
        spec = FilterSpec.ideal(np.sort(rng.choice(np.linspace(0.01, 0.5, 50), stages, replace=False)))
    else:
        spec = FilterSpec.moving(sorted(rng.choice(np.arange(1, min(shape) + 1, 2), stages, replace=False)))
    return x, spec


@pytest.mark.criterion(8)
def test_reconstruction():
    rng = np.random.default_rng(8)
    worst = 0.0
    for case in range(100):
        x, spec = _random_case(rng)
        for algorithm in ALGORITHMS:
            res = decompose(x, spec, algorithm=algorithm)
            err = norm(x - res.reconstruction) / norm(x)
            worst = max(worst, err)
            assert err <= 1e-9, (case, algorithm, spec)
    assert worst <= 1e-9
