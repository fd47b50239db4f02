import math

import numpy as np
import pytest

from tarch.conditions import alpha_max, moment_lower_bound, necessary_condition
from tarch.dist import gaussian
from tarch.errors import DomainError
from tarch.model import ModelParams, simulate_path
from tarch.montecarlo import (
    McConfig,
    estimate_moment,
    explosion_probe,
    regime_occupancy,
    replicate_stream,
)

SMALL = McConfig(n=20_000, burnin=2_000, reps=16, seed=5)


def test_config_validation():
    for bad in ({"n": 0}, {"reps": 0}, {"burnin": -1}, {"seed": -1}, {"cap": 0.0}):
        with pytest.raises(DomainError):
            McConfig(**bad)


def test_stream_matches_spawn():
    for i in (0, 3, 17):
        a = replicate_stream(42, i).standard_normal(8)
        child = np.random.SeedSequence(42).spawn(i + 1)[i]
        b = np.random.Generator(np.random.PCG64(child)).standard_normal(8)
        assert np.array_equal(a, b)


def test_arch1_value():
    rep = estimate_moment(gaussian, ModelParams(1.0, 0.5, 0.0), 1, SMALL)
    assert rep.reps_used + rep.overflowed == SMALL.reps
    assert abs(rep.estimate - 2.0) < 4 * rep.std_err
    assert rep.regime_frac == 1.0


def test_lower_bound_example():
    params = ModelParams(1.0, 0.9, 0.5)
    rep = estimate_moment(gaussian, params, 1, SMALL)
    assert rep.estimate + 4 * rep.std_err >= 1 / (1 - 0.9 * 0.5)


def test_huge_threshold_degenerates():
    rep = estimate_moment(gaussian, ModelParams(2.5, 3.0, 1e6), 1, SMALL)
    assert abs(rep.estimate - 2.5) < 4 * rep.std_err
    assert rep.regime_frac < 1e-3


def test_occupancy():
    assert regime_occupancy(gaussian, ModelParams(1.0, 0.7, 0.0), SMALL) == 1.0
    half = regime_occupancy(gaussian, ModelParams(1.0, 0.0, 1.0), SMALL)
    # 16 * 20000 pairs, sd about 1e-3 after serial correlation
    assert abs(half - 0.5) < 5e-3
    assert regime_occupancy(gaussian, ModelParams(1.0, 0.5, 1e12), SMALL) == 0.0


def test_reproducible_across_workers():
    params = ModelParams(1.0, 1.2, 2.0)
    a = estimate_moment(gaussian, params, 1, SMALL, workers=1)
    b = estimate_moment(gaussian, params, 1, SMALL, workers=4)
    assert a.to_dict() == b.to_dict()
    assert [r.mean for r in a.replicates] == [r.mean for r in b.replicates]


@pytest.mark.parametrize("p", [1, 2])
def test_scale_equivariance_exact(p):
    cfg = McConfig(n=5_000, burnin=500, reps=8, seed=9)
    base = estimate_moment(gaussian, ModelParams(1.0, 0.4, 0.8), p, cfg)
    scaled = estimate_moment(gaussian, ModelParams(9.0, 0.4, 0.8), p, cfg)
    assert scaled.estimate == 3 ** (2 * p) * base.estimate


def test_replicate_mean_matches_path():
    cfg = McConfig(n=3_000, burnin=300, reps=2, seed=1)
    params = ModelParams(0.5, 0.8, 1.5)
    rep = estimate_moment(gaussian, params, 1, cfg)
    path = simulate_path(params, gaussian, cfg.n, burnin=cfg.burnin, stream=replicate_stream(1, 1))
    assert rep.replicates[1].mean * params.omega == pytest.approx(path.eps2.mean(), rel=1e-12)


def test_overflowed_replicates_are_excluded():
    cfg = McConfig(n=2_000, burnin=0, reps=8, seed=2, cap=1e30)
    rep = estimate_moment(gaussian, ModelParams(1.0, 6.0, 0.0), 1, cfg)
    assert rep.overflowed == 8 and rep.reps_used == 0 and math.isnan(rep.estimate)


def test_probe_examples():
    cfg = McConfig(n=20_000, burnin=1_000, reps=8, seed=3)
    stable = explosion_probe(gaussian, ModelParams(1.0, 4.0, 1.0), cfg)
    assert stable.overflow_frac == 0.0 and abs(stable.median_slope) < 1e-3
    arch = explosion_probe(gaussian, ModelParams(1.0, 0.5, 0.0), cfg)
    assert arch.overflow_frac == 0.0
    wild = explosion_probe(gaussian, ModelParams(1.0, 4.0, 0.0), cfg)
    assert wild.overflow_frac == 1.0 and wild.median_slope > 0
    assert all(s is not None for s in wild.overflow_steps)


def test_lower_bound_random_points():
    rng = np.random.default_rng(8)
    cfg = McConfig(n=10_000, burnin=1_000, reps=16, seed=4)
    checked = 0
    while checked < 6:
        omega, alpha, k = rng.uniform([0.2, 0.05, 0.0], [3.0, 1.5, 1.0])
        p = int(rng.integers(1, 3))
        if not necessary_condition(gaussian, p, alpha, k):
            continue
        rep = estimate_moment(gaussian, ModelParams(omega, alpha, k), p, cfg)
        lb = moment_lower_bound(gaussian, ModelParams(omega, alpha, k), p)
        assert rep.estimate + 4 * rep.std_err >= lb
        checked += 1


@pytest.mark.slow
@pytest.mark.parametrize("p,k", [(1, 1.0), (1, 4.0), (1, 10.0), (2, 4.0), (2, 10.0)])
def test_estimates_stabilise_inside_region(p, k):
    alpha = 0.6 * alpha_max(gaussian, p, k).alpha_max
    params = ModelParams(1.0, alpha, k)
    a = estimate_moment(gaussian, params, p, McConfig(n=20_000, burnin=5_000, reps=32, seed=6))
    b = estimate_moment(gaussian, params, p, McConfig(n=40_000, burnin=5_000, reps=32, seed=7))
    assert abs(a.estimate - b.estimate) < 4 * math.hypot(a.std_err, b.std_err)
