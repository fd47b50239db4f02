"""
Ensemble simulation: stationary moments, regime occupancy, explosion probes.

Replicate ``i`` draws its shocks from ``PCG64(SeedSequence(seed, spawn_key=(i,)))``,
the same stream ``SeedSequence(seed).spawn(...)[i]`` would give, so results do
not depend on how replicates are scheduled across workers.  Aggregates are
formed from per-replicate values stored in index order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from tarch import kernels
from tarch._accel import worker_count
from tarch.dist import InnovationModel
from tarch.errors import DomainError
from tarch.model import DEFAULT_CAP, ModelParams

HEAVY_TAIL_NOTE = (
    "near the moment frontier the replicate means may have infinite variance; "
    "std_err is then unreliable, compare with the replicate median"
)


@dataclass(frozen=True)
class McConfig:
    n: int = 100_000
    burnin: int = 10_000
    reps: int = 64
    seed: int = 0
    cap: float = DEFAULT_CAP

    def __post_init__(self):
        if self.n < 1 or self.reps < 1:
            raise DomainError("n and reps must be >= 1")
        if self.burnin < 0:
            raise DomainError("burnin must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if not self.cap > 0:
            raise DomainError("cap must be > 0")


def replicate_stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for replicate *index* under master *seed*."""
    ss = np.random.SeedSequence(seed, spawn_key=(index,))
    return np.random.Generator(np.random.PCG64(ss))


def _map_replicates(func, reps, workers):
    if workers is None:
        workers = worker_count()
    workers = max(1, min(workers, reps))
    if workers == 1:
        return [func(i) for i in range(reps)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, range(reps)))


@dataclass
class Replicate:
    index: int
    mean: float
    regime_frac: float
    overflowed: bool
    steps: int


@dataclass
class McReport:
    estimate: float
    std_err: float
    reps_used: int
    overflowed: int
    regime_frac: float
    median: float
    p: int
    replicates: list[Replicate] = field(default_factory=list, repr=False)
    note: str = HEAVY_TAIL_NOTE

    def to_dict(self):
        return {
            "estimate": self.estimate,
            "std_err": self.std_err,
            "reps_used": self.reps_used,
            "overflowed": self.overflowed,
            "regime_frac": self.regime_frac,
            "median": self.median,
            "p": self.p,
            "note": self.note,
        }


def _moment_replicates(model, params, p, config, workers):
    scale = params.omega
    cap_u = config.cap / scale

    def run(i):
        eta = model.sample(replicate_stream(config.seed, i), config.burnin + config.n)
        with np.errstate(over="ignore"):
            acc, hits, done = kernels.moment(
                eta, float(params.alpha), float(params.k), 0.0, 0.0, cap_u,
                config.burnin, int(p),
            )
        total = config.burnin + config.n
        # eps^(2p) itself can overflow below the cap on eps^2
        if done < total or not math.isfinite(acc):
            return Replicate(i, math.nan, math.nan, True, int(done))
        return Replicate(i, acc / config.n, hits / config.n, False, int(done))

    return _map_replicates(run, config.reps, workers)


def _summarise(reps, omega, p):
    ok = [r for r in reps if not r.overflowed]
    used = len(ok)
    if used == 0:
        return McReport(math.nan, math.nan, 0, len(reps), math.nan, math.nan, p, reps)
    means = np.array([r.mean for r in ok])
    fracs = np.array([r.regime_frac for r in ok])
    scale = omega**p
    # np.sum is pairwise over the index-ordered array
    estimate = scale * (np.sum(means) / used)
    std_err = scale * (np.std(means, ddof=1) / math.sqrt(used)) if used > 1 else math.nan
    return McReport(
        estimate=float(estimate),
        std_err=float(std_err),
        reps_used=used,
        overflowed=len(reps) - used,
        regime_frac=float(np.sum(fracs) / used),
        median=float(scale * np.median(means)),
        p=p,
        replicates=reps,
    )


def estimate_moment(
    model: InnovationModel,
    params: ModelParams,
    p: int,
    config: McConfig,
    workers: int | None = None,
) -> McReport:
    """Estimate ``E eps_t^(2p)`` under the stationary law.

    Each replicate averages ``eps_t^(2p)`` after burn-in; replicates that
    overflow are counted and excluded.  ``estimate`` is the mean of
    replicate means, ``std_err`` their standard deviation over
    ``sqrt(reps_used)``.
    """
    if int(p) != p or p < 1:
        raise DomainError(f"p must be a positive integer, got {p}")
    reps = _moment_replicates(model, params, int(p), config, workers)
    return _summarise(reps, params.omega, int(p))


def regime_occupancy(
    model: InnovationModel,
    params: ModelParams,
    config: McConfig,
    workers: int | None = None,
) -> float:
    """Long-run fraction of steps with ``eps_{t-1}^2 > k eps_{t-2}^2``."""
    return estimate_moment(model, params, 1, config, workers).regime_frac


@dataclass
class ProbeReport:
    overflow_frac: float
    median_slope: float
    slopes: list[float] = field(repr=False)
    overflow_steps: list[int | None] = field(repr=False)

    def to_dict(self):
        return {
            "overflow_frac": self.overflow_frac,
            "median_slope": self.median_slope,
        }


def _ls_slope(y):
    n = y.shape[0]
    if n < 2:
        return math.nan
    t = np.arange(n, dtype=float)
    t -= t.mean()
    return float(np.dot(t, y - y.mean()) / np.dot(t, t))


def explosion_probe(
    model: InnovationModel,
    params: ModelParams,
    config: McConfig,
    workers: int | None = None,
) -> ProbeReport:
    """Overflow frequency and median growth rate of ``log eps_t^2``.

    The slope is a least-squares fit of ``log eps_t^2`` on ``t`` over the
    post-burn-in window, or over all completed steps when a replicate
    overflowed before the window was reached.
    """
    cap_u = config.cap / params.omega
    total = config.burnin + config.n

    def run(i):
        eta = model.sample(replicate_stream(config.seed, i), total)
        h, u, reg = kernels.alloc_path(total)
        done = kernels.path(
            eta, float(params.alpha), float(params.k), 0.0, 0.0, cap_u, h, u, reg
        )
        lo = config.burnin if done - config.burnin >= 2 else 0
        logs = np.log(np.maximum(u[lo:done], np.finfo(float).tiny))
        return _ls_slope(logs), (done + 1 if done < total else None)

    results = _map_replicates(run, config.reps, workers)
    slopes = [s for s, _ in results]
    steps = [o for _, o in results]
    n_over = sum(o is not None for o in steps)
    finite = [s for s in slopes if not math.isnan(s)]
    return ProbeReport(
        overflow_frac=n_over / config.reps,
        median_slope=float(np.median(finite)) if finite else math.nan,
        slopes=slopes,
        overflow_steps=steps,
    )
