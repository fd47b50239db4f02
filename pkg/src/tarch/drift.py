"""
Foster-Lyapunov drift certificates for the two-step chain.

With test function ``g(x) = x1**r`` the two-step conditional moment is

    E[eps_{t+2}^(2r) | X_t = x]
        = mu_2r * E[(omega + alpha * psi(x) * eta^2 * 1{eta^2 > k x1 / psi(x)})^r]

and for large ``x1`` in the ARCH region it grows like
``lambda(r) * x1**r`` with ``lambda(r) = alpha^(2r) mu_2r mu*_2r``,
``mu*_2r = E[eta^(2r) 1{eta^2 > k/alpha}]``.  Any ``r`` with
``lambda(r) < 1`` yields constants ``beta, M, b`` for the drift inequality
outside the set ``C = [0, M]^2 U {x1 <= k x2}``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from tarch.dist import InnovationModel
from tarch.errors import DomainError, SearchError
from tarch.model import ModelParams, State, psi

R_FLOOR = 2.0**-10
_X_LIMIT = 1e280


def _cutoff(params, x):
    h = psi(params, x)
    return h, params.k * x.x1 / h


def two_step_moment(
    model: InnovationModel, params: ModelParams, x: State, q: float
) -> float:
    """``E[eps_{t+2}^(2q) | X_t = x]`` by quadrature over ``eta_{t+1}^2``."""
    if q <= 0:
        raise DomainError(f"q must be > 0, got {q}")
    h, c = _cutoff(params, x)
    omega, alpha = params.omega, params.alpha
    below = omega**q * (1.0 - model.tail_prob(c))
    above = model.expect(lambda y: (omega + alpha * h * y) ** q, c)
    return model.even_moment(q) * (below + above)


def two_step_binomial(
    model: InnovationModel, params: ModelParams, x: State, p: int
) -> float:
    """Integer-order two-step moment through the binomial expansion.

    ``mu_2p * [omega^p + sum_{s>=1} C(p,s) omega^(p-s) (alpha psi)^s mu*_2s(c)]``;
    the ``s = 0`` term carries no indicator.
    """
    if int(p) != p or p < 1:
        raise DomainError(f"p must be a positive integer, got {p}")
    p = int(p)
    h, c = _cutoff(params, x)
    omega, alpha = params.omega, params.alpha
    total = omega**p
    for s in range(1, p + 1):
        total += (
            math.comb(p, s)
            * omega ** (p - s)
            * (alpha * h) ** s
            * model.truncated_even_moment(s, c)
        )
    return model.even_moment(p) * total


def two_step_mc(
    model: InnovationModel,
    params: ModelParams,
    x: State,
    q: float,
    n: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Monte Carlo estimate and standard error of the two-step moment."""
    e1 = model.sample_sq(rng, n)
    e2 = model.sample_sq(rng, n)
    h0 = psi(params, x)
    x1_next = h0 * e1
    active = x1_next > params.k * x.x1
    h1 = np.where(active, params.omega + params.alpha * x1_next, params.omega)
    vals = (h1 * e2) ** q
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n))


def _check_ak(alpha, k):
    if not alpha > 0:
        raise DomainError(
            "alpha must be > 0: with alpha = 0 the chain is i.i.d. and the "
            "drift condition is trivial"
        )
    if not k > 0:
        raise DomainError(
            "k must be > 0: for k = 0 (standard ARCH(1)) strict stationarity "
            "is governed by the Nelson bound alpha < exp(-E log eta^2)"
        )


def lambda_coefficient(
    model: InnovationModel, alpha: float, k: float, r: float
) -> float:
    """Contraction coefficient ``alpha^(2r) mu_2r mu*_2r``.

    ``r = 0`` returns the limit ``P(eta^2 > k/alpha)``.
    """
    _check_ak(alpha, k)
    if not 0 <= r <= 1:
        raise DomainError(f"r must lie in [0, 1], got {r}")
    c = k / alpha
    if r == 0:
        return model.tail_prob(c)
    return alpha ** (2 * r) * model.even_moment(r) * model.truncated_even_moment(r, c)


def lambda_limit(model: InnovationModel, alpha: float, k: float, h: float = 1e-3) -> float:
    """Richardson extrapolation of ``lambda(r)`` to ``r -> 0``."""
    return 2.0 * lambda_coefficient(model, alpha, k, h / 2) - lambda_coefficient(
        model, alpha, k, h
    )


@dataclass
class DriftReport:
    alpha: float
    k: float
    omega: float
    r: float
    lam: float
    beta: float
    M: float
    b: float
    b_numeric: float
    satisfied: bool

    def to_dict(self):
        return {("lambda" if k == "lam" else k): v for k, v in asdict(self).items()}

    def in_small_set(self, x: State) -> bool:
        return (x.x1 <= self.M and x.x2 <= self.M) or x.x1 <= self.k * x.x2

    def rhs(self, x: State) -> float:
        """Allowed value of the two-step moment at *x*."""
        if self.in_small_set(x):
            return self.b
        return (1.0 - self.beta) * x.x1**self.r - self.beta


def _arch_margin(model, params, r, beta, x1):
    lhs = two_step_moment(model, params, State(x1, 0.0), r)
    return (1.0 - beta) * x1**r - beta - lhs


def _drift_threshold(model, params, r, beta):
    """Smallest ``x1`` beyond which the ARCH-region drift inequality holds.

    Doubling finds a passing point, bisection sharpens the boundary, and a
    log-spaced sweep over twelve decades above it guards against a later
    failure; any failure restarts the search past that point.
    """
    start = params.omega
    while True:
        x = start
        while _arch_margin(model, params, r, beta, x) < 0:
            x *= 2.0
            if x > _X_LIMIT:
                raise SearchError(
                    f"no drift threshold below {_X_LIMIT:g} for r={r}; "
                    "lower the r floor"
                )
        lo, hi = (x / 2.0 if x > start else 0.0), x
        for _ in range(60):
            if hi - lo <= 1e-9 * hi:
                break
            mid = 0.5 * (lo + hi)
            if _arch_margin(model, params, r, beta, mid) < 0:
                lo = mid
            else:
                hi = mid
        sweep = hi * np.logspace(0, 12, 241)
        fails = [s for s in sweep if _arch_margin(model, params, r, beta, s) < 0]
        if not fails:
            return hi
        start = 2.0 * max(fails)


def find_r(
    model: InnovationModel,
    alpha: float,
    k: float,
    tolerance: float = R_FLOOR,
    omega: float = 1.0,
) -> DriftReport:
    """Search ``r = 1, 1/2, 1/4, ...`` down to *tolerance* for ``lambda(r) < 1``.

    On success sets ``beta = (1 - lambda) / 2``, finds the drift threshold
    ``M0`` for ``x1`` in the ARCH region and returns
    ``M = M0 / min(1, k)``; this makes every ARCH-region state outside
    ``[0, M]^2`` satisfy ``x1 > M0``.  ``b`` is the closed-form bound
    ``mu_2r omega^r + mu_2r^2 alpha^r (omega + alpha M)^r`` on the small set;
    ``b_numeric`` is the largest two-step moment found on a grid over it.
    """
    _check_ak(alpha, k)
    params = ModelParams(omega, alpha, k)
    r = 1.0
    lam = None
    while r >= tolerance:
        lam = lambda_coefficient(model, alpha, k, r)
        if lam < 1.0:
            break
        r /= 2.0
    else:
        raise SearchError(
            f"no admissible r >= {tolerance:g} with lambda(r) < 1 "
            f"(last lambda={lam:.6g}); since lambda(r) -> P(eta^2 > k/alpha) < 1 "
            "this can only come from quadrature error or too high a floor"
        )
    beta = 0.5 * (1.0 - lam)
    m0 = _drift_threshold(model, params, r, beta)
    M = m0 / min(1.0, k)
    mu = model.even_moment(r)
    b = mu * omega**r + mu * mu * alpha**r * (omega + alpha * M) ** r
    xs = np.concatenate([np.linspace(0.0, M, 129), M * np.logspace(-12, 0, 129)])
    b_numeric = max(
        two_step_moment(model, params, State(float(x1), 0.0), r) for x1 in xs
    )
    # homoskedastic region: the moment decreases in x1, largest at x1 = 0
    b_numeric = max(b_numeric, two_step_moment(model, params, State(0.0, 1.0), r))
    return DriftReport(
        alpha=float(alpha),
        k=float(k),
        omega=float(omega),
        r=r,
        lam=lam,
        beta=beta,
        M=M,
        b=b,
        b_numeric=b_numeric,
        satisfied=True,
    )


@dataclass(frozen=True)
class GridPoint:
    x1: float
    x2: float
    in_small_set: bool
    lhs: float
    rhs: float
    passed: bool


def log_grid(report: DriftReport, n_side: int = 32) -> list[State]:
    """``n_side**2`` log-spaced states spanning well inside and beyond ``M``."""
    lo = 1e-3 * report.omega
    hi = 1e3 * max(report.M, report.omega)
    axis = np.geomspace(lo, hi, n_side)
    return [State(float(a), float(c)) for a in axis for c in axis]


def drift_grid_check(
    model: InnovationModel,
    params: ModelParams,
    report: DriftReport,
    grid=None,
) -> list[GridPoint]:
    """Evaluate the drift inequality at each grid state."""
    if not report.satisfied:
        raise DomainError("report does not certify a drift condition")
    if (params.alpha, params.k, params.omega) != (report.alpha, report.k, report.omega):
        raise DomainError("params do not match the drift report")
    if grid is None:
        grid = log_grid(report)
    out = []
    for x in grid:
        x = State(*x)
        lhs = two_step_moment(model, params, x, report.r)
        rhs = report.rhs(x)
        out.append(
            GridPoint(x.x1, x.x2, report.in_small_set(x), lhs, rhs, bool(lhs <= rhs))
        )
    return out
