"""
Closed-form existence conditions.

The sufficient condition for ``E eps_t^(2p) < inf`` is

    alpha < max_m  ( k^(m-1) / (mu_2p * mu_2m^(1-1/m) * mu_2mp^(1/m)) )^(1/(2p+m-1))

where ``mu_2q = E eta^(2q)``.  The max runs over all ``m >= 1``; it is
evaluated up to ``m_cap`` and flagged when the cap itself is the argmax.
All terms are computed in log space so that high-order Gaussian moments
(``mu_256`` is about ``1e252``) never overflow.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from tarch.dist import Gaussian, InnovationModel, gaussian
from tarch.errors import DomainError, MomentDivergentError, TruncationWarning
from tarch.model import ModelParams

M_CAP = 64
# bisection on argmax changes stops at this relative width in k
_BISECT_RTOL = 1e-13


@dataclass
class MomentBoundResult:
    p: int
    k: float
    terms: list[tuple[int, float]]
    m_star: int
    alpha_max: float
    m_cap: int
    truncated: bool = False

    def to_dict(self):
        return {
            "p": self.p,
            "k": self.k,
            "m_star": self.m_star,
            "alpha_max": self.alpha_max,
            "m_cap": self.m_cap,
            "truncated": self.truncated,
            "terms": [[m, b] for m, b in self.terms],
        }


@dataclass(frozen=True)
class RegionRow:
    alpha: float
    k: float
    strict: bool
    second_moment: bool
    fourth_moment: bool


@dataclass(frozen=True)
class TableRow:
    k_lo: float
    k_hi: float
    m: int
    alpha_max: float


def _check_p(p):
    if int(p) != p or p < 1:
        raise DomainError(f"p must be a positive integer, got {p}")


@lru_cache(maxsize=64)
def _log_coefficients(model: InnovationModel, p: int, m_cap: int):
    """Per-m constants of the bound in log form.

    Returns ``(m, offset, exponent)`` arrays such that
    ``log bound_m(k) = ((m - 1) log k + offset_m) * exponent_m``.  Orders whose
    moments diverge get ``offset = -inf`` (their Hölder bound is vacuous).
    """
    log_mu_2p = model.log_even_moment(p)
    ms = np.arange(1, m_cap + 1)
    offset = np.empty(m_cap)
    for i, m in enumerate(ms):
        try:
            offset[i] = (
                -log_mu_2p
                - (1.0 - 1.0 / m) * model.log_even_moment(m)
                - model.log_even_moment(m * p) / m
            )
        except MomentDivergentError:
            offset[i] = -np.inf
    exponent = 1.0 / (2 * p + ms - 1)
    return ms, offset, exponent


def _log_bounds(model, p, ks, m_cap):
    """Matrix of log bound terms, shape ``(len(ks), m_cap)``."""
    ms, offset, exponent = _log_coefficients(model, p, m_cap)
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        logk = np.log(ks)[:, None]
        power = np.where(ms[None, :] == 1, 0.0, (ms[None, :] - 1) * logk)
    return (power + offset[None, :]) * exponent[None, :]


def bound_term(model: InnovationModel, p: int, k: float, m: int) -> float:
    """The bracketed term of the sufficient condition for a single ``m``."""
    _check_p(p)
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if k == 0 and m > 1:
        return 0.0
    log_num = (m - 1) * math.log(k) if m > 1 else 0.0
    log_den = (
        model.log_even_moment(p)
        + (1.0 - 1.0 / m) * model.log_even_moment(m)
        + model.log_even_moment(m * p) / m
    )
    return math.exp((log_num - log_den) / (2 * p + m - 1))


def alpha_max(
    model: InnovationModel, p: int, k: float, m_cap: int = M_CAP
) -> MomentBoundResult:
    """Maximise the bound over ``m = 1..m_cap``.

    Ties resolve to the smallest ``m``.  A :class:`TruncationWarning` is
    issued when the maximum sits at ``m_cap``.
    """
    _check_p(p)
    if m_cap < 1:
        raise DomainError(f"m_cap must be >= 1, got {m_cap}")
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    row = _log_bounds(model, p, [k], m_cap)[0]
    values = np.exp(row)
    idx = int(np.argmax(values))
    m_star = idx + 1
    truncated = m_star == m_cap and m_cap > 1
    if truncated:
        warnings.warn(
            f"argmax over m reached m_cap={m_cap} at k={k}; the bound may be "
            "truncated, raise m_cap",
            TruncationWarning,
            stacklevel=2,
        )
    return MomentBoundResult(
        p=p,
        k=float(k),
        terms=[(m, float(v)) for m, v in zip(range(1, m_cap + 1), values)],
        m_star=m_star,
        alpha_max=float(values[idx]),
        m_cap=m_cap,
        truncated=truncated,
    )


def alpha_max_curve(model, p, ks, m_cap=M_CAP):
    """Vectorised ``(alpha_max, m_star)`` over an array of ``k``."""
    _check_p(p)
    logs = _log_bounds(model, p, ks, m_cap)
    idx = np.argmax(logs, axis=1)
    best = np.exp(logs[np.arange(logs.shape[0]), idx])
    return best, idx + 1


def gaussian_breakpoint(m: int) -> float:
    """``k`` at which the Gaussian ``p = 1`` argmax moves from ``m - 1`` to ``m``."""
    if m < 2:
        raise DomainError(f"breakpoints start at m = 2, got {m}")
    num = (2 * m - 1) ** m
    den = Gaussian.exact_even_moment(m - 1)
    return math.sqrt(num / den)


def m0(k: float) -> int:
    """Closed-form argmax of the Gaussian ``p = 1`` bound."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    m = 2
    while not k < gaussian_breakpoint(m):
        m += 1
    return m - 1


def simple_condition(model: InnovationModel, p: int, alpha: float) -> bool:
    """``mu_2p * alpha**p < 1``: the ``m = 1`` case of the sufficient bound."""
    _check_p(p)
    return model.even_moment(p) * alpha**p < 1.0


def _necessary_lhs(model, p, alpha, k):
    if k < 0 or k > 1:
        raise DomainError(f"the necessary condition needs 0 <= k <= 1, got k={k}")
    return model.even_moment(p) * alpha**p * (1.0 - k**p)


def necessary_condition(model: InnovationModel, p: int, alpha: float, k: float) -> bool:
    """``mu_2p alpha^p (1 - k^p) < 1``; False means ``E eps^(2p)`` is infinite."""
    _check_p(p)
    return _necessary_lhs(model, p, alpha, k) < 1.0


def moment_lower_bound(model: InnovationModel, params: ModelParams, p: int) -> float:
    """Lower bound on ``E eps_t^(2p)`` for any stationary solution, ``k <= 1``."""
    _check_p(p)
    denom = 1.0 - _necessary_lhs(model, p, params.alpha, params.k)
    if denom <= 0:
        raise MomentDivergentError(
            f"E eps^(2*{p}) is infinite: the necessary condition fails "
            f"(1 - mu alpha^p (1 - k^p) = {denom:.6g})"
        )
    return model.even_moment(p) * params.omega**p / denom


def nelson_bound(model: InnovationModel) -> float:
    """``exp(-E log eta^2)``: strict stationarity threshold on alpha when k = 0."""
    return math.exp(-model.log_moment())


def classify_point(
    model: InnovationModel,
    alpha: float,
    k: float,
    m_cap: int = M_CAP,
    nelson: float | None = None,
) -> RegionRow:
    """Sufficient-condition classification of one ``(alpha, k)`` point."""
    if nelson is None:
        nelson = nelson_bound(model)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        second = alpha < alpha_max(model, 1, k, m_cap).alpha_max
        fourth = alpha < alpha_max(model, 2, k, m_cap).alpha_max
    return RegionRow(
        alpha=float(alpha),
        k=float(k),
        strict=bool(k > 0 or alpha < nelson),
        second_moment=bool(second),
        fourth_moment=bool(fourth),
    )


def region_grid(
    model: InnovationModel, alphas, ks, m_cap: int = M_CAP
) -> list[RegionRow]:
    """Classify every grid point, ordered by ``(k, alpha)``."""
    alphas = np.asarray(alphas, dtype=float)
    ks = np.asarray(ks, dtype=float)
    nelson = nelson_bound(model)
    a2, _ = alpha_max_curve(model, 1, ks, m_cap)
    a4, _ = alpha_max_curve(model, 2, ks, m_cap)
    rows = []
    for k, b2, b4 in zip(ks, a2, a4):
        for a in alphas:
            rows.append(
                RegionRow(
                    alpha=float(a),
                    k=float(k),
                    strict=bool(k > 0 or a < nelson),
                    second_moment=bool(a < b2),
                    fourth_moment=bool(a < b4),
                )
            )
    return rows


def _argmax_at(model, p, k, m_cap):
    return int(np.argmax(_log_bounds(model, p, [k], m_cap)[0])) + 1


def _bisect_switch(model, p, lo, hi, m_cap):
    m_lo = _argmax_at(model, p, lo, m_cap)
    while hi - lo > _BISECT_RTOL * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _argmax_at(model, p, mid, m_cap) == m_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def table_rows(
    model: InnovationModel = gaussian,
    p: int = 1,
    k_max: float = 140.0,
    m_cap: int = M_CAP,
    scan_points: int = 4096,
) -> list[TableRow]:
    """Intervals of ``k`` on which the argmax ``m`` is constant.

    Each row carries the bound evaluated at the right endpoint of its
    interval (the last row stops at ``k_max``).
    """
    _check_p(p)
    if not k_max > 0:
        raise DomainError(f"k_max must be > 0, got {k_max}")
    ks = np.linspace(0.0, k_max, scan_points + 1)
    _, argm = alpha_max_curve(model, p, ks, m_cap)
    if argm.max() == m_cap and m_cap > 1:
        warnings.warn(
            f"argmax over m reached m_cap={m_cap} below k={k_max}",
            TruncationWarning,
            stacklevel=2,
        )
    rows = []
    start = 0.0
    for i in np.flatnonzero(argm[1:] != argm[:-1]):
        k_switch = _bisect_switch(model, p, ks[i], ks[i + 1], m_cap)
        m = int(argm[i])
        rows.append(
            TableRow(float(start), float(k_switch), m, bound_term(model, p, k_switch, m))
        )
        start = k_switch
    m = int(argm[-1])
    rows.append(TableRow(start, float(k_max), m, bound_term(model, p, k_max, m)))
    return rows
