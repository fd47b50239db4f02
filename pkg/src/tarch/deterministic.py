"""
The deterministic skeleton: ``eta_t**2 = 1`` for all ``t`` and ``eps_0 = 0``.

Starting from zero, ``eps_i**2 = omega * (1 + alpha + ... + alpha**(i-1))``
while the ARCH regime stays active.  The ratio of consecutive terms is
``alpha + 1 / (1 + alpha + ... + alpha**i)``; the first index ``i0`` at which
it drops to ``k`` or below switches the process to the homoskedastic regime
for good.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from tarch.errors import NumericalOverflowError
from tarch.model import DEFAULT_CAP, ModelParams

SETTLES = "settles_to_omega"
CONVERGES = "converges_geometric"
DIVERGES = "diverges"

I0_CAP = 10**6


@dataclass(frozen=True)
class DeterministicReport:
    case_label: str
    i0: int | None = None
    settle_time: int | None = None
    limit: float | None = None

    def to_dict(self):
        return asdict(self)


def in_e_set(alpha: float, k: float, i: int) -> bool:
    """Membership of ``(alpha, k)`` in ``E_i``."""
    partial = sum(alpha**j for j in range(i + 1))
    return alpha + 1.0 / partial <= k


def settling_index(alpha: float, k: float, cap: int = I0_CAP) -> int | None:
    """Smallest ``i`` with ``(alpha, k)`` in ``E_i``, or None below *cap*."""
    if alpha > 0 and k <= max(alpha, 1.0):
        # alpha + 1/S_i > max(alpha, 1) for every i, even where rounding says otherwise
        return None
    partial = 0.0
    term = 1.0
    for i in range(cap + 1):
        partial += term
        if alpha + 1.0 / partial <= k:
            return i
        term *= alpha
        if math.isinf(partial):
            break
    return None


def classify(params: ModelParams) -> DeterministicReport:
    """Case of the skeleton dynamics.

    ``alpha == 0`` is reported as settling (``settle_time == 1``) even where
    it also satisfies the convergent case; the two conclusions coincide.
    """
    alpha, k, omega = params.alpha, params.k, params.omega
    if alpha == 0:
        return DeterministicReport(
            SETTLES, i0=settling_index(alpha, k), settle_time=1, limit=float(omega)
        )
    if max(alpha, 1.0) < k:
        i0 = settling_index(alpha, k)
        return DeterministicReport(
            SETTLES,
            i0=i0,
            settle_time=None if i0 is None else i0 + 3,
            limit=float(omega),
        )
    if alpha < 1.0 and k <= 1.0:
        return DeterministicReport(CONVERGES, limit=omega / (1.0 - alpha))
    return DeterministicReport(DIVERGES)


def exact_trajectory(
    params: ModelParams, steps: int, cap: float = DEFAULT_CAP
) -> list[float]:
    """``eps_0**2, ..., eps_{steps-1}**2`` of the skeleton started at zero.

    Raises :class:`NumericalOverflowError` once a term exceeds *cap*; the
    terms computed so far are attached as ``exc.partial``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    omega, alpha, k = params.omega, params.alpha, params.k
    # iterate in units of omega, like the stochastic simulator
    # the indicator is decided on u1 - k*u2 rebuilt from how u1 was formed,
    # so 1 + alpha*u2 is not mistaken for alpha*u2 once 1 is below an ulp
    out = [0.0]
    u1, u2 = 0.0, 0.0
    arch_prev = False
    for t in range(1, steps):
        if arch_prev:
            arch = 1.0 + (alpha - k) * u2 > 0.0
        else:
            arch = u1 > k * u2
        u = 1.0 + alpha * u1 if arch else 1.0
        if not omega * u <= cap:
            exc = NumericalOverflowError(
                f"eps_t^2 exceeded {cap:g} at t={t} (alpha={alpha}, k={k})"
            )
            exc.partial = out
            raise exc
        out.append(omega * u)
        u1, u2 = u, u1
        arch_prev = arch
    return out


def partial_sum_trajectory(params: ModelParams, steps: int) -> list[float]:
    """Closed form ``omega * (1 + ... + alpha**(t-1))`` valid in the ARCH regime."""
    return [params.omega * sum(params.alpha**j for j in range(t)) for t in range(steps)]
