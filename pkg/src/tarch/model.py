"""
Threshold ARCH(1) model: parameters, regime function and path simulation.

The process is

    eps_t     = sigma_t * eta_t
    sigma_t^2 = omega + alpha * eps_{t-1}^2 * 1{eps_{t-1}^2 > k * eps_{t-2}^2}

and ``X_t = (eps_t^2, eps_{t-1}^2)`` is a Markov chain on the nonnegative
quadrant with ``X_t = (psi(X_{t-1}) * eta_t^2, X_{1,t-1})``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from tarch import kernels
from tarch.dist import InnovationModel
from tarch.errors import DomainError

DEFAULT_CAP = 1e300


@dataclass(frozen=True)
class ModelParams:
    """Parameters ``(omega, alpha, k)``; ``omega > 0``, ``alpha, k >= 0``."""

    omega: float
    alpha: float
    k: float

    def __post_init__(self):
        for name in ("omega", "alpha", "k"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise DomainError(f"{name} must be a finite real, got {value!r}")
        if not self.omega > 0:
            raise DomainError(f"omega must be > 0, got {self.omega}")
        if self.alpha < 0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha}")
        if self.k < 0:
            raise DomainError(f"k must be >= 0, got {self.k}")

    def scaled(self, c2: float) -> "ModelParams":
        """Same dynamics with ``omega`` multiplied by ``c2``."""
        return ModelParams(self.omega * c2, self.alpha, self.k)


class State(NamedTuple):
    """Markov state ``(eps_t^2, eps_{t-1}^2)``."""

    x1: float = 0.0
    x2: float = 0.0


def _check_state(state):
    if not (state.x1 >= 0 and state.x2 >= 0):
        raise DomainError(f"state must lie in the nonnegative quadrant, got {state}")


def regime(params: ModelParams, state: State) -> bool:
    """ARCH regime indicator ``x1 > k * x2`` (strict; ties are homoskedastic)."""
    return state.x1 > params.k * state.x2


def psi(params: ModelParams, state: State) -> float:
    """Conditional variance of the next return given the state."""
    _check_state(state)
    if regime(params, state):
        return params.omega + params.alpha * state.x1
    return params.omega


def step(params: ModelParams, state: State, eta_sq: float) -> State:
    """One transition of the Markov chain."""
    if eta_sq < 0:
        raise DomainError(f"eta_sq must be >= 0, got {eta_sq}")
    return State(psi(params, state) * eta_sq, state.x1)


@dataclass
class Path:
    """A simulated trajectory.

    ``eps2`` holds ``eps_t**2`` as propagated by the recursion (exactly
    ``sigma2 * eta**2`` up to one rounding); ``epsilon`` is the signed return
    ``sqrt(sigma2) * eta``.  ``regime[t]`` is the indicator that produced
    ``sigma2[t]``.  If the recursion exceeded the cap, ``overflowed`` is set
    and the arrays stop at the last finite step.
    """

    epsilon: np.ndarray
    sigma2: np.ndarray
    eps2: np.ndarray
    regime: np.ndarray
    overflowed: bool = False
    overflow_step: int | None = None
    start: int = 1

    def __len__(self):
        return self.epsilon.shape[0]

    def to_csv(self, fh, header_comment: str | None = None) -> None:
        """Write columns ``t, epsilon, sigma2, regime`` (17 significant digits).

        An overflowed path gets a final marker row ``t,overflow,,``.
        """
        if header_comment is not None:
            fh.write(f"# {header_comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "epsilon", "sigma2", "regime"])
        for i in range(len(self)):
            writer.writerow(
                [
                    self.start + i,
                    f"{self.epsilon[i]:.17g}",
                    f"{self.sigma2[i]:.17g}",
                    int(self.regime[i]),
                ]
            )
        if self.overflowed:
            writer.writerow([self.overflow_step, "overflow", "", ""])


def run_recursion(params: ModelParams, eta: np.ndarray, init: State, cap: float):
    """Iterate the recursion over a given shock sequence.

    Returns ``(h, u, regime, steps_done)`` in units of omega.
    """
    _check_state(init)
    eta = np.ascontiguousarray(eta, dtype=np.float64)
    h, u, reg = kernels.alloc_path(eta.shape[0])
    omega = params.omega
    done = kernels.path(
        eta,
        float(params.alpha),
        float(params.k),
        init.x1 / omega,
        init.x2 / omega,
        cap / omega,
        h,
        u,
        reg,
    )
    return h, u, reg, done


def simulate_path(
    params: ModelParams,
    model: InnovationModel,
    n: int,
    burnin: int = 0,
    init: State = State(0.0, 0.0),
    stream: np.random.Generator | None = None,
    cap: float = DEFAULT_CAP,
) -> Path:
    """Simulate ``burnin + n`` steps from *init* and keep the last ``n``.

    Overflow past *cap* is reported on the returned path, not raised.
    """
    if n < 0 or burnin < 0:
        raise DomainError("n and burnin must be nonnegative")
    if stream is None:
        stream = np.random.default_rng()
    eta = model.sample(stream, burnin + n)
    return path_from_shocks(params, eta, burnin=burnin, init=init, cap=cap)


def path_from_shocks(
    params: ModelParams,
    eta: np.ndarray,
    burnin: int = 0,
    init: State = State(0.0, 0.0),
    cap: float = DEFAULT_CAP,
) -> Path:
    """Build a :class:`Path` from an explicit shock sequence."""
    h, u, reg, done = run_recursion(params, eta, init, cap)
    total = eta.shape[0]
    omega = params.omega
    keep = slice(burnin, max(burnin, done))
    sigma2 = omega * h[keep]
    eps2 = omega * u[keep]
    epsilon = np.sqrt(sigma2) * eta[keep]
    overflowed = done < total
    return Path(
        epsilon=epsilon,
        sigma2=sigma2,
        eps2=eps2,
        regime=reg[keep].copy(),
        overflowed=overflowed,
        overflow_step=(done + 1 - burnin) if overflowed else None,
        start=1,
    )
