"""
Innovation distributions.

An :class:`InnovationModel` describes the law of the i.i.d. shocks ``eta_t``:
zero mean, unit variance, symmetric, with ``eta_t**2`` admitting a strictly
positive density on the positive half-line.  Every moment functional used
elsewhere in the package (even moments, truncated even moments, tail
probabilities of ``eta**2`` and ``E log eta**2``) is provided here.

Integrals over ``y = eta**2`` are computed after the substitution ``y = u**2``
so that the ``y**-1/2`` singularity of the density of ``eta**2`` at zero
disappears: ``E[h(eta**2)] = int_0^inf h(u**2) g(u) du`` with ``g`` the
density of ``|eta|``.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate, special

from tarch.errors import DomainError, MomentDivergentError, QuadratureError

__all__ = [
    "EPSABS",
    "EPSREL",
    "InnovationModel",
    "Gaussian",
    "StudentT",
    "Laplace",
    "PointMass",
    "gaussian",
]

EPSABS = 1e-10
EPSREL = 1e-12
_LIMIT = 400
# breakpoints (in |eta| units, offset from the lower limit) for the split
# integration; keeps narrow peaks of high-order integrands from being missed
_SPLITS = (1.0, 4.0, 12.0, 40.0)


def _quad(func, lo, hi):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(
                func, lo, hi, epsabs=EPSABS, epsrel=EPSREL, limit=_LIMIT
            )
        except integrate.IntegrationWarning as exc:
            # QUADPACK flags roundoff even when the estimate is fine; re-run
            # quietly and judge the error estimate ourselves
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                val, err = integrate.quad(
                    func, lo, hi, epsabs=EPSABS, epsrel=EPSREL, limit=_LIMIT
                )
            if not np.isfinite(val) or err > 1e3 * max(EPSABS, 1e-9 * abs(val)):
                raise QuadratureError(
                    f"quadrature on [{lo}, {hi}] failed: {exc}"
                ) from None
    if not np.isfinite(val):
        raise QuadratureError(f"quadrature on [{lo}, {hi}] returned {val}")
    return val, err


class InnovationModel:
    """Law of the innovation ``eta_t``.

    Subclasses supply :meth:`sample` and :meth:`abs_pdf` (the density of
    ``|eta|``).  ``max_order`` is the supremum of ``q`` for which
    ``E eta**(2q)`` is finite.
    """

    name = "abstract"
    max_order = math.inf

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def abs_pdf(self, u):
        raise NotImplementedError

    def sample_sq(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """``n`` i.i.d. draws of ``eta**2``."""
        eta = self.sample(rng, n)
        return eta * eta

    def density_sq(self, y):
        """Density of ``eta**2`` at ``y > 0``."""
        y = np.asarray(y, dtype=float)
        root = np.sqrt(y)
        with np.errstate(divide="ignore"):
            return self.abs_pdf(root) / (2.0 * root)

    def _check_order(self, q):
        if q < 0:
            raise DomainError(f"moment order must be nonnegative, got {q}")
        if q >= self.max_order:
            raise MomentDivergentError(
                f"E eta^(2*{q}) is infinite for {self.name} "
                f"(finite only below order {self.max_order})"
            )

    def expect(self, func, c: float = 0.0) -> float:
        """``E[func(eta**2) 1{eta**2 > c}]`` by adaptive quadrature.

        *func* must accept a float ``y >= 0``.
        """
        if c < 0:
            raise DomainError(f"cutoff must be nonnegative, got {c}")
        if math.isinf(c):
            return 0.0
        lo = math.sqrt(c)

        def integrand(u):
            return func(u * u) * self.abs_pdf(u)

        total = 0.0
        edges = [lo] + [lo + s for s in _SPLITS]
        for a, b in zip(edges[:-1], edges[1:]):
            total += _quad(integrand, a, b)[0]
        total += _quad(integrand, edges[-1], math.inf)[0]
        return total

    def even_moment(self, q: float) -> float:
        """``E eta**(2q)``."""
        self._check_order(q)
        if q == 0:
            return 1.0
        return self.expect(lambda y: y**q)

    def log_even_moment(self, q: float) -> float:
        """``log E eta**(2q)``; overridden where overflow is a concern."""
        return math.log(self.even_moment(q))

    def truncated_even_moment(self, q: float, c: float) -> float:
        """``E[eta**(2q) 1{eta**2 > c}]``."""
        self._check_order(q)
        if c == 0:
            return self.even_moment(q)
        if q == 0:
            return self.expect(lambda y: 1.0, c)
        return self.expect(lambda y: y**q, c)

    def tail_prob(self, c: float) -> float:
        """``P(eta**2 > c)``."""
        if c == 0:
            return 1.0
        return self.truncated_even_moment(0.0, c)

    def log_moment(self) -> float:
        """``E log eta**2``."""
        return self.expect(math.log)

    def __repr__(self):
        return f"{type(self).__name__}()"


class Gaussian(InnovationModel):
    """Standard normal innovations; ``eta**2`` is chi-square(1)."""

    name = "gaussian"
    _norm = math.sqrt(2.0 / math.pi)

    def sample(self, rng, n):
        return rng.standard_normal(n)

    def abs_pdf(self, u):
        return self._norm * np.exp(-0.5 * u * u)

    @staticmethod
    def exact_even_moment(m: int) -> int:
        """``(2m)! / (2**m m!)`` as an exact integer."""
        return math.factorial(2 * m) // (2**m * math.factorial(m))

    def even_moment(self, q):
        self._check_order(q)
        if float(q).is_integer():
            return float(self.exact_even_moment(int(q)))
        return super().even_moment(q)

    def log_even_moment(self, q):
        if float(q).is_integer():
            self._check_order(q)
            return math.log(self.exact_even_moment(int(q)))
        return super().log_even_moment(q)

    def tail_prob(self, c):
        if c < 0:
            raise DomainError(f"cutoff must be nonnegative, got {c}")
        if c == 0:
            return 1.0
        # complementary chi-square(1) CDF, exact in closed form
        return float(special.erfc(math.sqrt(c / 2.0)))


class StudentT(InnovationModel):
    """Student-t innovations rescaled to unit variance (``nu > 2``)."""

    name = "student_t"

    def __init__(self, nu: float):
        if not nu > 2:
            raise DomainError(f"Student-t needs nu > 2 for unit variance, got {nu}")
        self.nu = float(nu)
        self.scale = math.sqrt((nu - 2.0) / nu)
        self.max_order = nu / 2.0
        self._logc = (
            special.gammaln((nu + 1) / 2)
            - special.gammaln(nu / 2)
            - 0.5 * math.log(nu * math.pi)
        )

    def sample(self, rng, n):
        return rng.standard_t(self.nu, n) * self.scale

    def log_even_moment(self, q):
        self._check_order(q)
        nu = self.nu
        return (
            q * math.log(nu * self.scale**2)
            + special.gammaln(q + 0.5)
            + special.gammaln(nu / 2 - q)
            - special.gammaln(0.5)
            - special.gammaln(nu / 2)
        )

    def abs_pdf(self, u):
        x = u / self.scale
        logpdf = self._logc - 0.5 * (self.nu + 1) * np.log1p(x * x / self.nu)
        return 2.0 * np.exp(logpdf) / self.scale

    def __repr__(self):
        return f"StudentT(nu={self.nu:g})"


class Laplace(InnovationModel):
    """Laplace innovations rescaled to unit variance."""

    name = "laplace"
    _b = 1.0 / math.sqrt(2.0)

    def sample(self, rng, n):
        return rng.laplace(0.0, self._b, n)

    def log_even_moment(self, q):
        self._check_order(q)
        return special.gammaln(2 * q + 1) + 2 * q * math.log(self._b)

    def abs_pdf(self, u):
        return np.exp(-u / self._b) / self._b


class PointMass(InnovationModel):
    """Degenerate ``eta**2 = 1`` (random sign): the deterministic skeleton.

    Violates the positive-density assumption on purpose; only used as a test
    double and for deterministic dynamics.
    """

    name = "point_mass"

    def sample(self, rng, n):
        return np.where(rng.random(n) < 0.5, -1.0, 1.0)

    def abs_pdf(self, u):
        raise DomainError("eta**2 = 1 has no density")

    def density_sq(self, y):
        raise DomainError("eta**2 = 1 has no density")

    def expect(self, func, c=0.0):
        if c < 0:
            raise DomainError(f"cutoff must be nonnegative, got {c}")
        return float(func(1.0)) if 1.0 > c else 0.0

    def even_moment(self, q):
        self._check_order(q)
        return 1.0

    def log_moment(self):
        return 0.0


gaussian = Gaussian()

MODELS = {
    "gaussian": lambda: gaussian,
    "laplace": Laplace,
    "point_mass": PointMass,
}


def get_model(name: str, nu: float | None = None) -> InnovationModel:
    """Look up a model by name; ``student_t`` needs *nu*."""
    if name == "student_t":
        if nu is None:
            raise DomainError("student_t requires nu")
        return StudentT(nu)
    try:
        return MODELS[name]()
    except KeyError:
        raise DomainError(f"unknown innovation model {name!r}") from None
