"""
Weighted Poincare constants for spherically symmetric laws on n-space.

A radial map T(x) = phi(|x|) x/|x| pushes a log-concave spherical law nu onto
mu; Bobkov's constant for nu and the transport weight give the upper bound,
explicit test functions the lower bound.

:copyright: (c) 2025 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

import enum
import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from heavytail_ineq import const
from heavytail_ineq.errors import LogConcavityError, ParameterError, TransportError
from heavytail_ineq.isoperimetry import second_differences
from heavytail_ineq.measures import DEFAULT_QUADRATURE, integrate_half_line
from heavytail_ineq.weighted import InequalityReport

_LOG = logging.getLogger(__name__)


class SphericalFamily(str, enum.Enum):
    CAUCHY = "cauchy"
    SUBEXP = "subexp"


def _check_dimension(n: int) -> None:
    if int(n) != n or n < 1:
        raise ParameterError(f"dimension must be a positive integer, got {n}")


@dataclass(frozen=True)
class RadialTransport:
    """Increasing radial profile phi with phi(0) = 0 and its inverse psi."""

    phi: Callable
    derivative: Callable
    inverse: Callable
    convex: bool = False
    label: str = "custom"

    def __post_init__(self):
        r = np.geomspace(1e-6, 1e3, 400)
        values = np.asarray(self.phi(r), dtype=float)
        if abs(float(self.phi(np.asarray(0.0)))) > 1e-12:
            raise TransportError(f"{self.label}: phi(0) must vanish")
        if np.any(np.diff(values) <= 0.0):
            raise TransportError(f"{self.label}: phi must be increasing")
        if self.convex:
            second = second_differences(r, values)
            if np.min(second) < -const.LOG_CONCAVITY_TOL * max(1.0, float(np.max(np.abs(values)))):
                raise TransportError(f"{self.label}: flagged convex but second differences are negative")

    @classmethod
    def identity(cls) -> "RadialTransport":
        return cls(lambda r: np.asarray(r, dtype=float), lambda r: np.ones_like(np.asarray(r, dtype=float)),
                   lambda r: np.asarray(r, dtype=float), convex=True, label="identity")

    @classmethod
    def cauchy(cls) -> "RadialTransport":
        """phi(r) = e^r - 1, the inverse of psi(r) = log(1 + r)."""
        return cls(np.expm1, np.exp, np.log1p, convex=True, label="expm1")

    @classmethod
    def subexponential(cls, p: float) -> "RadialTransport":
        """phi = psi^{-1} with psi(r) = r^p / p."""
        if not 0 < p <= 1:
            raise ParameterError(f"p must lie in (0,1], got {p}")
        return cls(
            lambda r: np.power(p * np.asarray(r, dtype=float), 1.0 / p),
            lambda r: np.power(p * np.asarray(r, dtype=float), 1.0 / p - 1.0),
            lambda r: np.power(np.asarray(r, dtype=float), p) / p,
            convex=True,
            label=f"inverse of r^{p:g}/{p:g}",
        )


def radial_weight(tr: RadialTransport, r):
    """max(phi'(psi(r)), r / psi(r)); phi'(0) at the origin."""
    ra = np.asarray(r, dtype=float)
    if np.any(ra < 0):
        raise ParameterError("radial weight is defined for r >= 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        inner = np.asarray(tr.inverse(ra), dtype=float)
        if np.any(~np.isfinite(inner)):
            raise TransportError(f"{tr.label}: inverse failed")
        radial = np.asarray(tr.derivative(inner), dtype=float)
        angular = np.where(ra > 0.0, ra / inner, np.asarray(tr.derivative(0.0), dtype=float))
    if tr.convex and np.any(angular > radial * (1.0 + 1e-9) + 1e-12):
        raise TransportError(f"{tr.label}: convex profile but the angular branch dominates")
    out = np.maximum(radial, angular)
    return float(out) if np.ndim(r) == 0 else out


def transported_log_density(family: SphericalFamily | str, n: int, param: float) -> Callable:
    """log of the radial law of nu, the pullback of mu under the radial transport (up to a constant).

    cauchy: (n-1) log(1 - e^{-r}) - alpha r.
    subexp: ((n-p)/p) log(p r) - p r.
    """
    family = SphericalFamily(family)
    _check_dimension(n)
    if family is SphericalFamily.CAUCHY:
        alpha = param
        if not alpha > 0:
            raise ParameterError(f"alpha must be positive, got {alpha}")

        def log_rho(r):
            ra = np.asarray(r, dtype=float)
            with np.errstate(divide="ignore"):
                out = -alpha * ra
                if n > 1:
                    out = out + (n - 1) * np.log(-np.expm1(-ra))
            return out

        return log_rho
    p = param
    if not 0 < p < 1:
        raise ParameterError(f"p must lie in (0,1), got {p}")

    def log_rho(r):
        ra = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return ((n - p) / p) * np.log(p * ra) - p * ra

    return log_rho


def check_log_concave(log_rho: Callable, grid=None) -> float:
    """Largest second difference of log rho on the grid; raises if it is positive beyond tolerance."""
    r = np.geomspace(1e-4, 50.0, 512) if grid is None else np.asarray(grid, dtype=float)
    values = np.asarray(log_rho(r), dtype=float)
    worst = float(np.max(second_differences(r, values)))
    tol = const.LOG_CONCAVITY_TOL * max(1.0, float(np.max(np.abs(values))))
    if worst > tol:
        raise LogConcavityError(f"log rho has second difference {worst:.3g} > {tol:.3g}")
    return worst


def radial_moments(log_rho: Callable) -> tuple[float, float]:
    """First and second moments of the normalized radial law exp(log_rho)."""
    grid = np.geomspace(1e-4, 1e5, 1024)
    values = np.asarray(log_rho(grid), dtype=float)
    peak = int(np.argmax(values))
    shift = float(values[peak])
    mode = float(grid[peak])
    knots = [mode * f for f in (0.5, 0.9, 0.99, 1.01, 1.1, 2.0)]

    def moment(k: int) -> float:
        def integrand(r: float) -> float:
            if r <= 0.0:
                return 0.0
            return r**k * math.exp(float(log_rho(r)) - shift)

        return integrate_half_line(integrand, DEFAULT_QUADRATURE, knots=knots, relative=True)

    mass = moment(0)
    return moment(1) / mass, moment(2) / mass


def bobkov_constant(log_rho: Callable, n: int) -> float:
    """12 Var(r) + E r^2 / n for a log-concave radial law rho."""
    _check_dimension(n)
    check_log_concave(log_rho)
    m1, m2 = radial_moments(log_rho)
    return 12.0 * (m2 - m1 * m1) + m2 / n


def _cauchy_sums(n: int, alpha: float) -> tuple[float, float]:
    """(sum 1/(alpha+k), sum 1/(alpha+k)^2) over k < n."""
    _check_dimension(n)
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    k = np.arange(n, dtype=float)
    return math.fsum(1.0 / (alpha + k)), math.fsum(1.0 / (alpha + k) ** 2)


def cauchy_radial_moments(n: int, alpha: float) -> tuple[float, float]:
    """-H'/H and H''/H for H(alpha) = (n-1)! / prod (alpha + k)."""
    s1, s2 = _cauchy_sums(n, alpha)
    return s1, s1 * s1 + s2


def subexp_radial_moments(n: int, p: float) -> tuple[float, float]:
    """Gamma(n/p, rate p) moments: n/p^2 and n(n+p)/p^4."""
    _check_dimension(n)
    return n / p**2, n * (n + p) / p**4


def cauchy_bounds(n: int, alpha: float) -> tuple[float, float]:
    """(Sigma, 14 Sigma) with Sigma = sum 1/(alpha+k)^2."""
    _, s2 = _cauchy_sums(n, alpha)
    return s2, 14.0 * s2


def subexp_bounds(n: int, p: float) -> tuple[float, float]:
    _check_dimension(n)
    if not 0 < p <= 1:
        raise ParameterError(f"p must lie in (0,1], got {p}")
    lower = n / p**3
    return lower, 12.0 * lower + (n + p) / p**4


def cauchy_sum_bracket(n: int, alpha: float) -> tuple[float, float]:
    """Integral-comparison bracket around Sigma."""
    _check_dimension(n)
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    head = 1.0 / alpha**2
    return (
        head + (n - 1) / ((alpha + 1.0) * (alpha + n)),
        head + (n - 1) / (alpha * (alpha + n - 1.0)),
    )


def cauchy_bobkov_closed_form(n: int, alpha: float) -> float:
    """13 Sigma + (sum 1/(alpha+k))^2 / n, a bound dominating the Bobkov constant of nu."""
    s1, s2 = _cauchy_sums(n, alpha)
    return 13.0 * s2 + s1 * s1 / n


def _log_rising(x: float, n: int) -> float:
    return math.lgamma(x + n) - math.lgamma(x)


def testfn_lower_bound(family: SphericalFamily | str, n: int, param: float, a: float) -> float:
    """Variance quotient of the test function |x|^a-type family at exponent a.

    Evaluated in log space, so large n does not overflow.
    """
    family = SphericalFamily(family)
    _check_dimension(n)
    if not a > 0:
        raise ParameterError(f"a must be positive, got {a}")
    if family is SphericalFamily.CAUCHY:
        alpha = param
        if not alpha > 0:
            raise ParameterError(f"alpha must be positive, got {alpha}")
        d = _log_rising(alpha, n) - 2.0 * _log_rising(alpha + a, n) + _log_rising(alpha + 2.0 * a, n)
        return -math.expm1(d) / (a * a)
    p = param
    if not 0 < p < 1:
        raise ParameterError(f"p must lie in (0,1), got {p}")
    d = (n / p) * (math.log1p(2.0 * a) - 2.0 * math.log1p(a))
    return -math.expm1(d) / (p * p * a * a)


def testfn_limit(family: SphericalFamily | str, n: int, param: float,
                 steps: tuple[float, float] = (1e-2, 1e-3)) -> float:
    """Richardson extrapolation a -> 0 over two exponents ten apart."""
    coarse, fine = steps
    q_coarse = testfn_lower_bound(family, n, param, coarse)
    q_fine = testfn_lower_bound(family, n, param, fine)
    ratio = coarse / fine
    return (ratio * q_fine - q_coarse) / (ratio - 1.0)


def weighted_poincare_report(family: SphericalFamily | str, n: int, param: float) -> InequalityReport:
    """Lower and upper bounds on the weighted Poincare constant of mu."""
    family = SphericalFamily(family)
    log_rho = transported_log_density(family, n, param)
    upper = bobkov_constant(log_rho, n)
    lower = testfn_limit(family, n, param)
    if family is SphericalFamily.CAUCHY:
        weight = "(1+|x|)^2"
        closed = cauchy_bounds(n, param)
        extra = {
            "bobkov_closed_form": cauchy_bobkov_closed_form(n, param),
            "sigma_bracket": cauchy_sum_bracket(n, param),
        }
    else:
        weight = f"|x|^{2.0 * (1.0 - param):g}"
        closed = subexp_bounds(n, param)
        extra = {}
    _LOG.info("[%s] n=%d param=%g: lower %.8g, Bobkov upper %.8g", family.value, n, param, lower, upper)
    return InequalityReport(
        kind="weighted-poincare",
        weight=weight,
        upper=upper,
        upper_provenance="Bobkov spherical constant of the transported law",
        lower=lower,
        lower_provenance="test-function quotient, Richardson in a",
        lower_parameter=0.0,
        metadata={"closed_form_bounds": closed, "provenance": const.PROVENANCE_QUADRATURE, **extra},
    )
