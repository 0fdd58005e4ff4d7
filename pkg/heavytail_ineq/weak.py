"""
Weak Cheeger and weak Poincare rates.

Rates come either from a converse inequality with weight omega, through the
tail quantile G of omega, or from the product-transport theorem for mu^n
built on a DHR base law.

:copyright: (c) 2025 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from heavytail_ineq import const
from heavytail_ineq.duality import RateFunction
from heavytail_ineq.errors import DomainError, HypothesisError, InfiniteRateError, ParameterError
from heavytail_ineq.isoperimetry import dhr_check, iso_J, phi_regularity
from heavytail_ineq.measures import Measure1D, PhiFunction

_LOG = logging.getLogger(__name__)


@dataclass
class WeightTailQuantile:
    """F(u) = mu(omega < u) and its generalized inverse G for an even weight omega(|x|)."""

    weight: Callable
    measure: Measure1D
    r_max: float = 1e12
    points: int = 2000
    _radii: np.ndarray = field(init=False, repr=False)
    _values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self._radii = np.concatenate(([0.0], np.geomspace(1e-6, self.r_max, self.points)))
        self._values = np.asarray(self.weight(self._radii), dtype=float)
        if np.any(self._values < 0.0) or np.any(~np.isfinite(self._values)):
            raise ParameterError("weight must be finite and non-negative")

    @cached_property
    def mean(self) -> float:
        """Integral of omega against mu."""
        return self.measure.expectation(lambda x: float(self.weight(abs(x))))

    def _crossing(self, i: int, u: float) -> float:
        a, b = self._radii[i], self._radii[i + 1]
        return float(optimize.brentq(lambda r: float(self.weight(r)) - u, a, b, xtol=1e-14 * max(b, 1.0)))

    def F(self, u: float) -> float:
        """Mass of {omega < u}, from crossings of the level u on the radial grid."""
        inside = (self._values < u).astype(int)
        if not inside.any():
            return 0.0
        edges = np.diff(np.concatenate(([0], inside, [0])))
        starts = np.nonzero(edges == 1)[0]
        stops = np.nonzero(edges == -1)[0] - 1
        last = self._radii.size - 1
        mass = 0.0
        for i, j in zip(starts, stops):
            a = 0.0 if i == 0 else self._crossing(i - 1, u)
            upper_tail = 0.0 if j == last else self.measure.tail(self._crossing(j, u))
            lower_tail = 0.5 if a == 0.0 else self.measure.tail(a)
            mass += 2.0 * (lower_tail - upper_tail)
        return min(max(mass, 0.0), 1.0)

    def G(self, s: float) -> float:
        """inf{u : F(u) > s} by bisection in u."""
        if not 0.0 < s < 1.0:
            raise DomainError(f"quantile level must lie in (0,1), got {s}")
        lo, hi = 0.0, float(np.max(self._values)) * (1.0 + 1e-12) + 1e-300
        while hi - lo > const.G_BISECTION_TOL * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if self.F(mid) > s:
                hi = mid
            else:
                lo = mid
        if hi <= 2.0 * const.G_BISECTION_TOL:
            raise InfiniteRateError(f"G({s:g}) = 0: the weight vanishes on a set of mass above {s:g}")
        return hi


def weak_rate_from_converse(C: float, quantile: WeightTailQuantile, s: float, kind: str = "cheeger") -> float:
    """beta(s) = C / G(s) from a converse inequality with constant C."""
    upper = 0.5 if kind == "cheeger" else 0.25
    if kind not in ("cheeger", "poincare"):
        raise ParameterError(f"kind must be 'cheeger' or 'poincare', got {kind!r}")
    if not 0.0 < s < upper:
        raise DomainError(f"s must lie in (0, {upper:g}) for the weak {kind} rate, got {s}")
    if not math.isfinite(quantile.mean):
        raise ParameterError("the weight must be integrable")
    return C / quantile.G(s)


def weak_rate_function(C: float, quantile: WeightTailQuantile, kind: str = "cheeger") -> RateFunction:
    return RateFunction(lambda s: weak_rate_from_converse(C, quantile, s, kind), label=f"{C:g}/G(s)")


@dataclass(frozen=True)
class ProductBoundSpec:
    """mu^n over a DHR base law, with the product-transport constants."""

    base: Measure1D
    n: int
    kappa_1: float = const.KAPPA_1
    kappa_2: float = const.KAPPA_2

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"dimension must be a positive integer, got {self.n}")
        check = dhr_check(self.base, np.linspace(0.0, 50.0, 201))
        if not check:
            raise HypothesisError(f"{self.base.label} is not DHR (worst second difference {check.worst:.3g})")

    @property
    def relevance_cutoff(self) -> float:
        """Above this s the weak Cheeger bound is vacuous."""
        return 1.0 / (self.kappa_2 * self.n)

    def J(self, s):
        return iso_J(self.base, s)


@dataclass(frozen=True)
class WeakCoefficients:
    gradient: float
    oscillation: float
    vacuous: bool = False


def product_weak_cheeger(spec: ProductBoundSpec, s: float) -> WeakCoefficients:
    """(kappa_1 s / J(s), kappa_2 n s)."""
    if not 0.0 < s < 0.5:
        raise DomainError(f"s must lie in (0, 1/2), got {s}")
    vacuous = s > spec.relevance_cutoff
    if vacuous:
        _LOG.debug("[%s] s=%g above the relevance cutoff %.6g", spec.base.label, s, spec.relevance_cutoff)
    return WeakCoefficients(spec.kappa_1 * s / spec.J(s), spec.kappa_2 * spec.n * s, vacuous)


def _iso_scale(spec: ProductBoundSpec, t: float, divisor: float) -> float:
    if not 0.0 < t < 1.0:
        raise DomainError(f"t must lie in (0,1), got {t}")
    return spec.n * spec.kappa_2 / spec.kappa_1 * spec.J(min(t, 1.0 - t) / (divisor * spec.n * spec.kappa_2))


def product_iso_lower(spec: ProductBoundSpec, t: float) -> float:
    """(n kappa_2/kappa_1) J(min(t,1-t) / (2 n kappa_2))."""
    return _iso_scale(spec, t, 2.0)


def product_iso_upper(spec: ProductBoundSpec, t: float) -> float:
    """Upper companion (n kappa_2/kappa_1) J(min(t,1-t) / (n kappa_2))."""
    return _iso_scale(spec, t, 1.0)


def product_iso_phi(phi: PhiFunction, n: int, t: float, theta: float | None = None,
                    x_range: tuple[float, float] = (1.0, 1e6)) -> float:
    """Shape min(t,1-t) Phi'(Phi^{-1}(log(n/min(t,1-t)))) of the product profile."""
    if not 0.0 < t < 1.0:
        raise DomainError(f"t must lie in (0,1), got {t}")
    if not float(phi(0.0)) < math.log(2.0):
        raise DomainError(f"Phi(0) must be below log 2, got {float(phi(0.0)):g}")
    if theta is not None:
        phi_regularity(phi, theta, x_range)
    u = min(t, 1.0 - t)
    return u * float(phi.d1(phi.inv(math.log(n / u))))


def weak_poincare_from_weak_cheeger(rate: RateFunction, s: float) -> tuple[float, float]:
    """(4 beta(s/2)^2, s)."""
    if not 0.0 < s < 0.25:
        raise DomainError(f"s must lie in (0, 1/4), got {s}")
    b = rate(0.5 * s)
    return 4.0 * b * b, s


def product_weak_poincare(spec: ProductBoundSpec, s: float) -> tuple[float, float]:
    """(kappa_1^2 s^2 / J(s/2)^2, 2 kappa_2 n s)."""
    if not 0.0 < s < 0.5:
        raise DomainError(f"s must lie in (0, 1/2), got {s}")
    ratio = s / spec.J(0.5 * s)
    return spec.kappa_1**2 * ratio * ratio, 2.0 * spec.kappa_2 * spec.n * s


def product_weak_cheeger_rate(spec: ProductBoundSpec) -> RateFunction:
    """sigma -> kappa_1 (sigma/kappa_2 n) / J(sigma/kappa_2 n), oscillation coefficient sigma."""
    scale = spec.kappa_2 * spec.n

    def beta(sigma: float) -> float:
        s = sigma / scale
        return spec.kappa_1 * s / spec.J(s)

    return RateFunction(beta, label=f"product[{spec.base.label}, n={spec.n}]")


def product_weak_poincare_rate(spec: ProductBoundSpec, sigma: float) -> float:
    """Energy coefficient of the weak Poincare inequality of mu^n with oscillation coefficient sigma."""
    energy, _ = weak_poincare_from_weak_cheeger(product_weak_cheeger_rate(spec), sigma)
    return energy


@dataclass(frozen=True)
class FittedConstant:
    """A scalar fitted in log space; ``spread`` is the max/min ratio over the fit."""

    value: float
    spread: float
    provenance: str = const.PROVENANCE_FITTED


def fit_scale(values: Sequence[float], shape: Sequence[float]) -> FittedConstant:
    """Least-squares c in log(values) ~ log(c) + log(shape)."""
    v = np.asarray(values, dtype=float)
    g = np.asarray(shape, dtype=float)
    if v.shape != g.shape or v.size == 0:
        raise ParameterError("values and shape must be non-empty and of equal length")
    if np.any(v <= 0.0) or np.any(g <= 0.0):
        raise ParameterError("fit_scale needs positive values and shape")
    log_ratio = np.log(v) - np.log(g)
    return FittedConstant(float(np.exp(np.mean(log_ratio))), float(np.exp(np.ptp(log_ratio))))


def cube_ball_measure(m: Measure1D, n: int, t: float) -> float:
    """mu^n of the sup-norm ball of radius t: (1 - 2 tail(t))^n."""
    if t < 0:
        raise DomainError(f"radius must be non-negative, got {t}")
    if t == 0.0:
        return 0.0
    return math.exp(n * math.log1p(-2.0 * m.tail(t)))
