"""
Isoperimetric profiles of symmetric measures on the line.

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
from heavytail_ineq.errors import DomainError, ParameterError, RegularityError
from heavytail_ineq.measures import Family, Measure1D, PhiFunction

_LOG = logging.getLogger(__name__)


class ProfileKind(str, enum.Enum):
    J = "J"
    I = "I"  # noqa: E741
    LOWER_BOUND = "lower-bound"
    L_PHI = "L_Phi"


def _check_unit(t) -> None:
    ta = np.asarray(t, dtype=float)
    if np.any((ta <= 0.0) | (ta >= 1.0)) or np.any(np.isnan(ta)):
        raise DomainError("profile argument must lie in (0,1)")


@dataclass(frozen=True)
class ProfileFunction:
    """A map t -> value on (0,1).

    ``vectorized`` evaluators receive whole arrays; the others are looped.
    """

    evaluator: Callable
    kind: ProfileKind
    symmetric: bool = True
    vectorized: bool = False
    label: str = ""

    def __call__(self, t):
        _check_unit(t)
        if np.ndim(t) == 0:
            return float(self.evaluator(float(t)))
        ta = np.asarray(t, dtype=float)
        if self.vectorized:
            return np.asarray(self.evaluator(ta), dtype=float)
        return np.vectorize(lambda v: float(self.evaluator(v)), otypes=[float])(ta)


@dataclass(frozen=True)
class ShapeCheck:
    """Outcome of a grid shape test; truthy when it passed."""

    passed: bool
    worst: float
    tolerance: float

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True)
class PhiRegularityReport:
    c1: float
    c2: float
    c3: float
    c4: float
    theta: float
    x_min: float
    x_max: float


def _closed_J(m: Measure1D, s):
    if m.family is Family.CAUCHY:
        a = m.alpha
        return a * 2.0 ** (1.0 / a) * np.power(s, 1.0 + 1.0 / a)
    return np.asarray(s, dtype=float)


def iso_J(m: Measure1D, t):
    """J(t) = density(quantile(t)), evaluated on the lower half by symmetry."""
    _check_unit(t)
    s = np.minimum(t, 1.0 - np.asarray(t, dtype=float))
    if m.has_closed_tail:
        out = _closed_J(m, s)
        return float(out) if np.ndim(t) == 0 else np.asarray(out, dtype=float)
    if np.ndim(t) == 0:
        return float(m.density(m.tail_inverse(float(s))))
    return np.vectorize(lambda v: float(m.density(m.tail_inverse(v))), otypes=[float])(s)


def iso_I_even(m: Measure1D, t):
    """Exact profile of an even law: min(J(t), 2 J(min(t,1-t)/2))."""
    _check_unit(t)
    s = np.minimum(t, 1.0 - np.asarray(t, dtype=float))
    out = np.minimum(iso_J(m, t), 2.0 * np.asarray(iso_J(m, 0.5 * s)))
    return float(out) if np.ndim(t) == 0 else out


def profile_J(m: Measure1D) -> ProfileFunction:
    return ProfileFunction(lambda t: iso_J(m, t), ProfileKind.J, vectorized=True, label=f"J[{m.label}]")


def profile_I(m: Measure1D) -> ProfileFunction:
    return ProfileFunction(lambda t: iso_I_even(m, t), ProfileKind.I, vectorized=True, label=f"I[{m.label}]")


def second_differences(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    slopes = np.diff(y) / np.diff(x)
    return np.diff(slopes) * 0.5 * (x[2:] - x[:-2])


def dhr_check(m: Measure1D, grid) -> ShapeCheck:
    """Convexity of log of the tail on ``grid``."""
    x = np.asarray(grid, dtype=float)
    if x.size < 3 or np.any(np.diff(x) <= 0) or x[0] < 0:
        raise ParameterError("DHR grid needs at least 3 increasing points in [0, inf)")
    log_tail = np.array([m.log_tail(float(r)) for r in x])
    second = second_differences(x, log_tail)
    scale = max(1.0, float(np.max(np.abs(log_tail))))
    tol = const.DHR_REL_TOL * scale
    if not m.has_closed_tail:
        tol = max(tol, 8.0 * m.quadrature.rel_tol)
    worst = float(np.min(second))
    passed = worst >= -tol
    _LOG.debug("[%s] DHR check worst second difference %.3g (tol %.3g)", m.label, worst, tol)
    return ShapeCheck(passed, worst, tol)


def slope_monotonicity_check(m: Measure1D, grid) -> ShapeCheck:
    """t / J_mu(t) must be non-increasing on a grid inside (0, 1/2]."""
    t = np.asarray(grid, dtype=float)
    if t.size < 2 or np.any(np.diff(t) <= 0) or t[0] <= 0 or t[-1] > 0.5:
        raise ParameterError("slope grid must be increasing inside (0, 1/2]")
    ratio = t / np.asarray(iso_J(m, t))
    tol = const.SLOPE_REL_TOL * float(np.max(ratio))
    worst = float(np.max(np.diff(ratio)))
    return ShapeCheck(worst <= tol, worst, tol)


def phi_asymptotic_ratio(phi: PhiFunction, t: float, m: Measure1D | None = None) -> float:
    """J_mu(t) / (t Phi'(Phi^{-1}(log 1/t))) for mu proportional to exp(-Phi(|x|))."""
    if not 0.0 < t < 0.5:
        raise DomainError(f"asymptotic ratio is taken for t in (0, 1/2), got {t}")
    measure = m if m is not None else Measure1D.phi_measure(phi)
    level = math.log(1.0 / t)
    denominator = t * float(phi.d1(phi.inv(level)))
    return iso_J(measure, t) / denominator


def l_phi(phi: PhiFunction) -> ProfileFunction:
    """L_Phi(t) = min(t,1-t) Phi'(Phi^{-1}(log(1/min(t,1-t))))."""
    if not float(phi(0.0)) < math.log(2.0):
        raise DomainError(f"L_Phi needs Phi(0) < log 2, got {float(phi(0.0)):g}")

    def evaluate(t: float) -> float:
        s = min(t, 1.0 - t)
        return s * float(phi.d1(phi.inv(math.log(1.0 / s))))

    return ProfileFunction(evaluate, ProfileKind.L_PHI, label=f"L[{phi.label}]")


def phi_sandwich_constants(m: Measure1D, phi: PhiFunction, grid) -> tuple[float, float]:
    """Fitted (k1, k2) with k1 L_Phi <= J_mu <= k2 L_Phi on ``grid``."""
    t = np.asarray(grid, dtype=float)
    ratio = np.asarray(iso_J(m, t)) / l_phi(phi)(t)
    return float(np.min(ratio)), float(np.max(ratio))


def phi_regularity(phi: PhiFunction, theta: float, x_range: tuple[float, float],
                   points: int = const.REGULARITY_GRID_POINTS) -> PhiRegularityReport:
    """Grid estimates of the four regularity constants of Phi on ``x_range``.

    Estimates are kept inside the open ranges c1, c3 > 1 and c2 < 1 by
    ``const.REGULARITY_SLACK``.
    """
    x_min, x_max = float(x_range[0]), float(x_range[1])
    if not 0 < x_min < x_max:
        raise ParameterError(f"x_range must satisfy 0 < x_min < x_max, got {x_range}")
    if not theta > 1:
        raise ParameterError(f"theta must exceed 1, got {theta}")
    x = np.geomspace(x_min, x_max, points)
    val = np.asarray(phi(x))
    d1 = np.asarray(phi.d1(x))
    if np.any(val <= 0) or np.any(d1 <= 0):
        raise RegularityError("i", "Phi and Phi' must be positive on the range")
    ratio = val / (x * d1)
    c1 = max(1.0 + const.REGULARITY_SLACK, float(np.max(np.maximum(ratio, 1.0 / ratio))))

    above = x > 1.0
    if not np.any(above):
        raise RegularityError("ii", "the range must extend beyond x = 1")
    log_x = np.log(x[above])
    c2_raw = float(np.min(np.log(val[above]) / log_x))
    if c2_raw <= 0:
        raise RegularityError("ii", f"Phi(x) >= x^c2 needs c2 > 0, best is {c2_raw:.4g}")
    c3 = max(1.0 + const.REGULARITY_SLACK, float(np.max(-np.log(d1[above]) / log_x)))

    half = 0.5 * val
    base = float(phi(0.0))
    if np.any(half <= base):
        raise RegularityError("iv", "Phi(x)/2 falls below Phi(0) on the range")
    c4 = float(min(phi.inv(h) / xi for h, xi in zip(half, x)))
    if not 0 < c4 < 1:
        raise RegularityError("iv", f"c4 = {c4:.4g} outside (0,1)")

    powered = np.power(val, theta)
    second = second_differences(x, powered)
    slopes = np.abs(np.diff(powered) / np.diff(x))
    if np.min(second) < -const.DHR_REL_TOL * max(1.0, float(np.max(slopes)) * (x_max - x_min)):
        raise RegularityError("theta", f"Phi^{theta:g} is not convex on [{x_min:g}, {x_max:g}]")

    report = PhiRegularityReport(c1, min(c2_raw, 1.0 - const.REGULARITY_SLACK), c3, c4, theta, x_min, x_max)
    _LOG.debug("[%s] regularity constants %s", phi.label, report)
    return report
