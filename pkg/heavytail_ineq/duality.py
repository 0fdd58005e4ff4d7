"""
Duality between weak Cheeger rates and isoperimetric functions.

beta(s) = sup_{s <= t <= 1/2} (t - s) / I(t) and
I(t) = sup_{0 < s <= t} (t - s) / beta(s).

:copyright: (c) 2025 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from heavytail_ineq import const
from heavytail_ineq.errors import DomainError, DualityError
from heavytail_ineq.isoperimetry import ProfileFunction, ProfileKind

_LOG = logging.getLogger(__name__)


@dataclass(frozen=True)
class RateFunction:
    """A rate s -> beta(s) on (0, 1/2)."""

    evaluator: Callable
    non_increasing: bool = True
    vectorized: bool = False
    label: str = ""

    def __call__(self, s):
        sa = np.asarray(s, dtype=float)
        if np.any((sa <= 0.0) | (sa > 0.5)) or np.any(np.isnan(sa)):
            raise DomainError("rate argument must lie in (0, 1/2]")
        if np.ndim(s) == 0:
            return float(self.evaluator(float(s)))
        if self.vectorized:
            return np.asarray(self.evaluator(sa), dtype=float)
        return np.vectorize(lambda v: float(self.evaluator(v)), otypes=[float])(sa)

    @classmethod
    def constant(cls, c: float) -> "RateFunction":
        return cls(lambda s: np.full_like(np.asarray(s, dtype=float), c), vectorized=True, label=f"const({c:g})")


def grid_supremum(objective: Callable[[np.ndarray], np.ndarray], scalar: Callable[[float], float],
                  lo: float, hi: float, points: int) -> float:
    grid = np.geomspace(lo, hi, points)
    values = objective(grid)
    k = int(np.argmax(values))
    best = float(values[k])
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, points - 1)]
    if b > a:
        res = optimize.minimize_scalar(
            lambda x: -scalar(x), bounds=(a, b), method="bounded", options={"xatol": 1e-14 * max(b, 1.0)}
        )
        if res.success:
            best = max(best, float(-res.fun))
    return best


def beta_from_profile(profile: ProfileFunction, s: float, points: int = const.DUALITY_GRID_POINTS) -> float:
    """sup over t in [s, 1/2] of (t - s)/I(t)."""
    if not 0.0 < s < 0.5:
        raise DomainError(f"s must lie in (0, 1/2), got {s}")
    lo = max(s, const.DUALITY_CLIP)
    hi = 0.5 - const.DUALITY_CLIP
    if lo >= hi:
        return 0.0

    def objective(t: np.ndarray) -> np.ndarray:
        values = np.asarray(profile(t), dtype=float)
        if np.any(~np.isfinite(values)) or np.any(values <= 0.0):
            raise DualityError(f"profile {profile.label or profile.kind.value} vanishes on [{lo:g}, {hi:g}]")
        return (t - s) / values

    return grid_supremum(objective, lambda t: (t - s) / profile(t), lo, hi, points)


def profile_from_beta(rate: RateFunction, t: float, points: int = const.DUALITY_GRID_POINTS) -> float:
    """sup over s in (0, t] of (t - s)/beta(s)."""
    if not 0.0 < t <= 0.5:
        raise DomainError(f"t must lie in (0, 1/2], got {t}")
    lo = const.DUALITY_CLIP
    # beta is identically zero within one clip of 1/2
    hi = min(t, 0.5 - 2.0 * const.DUALITY_CLIP)
    if hi <= lo:
        return 0.0

    def objective(s: np.ndarray) -> np.ndarray:
        values = np.asarray(rate(s), dtype=float)
        if np.any(~np.isfinite(values)) or np.any(values <= 0.0):
            raise DualityError(f"rate {rate.label} vanishes on [{lo:g}, {hi:g}]")
        return (t - s) / values

    return grid_supremum(objective, lambda s: (t - s) / rate(s), lo, hi, points)


def rate_from_profile(profile: ProfileFunction, points: int = const.DUALITY_GRID_POINTS) -> RateFunction:
    return RateFunction(lambda s: beta_from_profile(profile, s, points), label=f"beta[{profile.label}]")


def profile_from_rate(rate: RateFunction, points: int = const.DUALITY_GRID_POINTS) -> ProfileFunction:
    return ProfileFunction(
        lambda t: profile_from_beta(rate, min(t, 1.0 - t), points), ProfileKind.I, label=f"I[{rate.label}]"
    )
