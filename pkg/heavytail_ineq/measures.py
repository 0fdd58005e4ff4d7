"""
Symmetric measures on the line and spherically symmetric measures in n-space.

Every downstream integral goes through the quadrature helpers defined here:
``integrate_interval`` wraps QUADPACK with the toolkit's tolerances, and the
tail helpers pick a substitution that keeps heavy tails integrable.

:copyright: (c) 2025 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

import enum
import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Callable, Iterable

import numpy as np
from scipy import integrate, optimize

from heavytail_ineq import const
from heavytail_ineq.errors import BracketError, DomainError, ParameterError, QuadratureError

_LOG = logging.getLogger(__name__)

_TINY = np.finfo(float).tiny


def _like_input(x, y):
    """Return a float for scalar input, an ndarray otherwise."""
    if np.ndim(x) == 0:
        return float(y)
    return np.asarray(y, dtype=float)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances shared by every quadrature call."""

    abs_tol: float = const.QUAD_ABS_TOL
    rel_tol: float = const.QUAD_REL_TOL
    tail_eps: float = const.QUAD_TAIL_EPS
    max_depth: int = const.QUAD_MAX_DEPTH

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0 and self.tail_eps > 0):
            raise ParameterError("quadrature tolerances must be strictly positive")
        if self.max_depth < 1:
            raise ParameterError("quadrature depth must be at least 1")


DEFAULT_QUADRATURE = QuadratureSpec()


def integrate_interval(
    fn: Callable[[float], float],
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    *,
    relative: bool = False,
    points: Iterable[float] | None = None,
) -> float:
    """Adaptive quadrature of ``fn`` over [a, b]; b may be +inf."""
    epsabs = 0.0 if relative else spec.abs_tol
    kwargs = {"epsabs": epsabs, "epsrel": spec.rel_tol, "limit": spec.max_depth, "full_output": 1}
    if points is not None and math.isfinite(b):
        inner = sorted(x for x in points if a < x < b)
        if inner:
            kwargs["points"] = inner
    value, abserr, _info, *message = integrate.quad(fn, a, b, **kwargs)
    if message:
        allowed = 10.0 * max(epsabs, spec.rel_tol * abs(value))
        if not math.isfinite(value) or abserr > allowed:
            raise QuadratureError(
                f"quadrature on [{a:g}, {b:g}] stopped at error {abserr:.3g} (value {value:.6g}): {message[0]}"
            )
        _LOG.debug("quadrature on [%g, %g] accepted with warning: %s", a, b, message[0])
    return float(value)


def integrate_tan_tail(fn: Callable[[float], float], a: float, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                       *, relative: bool = True) -> float:
    """Integral of ``fn`` over [a, inf) through x = a + tan(u)."""

    def substituted(u: float) -> float:
        c = math.cos(u)
        if c <= 0.0:
            return 0.0
        return fn(a + math.tan(u)) / (c * c)

    return integrate_interval(substituted, 0.0, 0.5 * math.pi, spec, relative=relative)


def integrate_tail(fn: Callable[[float], float], a: float, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                   *, relative: bool = True, width: float = 1.0) -> float:
    """Integral of ``fn`` over [a, inf) by dyadic chunks.

    Chunks double in width; integration stops once a chunk contributes less
    than ``tail_eps`` times the running total.
    """
    total = 0.0
    lo = a
    for chunk in range(const.DYADIC_MAX_CHUNKS):
        hi = lo + width
        if not math.isfinite(hi):
            break
        piece = integrate_interval(fn, lo, hi, spec, relative=relative)
        total += piece
        small = abs(piece) <= spec.tail_eps * abs(total)
        if not relative:
            small = small or abs(piece) <= 1e-3 * spec.abs_tol
        if chunk > 0 and small:
            return total
        if total == 0.0 and piece == 0.0 and chunk > 0:
            return 0.0
        lo = hi
        width *= 2.0
    raise QuadratureError(f"tail integral from {a:g} did not settle within {const.DYADIC_MAX_CHUNKS} chunks")


def integrate_half_line(fn: Callable[[float], float], spec: QuadratureSpec = DEFAULT_QUADRATURE, *,
                        heavy: bool = False, knots: Iterable[float] = (), relative: bool = False) -> float:
    """Integral of ``fn`` over [0, inf) split at ``knots``."""
    cuts = sorted({0.0, 1.0, *(float(k) for k in knots if 0.0 < k and math.isfinite(k))})
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        total += integrate_interval(fn, lo, hi, spec, relative=relative)
    tail = integrate_tan_tail if heavy else integrate_tail
    return total + tail(fn, cuts[-1], spec, relative=relative)


def solve_increasing(fn: Callable[[float], float], target: float, *, lo: float = 0.0,
                     label: str = "root") -> float:
    """Solve fn(x) = target for increasing fn on [lo, inf).

    The bracket starts at [lo, lo + 1] and its width doubles until the sign
    changes.
    """
    f_lo = fn(lo) - target
    if f_lo == 0.0:
        return lo
    if f_lo > 0.0:
        raise BracketError(f"{label}: target {target:g} lies below the value at {lo:g}")
    a, width = lo, const.BRACKET_INITIAL
    for _ in range(const.BRACKET_MAX_STEPS):
        b = lo + width
        if not math.isfinite(b):
            break
        if fn(b) - target >= 0.0:
            return float(
                optimize.brentq(lambda x: fn(x) - target, a, b, xtol=const.ROOT_XTOL, rtol=4.0 * np.finfo(float).eps)
            )
        a = b
        width *= const.BRACKET_GROWTH
    raise BracketError(f"{label}: no sign change up to the bracket limit for target {target:g}")


@dataclass(frozen=True)
class PhiFunction:
    """A radial potential r -> Phi(r) on [0, inf) with optional closed forms.

    Missing derivatives fall back to central differences with relative step;
    a missing inverse falls back to bracketed root finding.
    """

    value: Callable
    derivative: Callable | None = None
    second_derivative: Callable | None = None
    inverse: Callable | None = None
    label: str = "custom"

    def __call__(self, x):
        return _like_input(x, self.value(np.asarray(x, dtype=float)))

    def d1(self, x):
        if self.derivative is not None:
            return _like_input(x, self.derivative(np.asarray(x, dtype=float)))
        xa = np.asarray(x, dtype=float)
        h = np.maximum(const.FD_MIN_STEP, const.FD_REL_STEP * np.abs(xa))
        lo = np.maximum(xa - h, 0.0)
        hi = xa + h
        return _like_input(x, (self.value(hi) - self.value(lo)) / (hi - lo))

    def d2(self, x):
        if self.second_derivative is not None:
            return _like_input(x, self.second_derivative(np.asarray(x, dtype=float)))
        xa = np.asarray(x, dtype=float)
        h = np.maximum(1e-4, 1e-4 * np.abs(xa))
        centre = np.maximum(xa, h)
        return _like_input(x, (self.value(centre + h) - 2.0 * self.value(centre) + self.value(centre - h)) / (h * h))

    def inv(self, u: float) -> float:
        if self.inverse is not None:
            return float(self.inverse(float(u)))
        return solve_increasing(lambda r: float(self.value(r)), float(u), label=f"{self.label} inverse")

    @classmethod
    def power(cls, p: float) -> "PhiFunction":
        if p <= 0:
            raise ParameterError(f"power exponent must be positive, got {p}")
        return cls(
            value=lambda x: np.power(x, p),
            derivative=lambda x: p * np.power(x, p - 1.0),
            second_derivative=lambda x: p * (p - 1.0) * np.power(x, p - 2.0),
            inverse=lambda u: u ** (1.0 / p),
            label=f"x^{p:g}",
        )

    @classmethod
    def linear(cls) -> "PhiFunction":
        return cls(
            value=lambda x: np.asarray(x, dtype=float),
            derivative=lambda x: np.ones_like(np.asarray(x, dtype=float)),
            second_derivative=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            inverse=lambda u: u,
            label="x",
        )

    @classmethod
    def power_log(cls, p: float, a: float, gamma: float | None = None) -> "PhiFunction":
        """x^p log(gamma + x)^a, gamma defaulting to exp(2|a|/(p(1-p)))."""
        if not 0 < p < 1:
            raise ParameterError(f"power_log needs p in (0,1), got {p}")
        g = math.exp(2.0 * abs(a) / (p * (1.0 - p))) if gamma is None else gamma
        if g <= 1:
            raise ParameterError(f"power_log offset must exceed 1, got {g}")

        def value(x):
            return np.power(x, p) * np.power(np.log(g + x), a)

        def derivative(x):
            log_term = np.log(g + x)
            return p * np.power(x, p - 1.0) * np.power(log_term, a) + a * np.power(x, p) * np.power(
                log_term, a - 1.0
            ) / (g + x)

        return cls(value=value, derivative=derivative, label=f"x^{p:g}log({g:.4g}+x)^{a:g}")

    @classmethod
    def smoothed_power(cls, p: float) -> "PhiFunction":
        """(1 + x^2)^{p/2}, a smooth stand-in for |x|^p."""
        return cls(
            value=lambda x: np.power(1.0 + np.square(x), 0.5 * p),
            derivative=lambda x: p * x * np.power(1.0 + np.square(x), 0.5 * p - 1.0),
            second_derivative=lambda x: p
            * np.power(1.0 + np.square(x), 0.5 * p - 2.0)
            * (1.0 + (p - 1.0) * np.square(x)),
            inverse=lambda u: math.sqrt(max(u ** (2.0 / p) - 1.0, 0.0)),
            label=f"(1+x^2)^{p / 2:g}",
        )

    @classmethod
    def log_type(cls, c: float) -> "PhiFunction":
        """c log(1 + x^2)."""
        return cls(
            value=lambda x: c * np.log1p(np.square(x)),
            derivative=lambda x: 2.0 * c * x / (1.0 + np.square(x)),
            second_derivative=lambda x: 2.0 * c * (1.0 - np.square(x)) / np.square(1.0 + np.square(x)),
            inverse=lambda u: math.sqrt(math.expm1(u / c)),
            label=f"{c:g}log(1+x^2)",
        )


class Family(str, enum.Enum):
    CAUCHY = "generalized-cauchy"
    CAUCHY_SMOOTH = "generalized-cauchy-smooth"
    SUBEXPONENTIAL = "sub-exponential"
    EXPONENTIAL = "two-sided-exponential"
    PHI = "phi-measure"
    VQ = "vq-measure"


_HEAVY = {Family.CAUCHY, Family.CAUCHY_SMOOTH, Family.VQ}


@dataclass(frozen=True)
class Measure1D:
    """Symmetric law e^{-V(|x|)}/Z on the real line."""

    family: Family
    alpha: float | None = None
    p: float | None = None
    q: float | None = None
    phi: PhiFunction | None = None
    closed_form: bool = True
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE
    label: str = ""

    def __post_init__(self):
        if self.family in (Family.CAUCHY, Family.CAUCHY_SMOOTH):
            if self.alpha is None or not self.alpha > 0:
                raise ParameterError(f"Cauchy family needs alpha > 0, got {self.alpha}")
        elif self.family is Family.SUBEXPONENTIAL:
            if self.p is None or not 0 < self.p <= 1:
                raise ParameterError(f"sub-exponential family needs p in (0,1], got {self.p}")
        elif self.family is Family.VQ:
            if self.q is None or not self.q > 1:
                raise ParameterError(f"vq family needs q > 1, got {self.q}")
        elif self.family is Family.PHI and self.phi is None:
            raise ParameterError("phi-measure needs a PhiFunction")

    @classmethod
    def cauchy(cls, alpha: float, **kwargs) -> "Measure1D":
        return cls(Family.CAUCHY, alpha=alpha, label=f"cauchy(alpha={alpha:g})", **kwargs)

    @classmethod
    def cauchy_smooth(cls, alpha: float, **kwargs) -> "Measure1D":
        return cls(Family.CAUCHY_SMOOTH, alpha=alpha, label=f"cauchy-smooth(alpha={alpha:g})", **kwargs)

    @classmethod
    def subexponential(cls, p: float, **kwargs) -> "Measure1D":
        return cls(Family.SUBEXPONENTIAL, p=p, label=f"subexp(p={p:g})", **kwargs)

    @classmethod
    def exponential(cls, **kwargs) -> "Measure1D":
        return cls(Family.EXPONENTIAL, label="exponential", **kwargs)

    @classmethod
    def phi_measure(cls, phi: PhiFunction, **kwargs) -> "Measure1D":
        return cls(Family.PHI, phi=phi, label=f"phi({phi.label})", **kwargs)

    @classmethod
    def vq(cls, q: float, **kwargs) -> "Measure1D":
        return cls(Family.VQ, q=q, label=f"vq(q={q:g})", **kwargs)

    def numeric(self) -> "Measure1D":
        """Same law with every closed form disabled."""
        return replace(self, closed_form=False)

    @property
    def dimension(self) -> int:
        return 1

    @property
    def heavy_tailed(self) -> bool:
        return self.family in _HEAVY

    @property
    def has_closed_tail(self) -> bool:
        if not self.closed_form:
            return False
        if self.family in (Family.CAUCHY, Family.EXPONENTIAL):
            return True
        return self.family is Family.SUBEXPONENTIAL and self.p == 1.0

    def potential(self, x):
        """V(|x|), unnormalized."""
        r = np.abs(np.asarray(x, dtype=float))
        if self.family is Family.CAUCHY:
            v = (1.0 + self.alpha) * np.log1p(r)
        elif self.family is Family.CAUCHY_SMOOTH:
            v = 0.5 * (1.0 + self.alpha) * np.log1p(r * r)
        elif self.family is Family.SUBEXPONENTIAL:
            v = np.power(r, self.p)
        elif self.family is Family.EXPONENTIAL:
            v = r
        elif self.family is Family.PHI:
            v = self.phi.value(r)
        else:
            log_term = np.log(2.0 + r)
            v = log_term + self.q * np.log(log_term)
        return _like_input(x, v)

    def radial_drift(self, r):
        """V'(r) for r > 0."""
        ra = np.asarray(r, dtype=float)
        if self.family is Family.CAUCHY:
            d = (1.0 + self.alpha) / (1.0 + ra)
        elif self.family is Family.CAUCHY_SMOOTH:
            d = (1.0 + self.alpha) * ra / (1.0 + ra * ra)
        elif self.family is Family.SUBEXPONENTIAL:
            d = self.p * np.power(ra, self.p - 1.0)
        elif self.family is Family.EXPONENTIAL:
            d = np.ones_like(ra)
        elif self.family is Family.PHI:
            d = self.phi.d1(ra)
        else:
            d = (1.0 + self.q / np.log(2.0 + ra)) / (2.0 + ra)
        return _like_input(r, d)

    def _log_unnormalized_tail(self, r: float) -> float:
        """log of the integral of e^{-V} over [r, inf)."""
        spec = self.quadrature
        if self.family is Family.CAUCHY:
            a = self.alpha
            return math.log(integrate_tan_tail(lambda x: (1.0 + x) ** (-(1.0 + a)), r, spec))
        if self.family is Family.CAUCHY_SMOOTH:
            e = 0.5 * (1.0 + self.alpha)
            return math.log(integrate_tan_tail(lambda x: (1.0 + x * x) ** (-e), r, spec))
        if self.family is Family.SUBEXPONENTIAL:
            p = self.p
            u0 = r**p
            inner = integrate_interval(
                lambda u: u ** (1.0 / p - 1.0) * math.exp(-(u - u0)) / p, u0, math.inf, spec, relative=True
            )
            return -u0 + math.log(inner)
        if self.family is Family.EXPONENTIAL:
            inner = integrate_interval(lambda x: math.exp(-(x - r)), r, math.inf, spec, relative=True)
            return -r + math.log(inner)
        if self.family is Family.VQ:
            q = self.q
            return math.log(integrate_interval(lambda y: y ** (-q), math.log(2.0 + r), math.inf, spec, relative=True))
        v0 = float(self.phi.value(r))
        inner = integrate_tail(lambda x: math.exp(-(float(self.phi.value(x)) - v0)), r, spec)
        return -v0 + math.log(inner)

    @cached_property
    def log_normalizer(self) -> float:
        """log Z with Z the integral of e^{-V} over the line."""
        if self.closed_form:
            if self.family is Family.CAUCHY:
                return math.log(2.0 / self.alpha)
            if self.has_closed_tail:
                return math.log(2.0)
        log_z = math.log(2.0) + self._log_unnormalized_tail(0.0)
        _LOG.debug("[%s] numeric normalizer Z = %.12g", self.label, math.exp(log_z))
        return log_z

    @property
    def normalizer(self) -> float:
        return math.exp(self.log_normalizer)

    def density(self, x):
        return _like_input(x, np.exp(-np.asarray(self.potential(x)) - self.log_normalizer))

    def log_tail(self, r: float) -> float:
        """log of the tail mass mu((r, inf)) for r >= 0."""
        if r < 0:
            raise DomainError(f"tail is taken at r >= 0, got {r}")
        if self.has_closed_tail:
            if self.family is Family.CAUCHY:
                return -math.log(2.0) - self.alpha * math.log1p(r)
            return -math.log(2.0) - r
        return self._log_unnormalized_tail(r) - self.log_normalizer

    def tail(self, r: float) -> float:
        return math.exp(self.log_tail(r))

    def _cdf_scalar(self, x: float) -> float:
        if x == 0.0:
            return 0.5
        if x > 0.0:
            return 1.0 - self.tail(x)
        return self.tail(-x)

    def cdf(self, x):
        if np.ndim(x) == 0:
            return self._cdf_scalar(float(x))
        return np.vectorize(self._cdf_scalar, otypes=[float])(np.asarray(x, dtype=float))

    def tail_inverse(self, s: float) -> float:
        """r >= 0 with tail(r) = s, for s in (0, 1/2]."""
        if not 0.0 < s <= 0.5:
            raise DomainError(f"tail level must lie in (0, 1/2], got {s}")
        if s == 0.5:
            return 0.0
        if self.has_closed_tail:
            if self.family is Family.CAUCHY:
                return (2.0 * s) ** (-1.0 / self.alpha) - 1.0
            return -math.log(2.0 * s)
        return solve_increasing(lambda r: -self.log_tail(r), -math.log(s), label=f"{self.label} quantile")

    def _quantile_scalar(self, t: float) -> float:
        if not 0.0 < t < 1.0:
            raise DomainError(f"quantile level must lie in (0,1), got {t}")
        if t == 0.5:
            return 0.0
        r = self.tail_inverse(min(t, 1.0 - t))
        return -r if t < 0.5 else r

    def quantile(self, t):
        if np.ndim(t) == 0:
            return self._quantile_scalar(float(t))
        return np.vectorize(self._quantile_scalar, otypes=[float])(np.asarray(t, dtype=float))

    def sample(self, u):
        """Inverse-CDF transform of uniforms ``u``; vectorized for closed forms."""
        if np.ndim(u) == 0 or not self.has_closed_tail:
            return self.quantile(u)
        ua = np.asarray(u, dtype=float)
        if np.any((ua <= 0.0) | (ua >= 1.0)):
            raise DomainError("uniform draws must lie in (0,1)")
        s = np.minimum(ua, 1.0 - ua)
        if self.family is Family.CAUCHY:
            r = np.power(2.0 * s, -1.0 / self.alpha) - 1.0
        else:
            r = -np.log(2.0 * s)
        return np.where(ua < 0.5, -r, r)

    def expectation(self, fn: Callable[[float], float], breakpoints: Iterable[float] = ()) -> float:
        """Integral of fn against the measure, folded onto [0, inf)."""

        def folded(x: float) -> float:
            dens = float(self.density(x))
            if dens == 0.0:
                return 0.0
            return (fn(x) + fn(-x)) * dens

        knots = [abs(b) for b in breakpoints]
        return integrate_half_line(folded, self.quadrature, heavy=self.heavy_tailed, knots=knots)


def _log_unit_ball_volume(n: int) -> float:
    return 0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n + 1.0)


@dataclass(frozen=True)
class RadialMeasure:
    """Spherically symmetric law h(|x|)dx on n-space, given by log h up to a constant."""

    dimension: int
    log_h: Callable[[float], float]
    drift: Callable | None = None
    heavy_tailed: bool = False
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE
    label: str = "radial"

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ParameterError(f"dimension must be a positive integer, got {self.dimension}")

    @classmethod
    def cauchy(cls, n: int, alpha: float, **kwargs) -> "RadialMeasure":
        if not alpha > 0:
            raise ParameterError(f"Cauchy family needs alpha > 0, got {alpha}")
        e = n + alpha
        return cls(
            dimension=n,
            log_h=lambda r: -e * np.log1p(r),
            drift=lambda r: e / (1.0 + np.asarray(r, dtype=float)),
            heavy_tailed=True,
            label=f"cauchy(n={n}, alpha={alpha:g})",
            **kwargs,
        )

    @classmethod
    def subexponential(cls, n: int, p: float, **kwargs) -> "RadialMeasure":
        if not 0 < p <= 1:
            raise ParameterError(f"sub-exponential family needs p in (0,1], got {p}")
        return cls(
            dimension=n,
            log_h=lambda r: -np.power(r, p),
            drift=lambda r: p * np.power(np.asarray(r, dtype=float), p - 1.0),
            label=f"subexp(n={n}, p={p:g})",
            **kwargs,
        )

    @classmethod
    def from_potential(cls, n: int, phi: PhiFunction, **kwargs) -> "RadialMeasure":
        return cls(dimension=n, log_h=lambda r: -phi.value(r), drift=phi.d1, label=f"phi(n={n}, {phi.label})", **kwargs)

    @property
    def log_surface(self) -> float:
        """log(n omega_n), the log surface area of the unit sphere."""
        return math.log(self.dimension) + _log_unit_ball_volume(self.dimension)

    def _log_radial_unnormalized(self, r):
        ra = np.asarray(r, dtype=float)
        out = self.log_surface + np.asarray(self.log_h(ra), dtype=float)
        if self.dimension > 1:
            with np.errstate(divide="ignore"):
                out = out + (self.dimension - 1) * np.log(ra)
        return out

    @cached_property
    def log_normalizer(self) -> float:
        grid = np.geomspace(1e-6, 1e6, 400)
        shift = float(np.max(self._log_radial_unnormalized(grid)))
        mass = integrate_half_line(
            lambda r: math.exp(float(self._log_radial_unnormalized(r)) - shift),
            self.quadrature,
            heavy=self.heavy_tailed,
            relative=True,
        )
        log_z = shift + math.log(mass)
        _LOG.debug("[%s] radial normalizer log Z = %.12g", self.label, log_z)
        return log_z

    def h(self, r):
        return _like_input(r, np.exp(np.asarray(self.log_h(np.asarray(r, dtype=float))) - self.log_normalizer))

    def radial_law(self, r):
        """rho(r) = n omega_n r^{n-1} h(r)."""
        ra = np.asarray(r, dtype=float)
        if np.any(ra < 0):
            raise DomainError("radial law is defined for r >= 0")
        return _like_input(r, np.exp(self._log_radial_unnormalized(ra) - self.log_normalizer))

    def radial_drift(self, r):
        if self.drift is not None:
            return _like_input(r, self.drift(np.asarray(r, dtype=float)))
        ra = np.asarray(r, dtype=float)
        step = np.maximum(const.FD_MIN_STEP, const.FD_REL_STEP * ra)
        lo = np.maximum(ra - step, 0.0)
        slope = (np.asarray(self.log_h(ra + step)) - np.asarray(self.log_h(lo))) / (ra + step - lo)
        return _like_input(r, -slope)
