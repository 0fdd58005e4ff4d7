"""
phi-Lyapunov certificates for the diffusion L = Laplacian - grad V . grad.

A certificate (W, phi, b, R) witnesses LW <= -phi(W) + b 1_{|x| <= R}. The
weights of the weighted and converse Poincare/Cheeger inequalities are read
off a verified certificate by ``derive_weight``.

:copyright: (c) 2025 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy import linalg

from heavytail_ineq import const
from heavytail_ineq.errors import (
    CertificateError,
    ConverseConditionError,
    MonotonicityError,
    ParameterError,
    PolarSingularityError,
    RatioConditionError,
)
from heavytail_ineq.measures import Measure1D, PhiFunction, RadialMeasure, _like_input

_LOG = logging.getLogger(__name__)

Measure = Measure1D | RadialMeasure


@dataclass(frozen=True)
class RadialFunction:
    """r -> W(r) with first and second derivative evaluators (vectorized)."""

    value: Callable
    first: Callable
    second: Callable
    label: str = "custom"

    def __call__(self, r):
        return _like_input(r, self.value(np.asarray(r, dtype=float)))

    def d1(self, r):
        return _like_input(r, self.first(np.asarray(r, dtype=float)))

    def d2(self, r):
        return _like_input(r, self.second(np.asarray(r, dtype=float)))

    @classmethod
    def constant(cls, c: float = 1.0) -> "RadialFunction":
        return cls(
            value=lambda r: np.full_like(r, c),
            first=np.zeros_like,
            second=np.zeros_like,
            label=f"const({c:g})",
        )

    @classmethod
    def power(cls, k: float) -> "RadialFunction":
        return cls(
            value=lambda r: np.power(r, k),
            first=lambda r: k * np.power(r, k - 1.0),
            second=lambda r: k * (k - 1.0) * np.power(r, k - 2.0),
            label=f"r^{k:g}",
        )

    @classmethod
    def exp_power(cls, gamma: float, p: float) -> "RadialFunction":
        """exp(gamma r^p)."""

        def first(r):
            return gamma * p * np.power(r, p - 1.0) * np.exp(gamma * np.power(r, p))

        def second(r):
            lead = gamma * p * np.power(r, p - 1.0)
            return (gamma * p * (p - 1.0) * np.power(r, p - 2.0) + lead * lead) * np.exp(gamma * np.power(r, p))

        return cls(value=lambda r: np.exp(gamma * np.power(r, p)), first=first, second=second,
                   label=f"exp({gamma:g} r^{p:g})")

    @classmethod
    def exp_potential(cls, potential: PhiFunction, gamma: float) -> "RadialFunction":
        """exp(gamma V(r))."""

        def first(r):
            return gamma * potential.d1(r) * np.exp(gamma * potential(r))

        def second(r):
            d1 = potential.d1(r)
            return (gamma * potential.d2(r) + gamma * gamma * d1 * d1) * np.exp(gamma * potential(r))

        return cls(value=lambda r: np.exp(gamma * potential(r)), first=first, second=second,
                   label=f"exp({gamma:g} {potential.label})")

    @classmethod
    def vq_branch(cls, a: float) -> "RadialFunction":
        """(2 + r)^2 log^a(2 + r)."""

        def value(r):
            y = 2.0 + r
            return y * y * np.power(np.log(y), a)

        def first(r):
            y = 2.0 + r
            log_y = np.log(y)
            return y * np.power(log_y, a - 1.0) * (2.0 * log_y + a)

        def second(r):
            log_y = np.log(2.0 + r)
            return np.power(log_y, a - 2.0) * (2.0 * log_y * log_y + 3.0 * a * log_y + a * (a - 1.0))

        return cls(value=value, first=first, second=second, label=f"(2+r)^2 log^{a:g}(2+r)")

    @classmethod
    def glued(cls, branch: "RadialFunction", r_join: float) -> "RadialFunction":
        """1 + a r^2 + b r^4 on [0, r_join), ``branch`` beyond.

        Value and slope match at r_join; the core is even in r, so the result
        is smooth at the origin in every dimension.
        """
        w_join = float(branch(r_join))
        slope = float(branch.d1(r_join))
        span = r_join * r_join
        b = (slope / (2.0 * r_join) - (w_join - 1.0) / span) / span
        a = (w_join - 1.0) / span - b * span
        if w_join < 1.0 or a < 0.0 or a + 2.0 * b * span < 0.0:
            raise CertificateError(f"cannot glue {branch.label} at r={r_join:g} while keeping W >= 1 increasing")

        def piecewise(inner: Callable, outer: Callable) -> Callable:
            def evaluate(r):
                ra = np.asarray(r, dtype=float)
                with np.errstate(all="ignore"):
                    outside = outer(np.maximum(ra, r_join))
                return np.where(ra < r_join, inner(ra), outside)

            return evaluate

        return cls(
            value=piecewise(lambda r: 1.0 + a * r**2 + b * r**4, branch.value),
            first=piecewise(lambda r: 2.0 * a * r + 4.0 * b * r**3, branch.first),
            second=piecewise(lambda r: 2.0 * a + 12.0 * b * r**2, branch.second),
            label=f"{branch.label} glued at {r_join:g}",
        )


@dataclass(frozen=True)
class DriftRate:
    """The increasing rate u -> phi(u) of a drift condition."""

    value: Callable
    derivative: Callable
    label: str = "custom"

    def __call__(self, u):
        return _like_input(u, self.value(np.asarray(u, dtype=float)))

    def d1(self, u):
        return _like_input(u, self.derivative(np.asarray(u, dtype=float)))

    def scaled(self, factor: float) -> "DriftRate":
        return DriftRate(lambda u: factor * self.value(u), lambda u: factor * self.derivative(u),
                         f"{factor:g}*{self.label}")

    @classmethod
    def power(cls, c: float, e: float) -> "DriftRate":
        return cls(lambda u: c * np.power(u, e), lambda u: c * e * np.power(u, e - 1.0), f"{c:g}u^{e:g}")

    @classmethod
    def log_power(cls, kappa: float, e: float, c: float) -> "DriftRate":
        """kappa u log^e(c + u)."""

        def derivative(u):
            log_term = np.log(c + u)
            return kappa * np.power(log_term, e - 1.0) * (log_term + e * u / (c + u))

        return cls(lambda u: kappa * u * np.power(np.log(c + u), e), derivative, f"{kappa:.4g}u log^{e:.4g}({c:.4g}+u)")

    @classmethod
    def log_only(cls, kappa: float, e: float) -> "DriftRate":
        """kappa log^e(2 + u)."""
        return cls(
            lambda u: kappa * np.power(np.log(2.0 + u), e),
            lambda u: kappa * e * np.power(np.log(2.0 + u), e - 1.0) / (2.0 + u),
            f"{kappa:.4g}log^{e:.4g}(2+u)",
        )


@dataclass
class LyapunovCertificate:
    """W >= 1 and increasing phi with LW <= -phi(W) + b on the ball of radius R."""

    W: RadialFunction
    phi: DriftRate
    b: float
    radius: float
    measure: Measure
    provenance: str = "custom"
    parameters: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.b < 0 or self.radius < 0:
            raise CertificateError("b and R must be non-negative")
        r = np.linspace(0.0, max(2.0 * self.radius, 10.0), 512)
        w = np.asarray(self.W(r))
        if np.any(~np.isfinite(w)) or np.min(w) < 1.0 - 1e-12:
            raise CertificateError(f"W = {self.W.label} drops below 1")
        u = np.geomspace(1.0, 1e6, 256)
        phi_u = np.asarray(self.phi(u))
        if np.any(~(phi_u > 0.0)) or np.any(np.diff(phi_u) <= 0.0):
            raise MonotonicityError(f"phi = {self.phi.label} must be positive and increasing on [1, 1e6]")

    @property
    def dimension(self) -> int:
        return self.measure.dimension

    def to_dict(self) -> dict[str, Any]:
        return {
            "family": self.provenance,
            "parameters": dict(self.parameters),
            "W": self.W.label,
            "phi": self.phi.label,
            "b": self.b,
            "R": self.radius,
            "dimension": self.dimension,
            "measure": self.measure.label,
        }


@dataclass(frozen=True)
class DriftReport:
    passed: bool
    max_violation: float
    sup_inside: float
    sup_outside: float
    tightest_b: float
    r_min: float
    r_max: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "max_violation": self.max_violation,
            "sup_inside": self.sup_inside,
            "sup_outside": self.sup_outside,
            "tightest_b": self.tightest_b,
            "verification_range": [self.r_min, self.r_max],
        }


def apply_generator(m: Measure, W: RadialFunction, x):
    """LW at x for radial W: W'' + (n-1)/r W' - V'(r) W'."""
    r = np.abs(np.asarray(x, dtype=float))
    n = m.dimension
    if n >= 2 and np.any(r == 0.0):
        raise PolarSingularityError("radial generator is singular at the origin for n >= 2")
    w1 = np.asarray(W.d1(r))
    with np.errstate(invalid="ignore", divide="ignore"):
        drift_term = np.where(w1 == 0.0, 0.0, np.asarray(m.radial_drift(r)) * w1)
        out = np.asarray(W.d2(r)) - drift_term
        if n >= 2:
            out = out + (n - 1) * w1 / r
    return _like_input(x, out)


def _excess(m: Measure, W: RadialFunction, phi: DriftRate, r: np.ndarray) -> np.ndarray:
    return np.asarray(apply_generator(m, W, r)) + np.asarray(phi(W(r)))


def _verification_grid(n: int, r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if n >= 2:
        r = np.where(r == 0.0, 1e-9, r)
    return r


def _scan_b(m: Measure, W: RadialFunction, phi: DriftRate, radius: float) -> float:
    r = _verification_grid(m.dimension, np.linspace(0.0, radius, const.DRIFT_SCAN_POINTS))
    sup = float(np.max(_excess(m, W, phi, r)))
    return const.B_SAFETY * max(sup, 0.0) + 1e-9


def _scan_outer_radius(m: Measure, W: RadialFunction, phi: DriftRate, r_start: float, r_end: float) -> float:
    """Smallest grid radius beyond which the drift excess stays non-positive."""
    r = np.geomspace(r_start, r_end, 2000)
    with np.errstate(over="ignore", invalid="ignore"):
        excess = _excess(m, W, phi, r)
    finite = np.isfinite(excess)
    positive = np.nonzero(finite & (excess > 0.0))[0]
    if positive.size == 0:
        return r_start
    last = int(positive[-1])
    if last + 1 >= r.size:
        raise CertificateError(f"drift excess still positive at r={r_end:g}")
    return float(r[last + 1])


def verify_drift(cert: LyapunovCertificate, grid=None, r_max: float = 100.0, points: int = 4001) -> DriftReport:
    """Grid check of LW + phi(W) <= b on the ball and <= 0 outside it."""
    r = np.linspace(0.0, r_max, points) if grid is None else np.asarray(grid, dtype=float)
    r = _verification_grid(cert.dimension, r)
    excess = _excess(cert.measure, cert.W, cert.phi, r)
    tol = const.DRIFT_TOL * (1.0 + np.abs(np.asarray(cert.phi(cert.W(r)))))
    inside = r <= cert.radius
    allowed = np.where(inside, cert.b, 0.0) + tol
    over = excess - allowed
    sup_inside = float(np.max(excess[inside])) if np.any(inside) else -math.inf
    sup_outside = float(np.max(excess[~inside])) if np.any(~inside) else -math.inf
    worst = float(np.max(over))
    report = DriftReport(
        passed=bool(np.all(np.isfinite(excess)) and worst <= 0.0),
        max_violation=max(worst, 0.0),
        sup_inside=sup_inside,
        sup_outside=sup_outside,
        tightest_b=max(sup_inside, 0.0) if np.isfinite(sup_inside) else 0.0,
        r_min=float(r[0]),
        r_max=float(r[-1]),
    )
    _LOG.info("[%s] drift check on [%g, %g]: passed=%s violation=%.3g", cert.provenance, report.r_min,
              report.r_max, report.passed, report.max_violation)
    return report


def cauchy_certificate(n: int, alpha: float) -> LyapunovCertificate:
    """W = r^k outside radius 2 with k = 2 + min(1, alpha)/2 and phi(u) = c u^{(k-2)/k}."""
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    if int(n) != n or n < 1:
        raise ParameterError(f"dimension must be a positive integer, got {n}")
    m = RadialMeasure.cauchy(n, alpha)
    low = min(1.0, alpha)
    k = 2.0 + 0.5 * low
    gamma = 0.25 * low
    # 1/(1+r) <= eps makes k + n eps - 2 - alpha (1 - eps) <= -gamma
    eps = (2.0 + alpha - k - gamma) / (n + alpha)
    if eps <= 0:
        raise CertificateError(f"no admissible epsilon for n={n}, alpha={alpha}")
    radius = max(const.CAUCHY_JOIN_RADIUS, 1.0 / eps - 1.0)
    c = k * gamma
    W = RadialFunction.glued(RadialFunction.power(k), const.CAUCHY_JOIN_RADIUS)
    phi = DriftRate.power(c, (k - 2.0) / k)
    b = _scan_b(m, W, phi, radius)
    _LOG.info("[cauchy] n=%d alpha=%g: k=%.4g gamma=%.4g eps=%.4g R=%.4g b=%.4g", n, alpha, k, gamma, eps, radius, b)
    return LyapunovCertificate(
        W, phi, b, radius, m, "cauchy",
        {"n": n, "alpha": alpha, "k": k, "gamma": gamma, "epsilon": eps, "c": c},
    )


def subexp_certificate(n: int, p: float) -> LyapunovCertificate:
    """W = exp(r^p / 2) outside radius 1 and phi(u) = kappa u log^{2(p-1)/p}(c + u)."""
    if not 0 < p < 1:
        raise ParameterError(f"p must lie in (0,1), got {p}")
    if int(n) != n or n < 1:
        raise ParameterError(f"dimension must be a positive integer, got {n}")
    m = RadialMeasure.subexponential(n, p)
    gamma = const.SUBEXP_GAMMA
    e = 2.0 * (p - 1.0) / p
    c = math.exp(-e)  # log(c + u) >= -e keeps phi increasing
    kappa = const.SUBEXP_PHI_SCALE * gamma * (1.0 - gamma) * p * p * gamma ** (-e)
    W = RadialFunction.glued(RadialFunction.exp_power(gamma, p), const.SUBEXP_JOIN_RADIUS)
    phi = DriftRate.log_power(kappa, e, c)
    r_end = (const.LOG_W_CAP / gamma) ** (1.0 / p)
    radius = _scan_outer_radius(m, W, phi, const.SUBEXP_JOIN_RADIUS, min(r_end, 1e6))
    radius = max(radius, ((1.0 - p) / (gamma * p)) ** (1.0 / p))  # W convex beyond this radius
    b = _scan_b(m, W, phi, radius)
    _LOG.info("[subexp] n=%d p=%g: kappa=%.4g c=%.4g R=%.4g b=%.4g", n, p, kappa, c, radius, b)
    return LyapunovCertificate(
        W, phi, b, radius, m, "subexp",
        {"n": n, "p": p, "gamma": gamma, "kappa": kappa, "c": c},
    )


def exp_potential_certificate(potential: PhiFunction, gamma: float, x_tail: float = 1e6) -> LyapunovCertificate:
    """W = exp(gamma V) on the line, phi(W) = (gamma - gamma^2) V'^2 W where W is one-to-one."""
    if not 0 < gamma < 1:
        raise ParameterError(f"gamma must lie in (0,1), got {gamma}")
    m = Measure1D.phi_measure(potential)
    x = np.geomspace(1e-3, x_tail, 800)
    d1 = np.asarray(potential.d1(x))
    d2 = np.asarray(potential.d2(x))
    if np.any(d1[x >= 1.0] <= 0.0):
        raise CertificateError(f"V = {potential.label} must be increasing away from the origin")
    ratio_limit = float(np.mean((d2 / (d1 * d1))[-5:]))
    if not ratio_limit > -0.5 + const.RATIO_LIMIT_MARGIN:
        raise RatioConditionError(f"V''/V'^2 tends to {ratio_limit:.4g}, not above -1/2")
    growth = 2.0 * d2 + gamma * d1 * d1
    if growth[-1] <= 0.0:
        raise MonotonicityError(f"2V'' + gamma V'^2 is not positive at infinity for gamma={gamma:g}")
    bad = np.nonzero(growth <= 0.0)[0]
    x_a = max(1.0, float(x[bad[-1] + 1])) if bad.size else 1.0
    concave = np.nonzero(d2 > 0.0)[0]
    x_c = float(x[concave[-1] + 1]) if concave.size and concave[-1] + 1 < x.size else 0.0
    radius = max(x_a, x_c)

    W = RadialFunction.exp_potential(potential, gamma)
    u_a = float(W(x_a))
    d1_a, d2_a = float(potential.d1(x_a)), float(potential.d2(x_a))
    phi_a = (gamma - gamma * gamma) * d1_a * d1_a * u_a
    rho = (2.0 * d2_a + gamma * d1_a * d1_a) / (gamma * d1_a * d1_a)

    def locate(u: float) -> float:
        return potential.inv(math.log(u) / gamma)

    def value(u):
        ua = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.empty_like(ua)
        for i, ui in enumerate(ua):
            if ui >= u_a:
                xi = locate(ui)
                out[i] = (gamma - gamma * gamma) * float(potential.d1(xi)) ** 2 * ui
            else:
                out[i] = phi_a * (ui / u_a) ** rho
        return out.reshape(np.shape(u))

    def derivative(u):
        ua = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.empty_like(ua)
        for i, ui in enumerate(ua):
            if ui >= u_a:
                xi = locate(ui)
                g1 = float(potential.d1(xi))
                out[i] = (1.0 - gamma) * (2.0 * float(potential.d2(xi)) + gamma * g1 * g1)
            else:
                out[i] = rho * phi_a * (ui / u_a) ** rho / ui
        return out.reshape(np.shape(u))

    phi = DriftRate(value, derivative, f"({gamma:g}-{gamma:g}^2)V'^2 W")
    b = _scan_b(m, W, phi, radius)
    _LOG.info("[exp-potential] V=%s gamma=%g: x_a=%.4g R=%.4g b=%.4g", potential.label, gamma, x_a, radius, b)
    return LyapunovCertificate(
        W, phi, b, radius, m, "exp-potential",
        {"V": potential.label, "gamma": gamma, "ratio_limit": ratio_limit, "x_a": x_a},
    )


def vq_certificate(q: float, a: float) -> LyapunovCertificate:
    """W = (2+|x|)^2 log^a(2+|x|) for the vq law, phi proportional to log^{a-1}(2+u), 1 < a < q."""
    if not 1.0 < a < q:
        raise ParameterError(f"need 1 < a < q, got a={a}, q={q}")
    m = Measure1D.vq(q)
    kappa = const.SUBEXP_PHI_SCALE * 2.0 * (q - a) / 2.0 ** (a - 1.0)
    W = RadialFunction.glued(RadialFunction.vq_branch(a), 1.0)
    phi = DriftRate.log_only(kappa, a - 1.0)
    radius = _scan_outer_radius(m, W, phi, 1.0, 1e12)
    b = _scan_b(m, W, phi, radius)
    _LOG.info("[vq] q=%g a=%g: kappa=%.4g R=%.4g b=%.4g", q, a, kappa, radius, b)
    return LyapunovCertificate(W, phi, b, radius, m, "vq", {"q": q, "a": a, "kappa": kappa})


class ConditionKind(str, enum.Enum):
    CONVEX = "convex"
    BOUNDED = "bounded"


@dataclass(frozen=True)
class ConverseCondition:
    kind: ConditionKind
    delta: float
    inside_sup: float


def converse_cheeger_condition(cert: LyapunovCertificate, grid=None, r_max: float = 100.0) -> ConverseCondition:
    """Which sufficient condition of the converse Cheeger theorem the certificate meets.

    Gamma(W, Gamma(W)) = 2 W'^2 W'' for radial W.
    """
    r_hi = max(r_max, 2.0 * cert.radius)
    r = np.linspace(cert.radius, r_hi, 4001) if grid is None else np.asarray(grid, dtype=float)
    r = _verification_grid(cert.dimension, r)
    outside = r > cert.radius
    if not np.any(outside):
        raise ParameterError("converse condition grid has no point outside K")
    ro = r[outside]
    w1 = np.asarray(cert.W.d1(ro))
    w2 = np.asarray(cert.W.d2(ro))
    gamma2 = 2.0 * w1 * w1 * w2

    core = _verification_grid(cert.dimension, np.linspace(0.0, cert.radius, 512))
    c1 = np.asarray(cert.W.d1(core))
    inside_sup = float(np.max(np.abs(2.0 * c1 * c1 * np.asarray(cert.W.d2(core))) / (2.0 * (1.0 + c1 * c1) ** 1.5)))

    scale = float(np.max(np.abs(gamma2))) if gamma2.size else 0.0
    if np.min(gamma2) >= -const.DRIFT_TOL * max(scale, 1.0):
        return ConverseCondition(ConditionKind.CONVEX, 0.0, inside_sup)
    phi_w = np.asarray(cert.phi(cert.W(ro)))
    delta = float(np.max(np.abs(gamma2) / (2.0 * phi_w * (1.0 + w1 * w1))))
    if delta < 1.0:
        return ConverseCondition(ConditionKind.BOUNDED, delta, inside_sup)
    raise ConverseConditionError(f"Gamma(W, Gamma W) changes sign and needs delta = {delta:.4g} >= 1")


class WeightKind(str, enum.Enum):
    WEIGHTED_POINCARE = "weighted-poincare"
    WEIGHTED_CHEEGER = "weighted-cheeger"
    CHEEGER_POINCARE = "cheeger-poincare"
    CONVERSE_POINCARE = "converse-poincare"
    CONVERSE_CHEEGER = "converse-cheeger"


@dataclass(frozen=True)
class WeightFunction:
    evaluator: Callable
    kind: WeightKind
    prefactor: float
    kappa_u: float
    provenance: str

    def __call__(self, x):
        r = np.abs(np.asarray(x, dtype=float))
        return _like_input(x, self.evaluator(r))


def estimate_local_poincare(log_density: Callable, radius: float, cells: int = const.LOCAL_POINCARE_CELLS) -> float:
    """Poincare constant of the law restricted to [-radius, radius].

    P1 finite elements give an upper estimate of the spectral gap, hence a
    lower estimate of the constant.
    """
    if not radius > 0:
        raise ParameterError(f"radius must be positive, got {radius}")
    nodes = np.linspace(-radius, radius, cells + 1)
    h = nodes[1] - nodes[0]
    mid = 0.5 * (nodes[:-1] + nodes[1:])
    log_w = np.asarray(log_density(np.abs(mid)), dtype=float)
    w = np.exp(log_w - np.max(log_w))
    size = cells + 1
    stiffness = np.zeros((size, size))
    mass = np.zeros((size, size))
    idx = np.arange(cells)
    np.add.at(stiffness, (idx, idx), w / h)
    np.add.at(stiffness, (idx + 1, idx + 1), w / h)
    np.add.at(stiffness, (idx, idx + 1), -w / h)
    np.add.at(stiffness, (idx + 1, idx), -w / h)
    np.add.at(mass, (idx, idx), w * h / 3.0)
    np.add.at(mass, (idx + 1, idx + 1), w * h / 3.0)
    np.add.at(mass, (idx, idx + 1), w * h / 6.0)
    np.add.at(mass, (idx + 1, idx), w * h / 6.0)
    eigenvalues = linalg.eigh(stiffness, mass, eigvals_only=True, subset_by_index=[0, 1])
    gap = float(eigenvalues[1])
    _LOG.debug("local Poincare on [-%g, %g]: gap %.6g", radius, radius, gap)
    return 1.0 / gap


def _default_kappa_u(cert: LyapunovCertificate) -> float:
    radius = max(cert.radius, 1.0)
    if isinstance(cert.measure, Measure1D):
        m = cert.measure
        return estimate_local_poincare(lambda r: -np.asarray(m.potential(r)), radius)
    _LOG.warning("[%s] kappa_U defaulted from the one-dimensional section in dimension %d",
                 cert.provenance, cert.dimension)
    return estimate_local_poincare(cert.measure.log_h, radius)


def derive_weight(cert: LyapunovCertificate, kind: WeightKind | str, kappa_u: float | None = None) -> WeightFunction:
    """Weight and constant prefactor read off a certificate."""
    kind = WeightKind(kind)
    estimated = kappa_u is None
    kappa = _default_kappa_u(cert) if estimated else float(kappa_u)
    W, phi, b = cert.W, cert.phi, cert.b
    base = max(b * kappa / float(phi(1.0)), 1.0)

    if kind is WeightKind.WEIGHTED_POINCARE:
        prefactor = base

        def evaluator(r):
            return 1.0 + 1.0 / np.asarray(phi.d1(W(r)))
    elif kind is WeightKind.WEIGHTED_CHEEGER:
        prefactor = base

        def evaluator(r):
            return 1.0 + np.abs(np.asarray(W.d1(r))) / np.asarray(phi(W(r)))
    elif kind is WeightKind.CHEEGER_POINCARE:
        prefactor = 8.0 * base * base

        def evaluator(r):
            return 1.0 + (np.asarray(W.d1(r)) / np.asarray(phi(W(r)))) ** 2
    elif kind is WeightKind.CONVERSE_POINCARE:
        prefactor = 1.0 + b * kappa

        def evaluator(r):
            return np.asarray(phi(W(r))) / np.asarray(W(r))
    else:
        condition = converse_cheeger_condition(cert)
        prefactor = (1.0 + (condition.inside_sup + b) * kappa) / (1.0 - condition.delta)

        def evaluator(r):
            return np.asarray(phi(W(r))) / np.hypot(1.0, np.asarray(W.d1(r)))

    note = "estimated lower bound" if estimated else "caller supplied"
    provenance = f"{kind.value} from {cert.provenance} certificate, kappa_U={kappa:.6g} ({note})"
    return WeightFunction(evaluator, kind, prefactor, kappa, provenance)


def fit_growth_exponent(fn: Callable, r_lo: float, r_hi: float, points: int = 64) -> float:
    """Slope of log fn(r) against log r on [r_lo, r_hi]."""
    r = np.geomspace(r_lo, r_hi, points)
    values = np.asarray(fn(r), dtype=float)
    if np.any(~np.isfinite(values)) or np.any(values <= 0.0):
        raise ParameterError("growth fit needs finite positive values")
    slope, _ = np.polyfit(np.log(r), np.log(values), 1)
    return float(slope)


def growth_window(cert: LyapunovCertificate, r_lo: float = 1e3, r_hi: float = 1e5) -> tuple[float, float]:
    """Largest [r_lo, r] inside [r_lo, r_hi] on which log W stays below the overflow cap."""
    r = np.geomspace(r_lo, r_hi, 400)
    with np.errstate(over="ignore"):
        log_w = np.log(np.asarray(cert.W(r)))
    ok = np.isfinite(log_w) & (log_w <= const.LOG_W_CAP)
    if not ok[0]:
        raise ParameterError(f"W overflows already at r={r_lo:g}")
    upper = r[np.nonzero(ok)[0][-1]]
    return r_lo, float(upper)
