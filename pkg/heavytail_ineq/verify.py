"""
Empirical checks of functional inequalities.

On the line both sides are integrated by quadrature. Product measures are
sampled in independent blocks whose generators are spawned from one master
seed; a Monte Carlo check passes only when the right side beats the left by
``sigma`` standard errors and fails only when the left side wins by as much.

:copyright: (c) 2025 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

import enum
import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np
from scipy import optimize

from heavytail_ineq import const
from heavytail_ineq.config import MonteCarloConfig
from heavytail_ineq.errors import ParameterError
from heavytail_ineq.measures import Measure1D
from heavytail_ineq.weak import ProductBoundSpec, product_iso_lower

_LOG = logging.getLogger(__name__)

ArrayFn = Callable[[np.ndarray], np.ndarray]


class InequalityKind(str, enum.Enum):
    WEIGHTED_POINCARE = "weighted-poincare"
    WEIGHTED_CHEEGER = "weighted-cheeger"
    CONVERSE_POINCARE = "converse-poincare"
    CONVERSE_CHEEGER = "converse-cheeger"
    WEAK_POINCARE = "weak-poincare"
    WEAK_CHEEGER = "weak-cheeger"


class Status(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


def _central_gradient(value: ArrayFn, x: np.ndarray) -> np.ndarray:
    grad = np.empty_like(x)
    for j in range(x.shape[1]):
        h = const.FD_REL_STEP * np.maximum(1.0, np.abs(x[:, j]))
        up, down = x.copy(), x.copy()
        up[:, j] += h
        down[:, j] -= h
        grad[:, j] = (np.asarray(value(up)) - np.asarray(value(down))) / (2.0 * h)
    return grad


@dataclass(frozen=True)
class TestFunction:
    """f on n-space evaluated on arrays of shape (N, n)."""

    __test__ = False

    value: ArrayFn
    gradient: ArrayFn | None = None
    family: str = "custom"
    label: str = ""
    bounds: tuple[float, float] | None = None
    knots: tuple[float, ...] = ()

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.value(np.atleast_2d(np.asarray(x, dtype=float))), dtype=float)

    def grad(self, x) -> np.ndarray:
        xa = np.atleast_2d(np.asarray(x, dtype=float))
        if self.gradient is None:
            return _central_gradient(self.value, xa)
        return np.asarray(self.gradient(xa), dtype=float).reshape(xa.shape)

    def oscillation(self, values: np.ndarray | None = None) -> float:
        if self.bounds is not None:
            return self.bounds[1] - self.bounds[0]
        if values is None:
            raise ParameterError(f"{self.label}: oscillation needs bounds or sampled values")
        return float(np.ptp(values))

    def check_gradient(self, points: np.ndarray) -> float:
        """Worst relative gap between the closed-form gradient and central differences."""
        xa = np.atleast_2d(np.asarray(points, dtype=float))
        exact = self.grad(xa)
        numeric = _central_gradient(self.value, xa)
        scale = np.maximum(np.maximum(np.abs(exact), np.abs(numeric)), 1e-6)
        worst = float(np.max(np.abs(exact - numeric) / scale))
        if worst > const.GRADIENT_CHECK_RTOL:
            raise ParameterError(f"{self.label}: gradient disagrees with central differences ({worst:.3g})")
        return worst


def coordinate(i: int = 0, scale: float = 1.0) -> TestFunction:
    """scale * arctan(x_i / scale)."""

    def value(x):
        return scale * np.arctan(x[:, i] / scale)

    def gradient(x):
        g = np.zeros_like(x)
        g[:, i] = 1.0 / (1.0 + (x[:, i] / scale) ** 2)
        return g

    half = 0.5 * math.pi * scale
    return TestFunction(value, gradient, "coordinate", f"arctan(x{i}/{scale:g})", (-half, half))


def radial_bump(center: Sequence[float] | float, width: float) -> TestFunction:
    c = np.atleast_1d(np.asarray(center, dtype=float))

    def value(x):
        d = x - c
        return np.exp(-0.5 * np.sum(d * d, axis=1) / width**2)

    def gradient(x):
        d = x - c
        return -d / width**2 * value(x)[:, None]

    label = f"bump(c={np.array2string(c, precision=3)}, w={width:g})"
    offset = float(np.linalg.norm(c))
    knots = tuple(v for v in (offset - 3.0 * width, offset, offset + 3.0 * width) if v > 0.0)
    return TestFunction(value, gradient, "radial-bump", label, (0.0, 1.0), knots)


def truncated_exponential_witness(m: Measure1D, radius: float, i: int = 0, core: float = 1.0) -> TestFunction:
    """sign(x_i) e^{V(|x_i|)/2} on [core, radius], linear inside, constant beyond."""
    if not radius > core:
        raise ParameterError(f"witness radius {radius} must exceed the core {core}")
    psi_core = math.exp(0.5 * float(m.potential(core)))
    psi_top = math.exp(0.5 * float(m.potential(radius)))

    def value(x):
        xi = x[:, i]
        r = np.abs(xi)
        rc = np.clip(r, core, radius)
        outer = np.sign(xi) * np.exp(0.5 * np.asarray(m.potential(rc)))
        return np.where(r <= core, xi * psi_core / core, outer)

    def gradient(x):
        xi = x[:, i]
        r = np.abs(xi)
        rc = np.clip(r, core, radius)
        middle = 0.5 * np.asarray(m.radial_drift(rc)) * np.exp(0.5 * np.asarray(m.potential(rc)))
        g = np.zeros_like(x)
        g[:, i] = np.where(r <= core, psi_core / core, np.where(r <= radius, middle, 0.0))
        return g

    return TestFunction(value, gradient, "truncated-exponential-witness", f"witness(R={radius:g})",
                        (-psi_top, psi_top), (core, float(radius)))


def random_feature(rng: np.random.Generator, n: int, bandwidth: float = 1.0, window: float = 10.0) -> TestFunction:
    """cos(w.x + b) exp(-|x|^2 / (2 window^2)) with w ~ N(0, 1/bandwidth^2)."""
    w = rng.normal(0.0, 1.0 / bandwidth, size=n)
    b = float(rng.uniform(0.0, 2.0 * math.pi))

    def envelope(x):
        return np.exp(-0.5 * np.sum(x * x, axis=1) / window**2)

    def value(x):
        return np.cos(x @ w + b) * envelope(x)

    def gradient(x):
        phase = x @ w + b
        env = envelope(x)
        return (-np.sin(phase)[:, None] * w[None, :] - np.cos(phase)[:, None] * x / window**2) * env[:, None]

    knots = tuple(0.5 * window * k for k in range(1, 9))
    return TestFunction(value, gradient, "random-feature", f"feature(b={b:.3f})", (-1.0, 1.0), knots)


def power_decay(a: float) -> TestFunction:
    """(1 + |x|)^{-a}."""
    if not a > 0:
        raise ParameterError(f"decay exponent must be positive, got {a}")

    def value(x):
        return np.power(1.0 + np.linalg.norm(x, axis=1), -a)

    def gradient(x):
        r = np.linalg.norm(x, axis=1)
        scale = -a * np.power(1.0 + r, -a - 1.0)
        with np.errstate(invalid="ignore", divide="ignore"):
            unit = np.where(r[:, None] > 0.0, x / r[:, None], 0.0)
        return scale[:, None] * unit

    return TestFunction(value, gradient, "power-decay", f"(1+|x|)^-{a:g}", (0.0, 1.0))


def witness_suite(m: Measure1D, n: int = 1, count: int = 50, seed: int = 0) -> list[TestFunction]:
    """A mixed family of ``count`` witnesses, the optimality witnesses first."""
    rng = np.random.default_rng(seed)
    suite = [power_decay(a) for a in np.geomspace(1e-2, 2.0, 12)]
    suite += [truncated_exponential_witness(m, R) for R in np.geomspace(2.0, 200.0, 10)]
    for c in np.linspace(-5.0, 5.0, 6):
        center = np.zeros(n)
        center[0] = c
        suite += [radial_bump(center, w) for w in (0.5, 2.0)]
    suite += [coordinate(0, s) for s in np.geomspace(0.3, 30.0, 8)]
    while len(suite) < count:
        suite.append(random_feature(rng, n, bandwidth=float(rng.uniform(0.5, 3.0))))
    return suite[:count]


@dataclass
class CheckResult:
    inequality: str
    functions: int
    worst_ratio: float
    status: Status
    engine: str
    worst_function: str = ""
    tolerance: float = 0.0
    samples: int | None = None
    seed: int | None = None
    blocks: int | None = None

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    def to_dict(self) -> dict[str, Any]:
        return {
            "inequality": self.inequality,
            "functions": self.functions,
            "worst_ratio": self.worst_ratio,
            "status": self.status.value,
            "engine": self.engine,
            "worst_function": self.worst_function,
            "tolerance": self.tolerance,
            "samples": self.samples,
            "seed": self.seed,
            "blocks": self.blocks,
            "provenance": const.PROVENANCE_MC if self.engine == "MC" else const.PROVENANCE_QUADRATURE,
        }


class _QuadratureEngine:
    name = "quadrature"

    def __init__(self, m: Measure1D):
        self.m = m

    def mean(self, h: ArrayFn, f: TestFunction) -> np.ndarray:
        def scalar(x: float) -> float:
            return float(h(np.array([[x]]))[0])

        return np.array([self.m.expectation(scalar, f.knots)])

    def argmin_abs(self, f: TestFunction, weight: ArrayFn) -> float:
        if f.bounds is None:
            raise ParameterError(f"{f.label}: the infimum over c needs bounds")
        lo, hi = f.bounds

        def objective(c: float) -> float:
            return float(self.mean(lambda x: np.abs(f(x) - c) * weight(x), f)[0])

        res = optimize.minimize_scalar(objective, bounds=(lo, hi), method="bounded",
                                       options={"xatol": const.GOLDEN_TOL * max(1.0, hi - lo)})
        return float(res.x)

    def oscillation(self, f: TestFunction) -> float:
        return f.oscillation()


class _MonteCarloEngine:
    name = "MC"

    def __init__(self, base: Measure1D, n: int, mc: MonteCarloConfig):
        self.mc = mc
        size = mc.samples // mc.blocks
        self.blocks = []
        for child in np.random.SeedSequence(mc.seed).spawn(mc.blocks):
            rng = np.random.default_rng(child)
            u = np.maximum(rng.random((size, n)), np.finfo(float).tiny)
            self.blocks.append(np.asarray(base.sample(u), dtype=float).reshape(size, n))
        self.pooled = np.concatenate(self.blocks)
        _LOG.debug("[%s] drew %d blocks of %d samples in dimension %d", base.label, mc.blocks, size, n)

    def mean(self, h: ArrayFn, f: TestFunction) -> np.ndarray:
        return np.array([float(np.mean(h(x))) for x in self.blocks])

    def argmin_abs(self, f: TestFunction, weight: ArrayFn) -> float:
        """Weighted median of the pooled sample, the exact minimizer of the empirical objective."""
        values = f(self.pooled)
        w = np.asarray(weight(self.pooled), dtype=float)
        order = np.argsort(values)
        cumulative = np.cumsum(w[order])
        k = int(np.searchsorted(cumulative, 0.5 * cumulative[-1]))
        return float(values[order][min(k, values.size - 1)])

    def oscillation(self, f: TestFunction) -> float:
        return f.oscillation(f(self.pooled))


def _radial(weight: Callable | None) -> ArrayFn:
    if weight is None:
        return lambda x: np.ones(x.shape[0])
    return lambda x: np.asarray(weight(np.linalg.norm(x, axis=1)), dtype=float)


def _grad_norm(f: TestFunction) -> ArrayFn:
    return lambda x: np.linalg.norm(f.grad(x), axis=1)


def _sides(kind: InequalityKind, f: TestFunction, engine, constant, weight: ArrayFn, rate, s_grid):
    """(label, lhs per block, rhs per block) for every instance of the inequality."""
    gnorm = _grad_norm(f)
    one = _radial(None)
    if kind in (InequalityKind.WEIGHTED_POINCARE, InequalityKind.WEAK_POINCARE):
        mu = float(np.mean(engine.mean(f, f)))
        lhs = engine.mean(lambda x: (f(x) - mu) ** 2, f)
    elif kind is InequalityKind.CONVERSE_POINCARE:
        c = float(np.mean(engine.mean(lambda x: f(x) * weight(x), f)) / np.mean(engine.mean(weight, f)))
        lhs = engine.mean(lambda x: (f(x) - c) ** 2 * weight(x), f)
    elif kind is InequalityKind.CONVERSE_CHEEGER:
        c = engine.argmin_abs(f, weight)
        lhs = engine.mean(lambda x: np.abs(f(x) - c) * weight(x), f)
    else:
        c = engine.argmin_abs(f, one)
        lhs = engine.mean(lambda x: np.abs(f(x) - c), f)

    if kind is InequalityKind.WEIGHTED_POINCARE:
        return [("", lhs, constant * engine.mean(lambda x: gnorm(x) ** 2 * weight(x), f))]
    if kind is InequalityKind.WEIGHTED_CHEEGER:
        return [("", lhs, constant * engine.mean(lambda x: gnorm(x) * weight(x), f))]
    if kind is InequalityKind.CONVERSE_POINCARE:
        return [("", lhs, constant * engine.mean(lambda x: gnorm(x) ** 2, f))]
    if kind is InequalityKind.CONVERSE_CHEEGER:
        return [("", lhs, constant * engine.mean(gnorm, f))]
    osc = engine.oscillation(f)
    power = 2 if kind is InequalityKind.WEAK_POINCARE else 1
    energy = engine.mean(lambda x: gnorm(x) ** power, f)
    return [(f" s={s:g}", lhs, rate(s) * energy + s * osc**power) for s in s_grid]


def check_inequality(kind: InequalityKind | str, target: Measure1D | ProductBoundSpec,
                     functions: Sequence[TestFunction], *, constant: float | None = None,
                     weight: Callable | None = None, rate: Callable[[float], float] | None = None,
                     s_grid: Sequence[float] = (), mc: MonteCarloConfig | None = None) -> CheckResult:
    """Check one inequality on every test function; ``weight`` is a function of |x|."""
    kind = InequalityKind(kind)
    if not functions:
        raise ParameterError("no test functions supplied")
    weak = kind in (InequalityKind.WEAK_POINCARE, InequalityKind.WEAK_CHEEGER)
    if weak:
        if rate is None or not s_grid:
            raise ParameterError(f"{kind.value} needs a rate and a non-empty s grid")
        if any(not 0.0 < s < 0.5 for s in s_grid):
            raise ParameterError("s grid must lie in (0, 1/2)")
    elif constant is None or not constant > 0:
        raise ParameterError(f"{kind.value} needs a positive constant")

    if isinstance(target, ProductBoundSpec):
        engine = _MonteCarloEngine(target.base, target.n, mc or MonteCarloConfig())
    elif mc is not None:
        engine = _MonteCarloEngine(target, 1, mc)
    else:
        engine = _QuadratureEngine(target)
    w = _radial(weight)

    worst, worst_label, worst_margin = -math.inf, "", 0.0
    status = Status.PASS
    for f in functions:
        for suffix, lhs, rhs in _sides(kind, f, engine, constant, w, rate, s_grid):
            lhs_mean, rhs_mean = float(np.mean(lhs)), float(np.mean(rhs))
            if rhs_mean > 0.0:
                ratio = lhs_mean / rhs_mean
            else:
                ratio = math.inf if lhs_mean > 0.0 else 0.0
            if isinstance(engine, _MonteCarloEngine):
                gap = rhs - lhs
                se = float(np.std(gap, ddof=1) / math.sqrt(gap.size))
                margin = engine.mc.sigma * se
                verdict = Status.PASS if gap.mean() - margin > 0.0 else (
                    Status.FAIL if gap.mean() + margin < 0.0 else Status.INCONCLUSIVE)
                margin = margin / rhs_mean if rhs_mean > 0.0 else math.inf
            else:
                margin = 1e-9
                verdict = Status.PASS if ratio <= 1.0 + margin else Status.FAIL
            if verdict is Status.FAIL:
                status = Status.FAIL
            elif verdict is Status.INCONCLUSIVE and status is Status.PASS:
                status = Status.INCONCLUSIVE
            if ratio > worst:
                worst, worst_label, worst_margin = ratio, f.label + suffix, margin

    result = CheckResult(kind.value, len(functions), worst, status, engine.name, worst_label, worst_margin)
    if isinstance(engine, _MonteCarloEngine):
        result.samples, result.seed, result.blocks = engine.mc.samples, engine.mc.seed, engine.mc.blocks
    log = _LOG.warning if status is Status.INCONCLUSIVE else _LOG.info
    log("[%s] %s on %d functions: worst ratio %.6g at %s", kind.value, status.value, len(functions), worst, worst_label)
    return result


@dataclass(frozen=True)
class HalfSpace:
    """{x : x_coordinate <= threshold}."""

    coordinate: int = 0
    threshold: float = 0.0


@dataclass(frozen=True)
class Ball:
    radius: float


@dataclass(frozen=True)
class BoundaryEstimate:
    value: float
    stderr: float
    set_measure: float
    engine: str


def boundary_measure(spec: ProductBoundSpec, region: HalfSpace | Ball, h: float,
                     mc: MonteCarloConfig | None = None) -> BoundaryEstimate:
    """(mu^n(A_h) - mu^n(A)) / h, extrapolated over {h, h/2}."""
    if not h > 0:
        raise ParameterError(f"enlargement h must be positive, got {h}")
    base = spec.base
    if isinstance(region, HalfSpace):
        if not 0 <= region.coordinate < spec.n:
            raise ParameterError(f"coordinate {region.coordinate} outside dimension {spec.n}")
        t0 = float(base.cdf(region.threshold))
        coarse = (float(base.cdf(region.threshold + h)) - t0) / h
        fine = (float(base.cdf(region.threshold + 0.5 * h)) - t0) / (0.5 * h)
        return BoundaryEstimate(2.0 * fine - coarse, 0.0, t0, "closed-form")
    if region.radius < 0:
        raise ParameterError(f"ball radius must be non-negative, got {region.radius}")
    if region.radius == 0.0:
        value = 2.0 * float(base.density(0.0)) if spec.n == 1 else 0.0
        return BoundaryEstimate(value, 0.0, 0.0, "closed-form")
    engine = _MonteCarloEngine(base, spec.n, mc or MonteCarloConfig())
    rho = region.radius
    estimates, inside = [], []
    for block in engine.blocks:
        r = np.linalg.norm(block, axis=1)
        p0 = np.mean(r <= rho)
        coarse = (np.mean(r <= rho + h) - p0) / h
        fine = (np.mean(r <= rho + 0.5 * h) - p0) / (0.5 * h)
        estimates.append(2.0 * fine - coarse)
        inside.append(p0)
    est = np.asarray(estimates)
    return BoundaryEstimate(float(est.mean()), float(np.std(est, ddof=1) / math.sqrt(est.size)),
                            float(np.mean(inside)), "MC")


def check_isoperimetric(spec: ProductBoundSpec, region: HalfSpace | Ball, h: float,
                        mc: MonteCarloConfig | None = None) -> CheckResult:
    """Compare the boundary measure of ``region`` with the product isoperimetric lower bound."""
    estimate = boundary_measure(spec, region, h, mc)
    t = estimate.set_measure
    lower = product_iso_lower(spec, t) if 0.0 < t < 1.0 else 0.0
    if estimate.value > 0.0:
        ratio = lower / estimate.value
    else:
        ratio = math.inf if lower > 0.0 else 0.0
    sigma = (mc or MonteCarloConfig()).sigma
    margin = sigma * estimate.stderr
    if estimate.value - margin >= lower:
        status = Status.PASS
    elif estimate.value + margin < lower:
        status = Status.FAIL
    else:
        status = Status.INCONCLUSIVE
    _LOG.info("[isoperimetric] %s: boundary %.6g vs lower bound %.6g at t=%.6g", status.value, estimate.value,
              lower, t)
    return CheckResult("isoperimetric", 1, ratio, status, estimate.engine, type(region).__name__, margin)
