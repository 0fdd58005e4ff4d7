"""
Weighted Poincare constants on the line.

Upper bounds come from the Muckenhoupt criterion, lower bounds from
Rayleigh quotients of explicit witness families.

:copyright: (c) 2025 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from heavytail_ineq import const
from heavytail_ineq.duality import grid_supremum
from heavytail_ineq.errors import HypothesisError, ParameterError
from heavytail_ineq.measures import DEFAULT_QUADRATURE, Measure1D, PhiFunction, integrate_interval, integrate_tail

_LOG = logging.getLogger(__name__)


@dataclass
class InequalityReport:
    """Two-sided bounds on the optimal constant of one inequality."""

    kind: str
    weight: str
    upper: float | None = None
    upper_provenance: str = ""
    lower: float | None = None
    lower_provenance: str = ""
    lower_parameter: float | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.upper is not None and self.lower is not None and self.lower > self.upper * (1.0 + 1e-9):
            raise ParameterError(f"{self.kind}: lower bound {self.lower:.6g} exceeds upper bound {self.upper:.6g}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "weight": self.weight,
            "upper": self.upper,
            "upper_provenance": self.upper_provenance,
            "lower": self.lower,
            "lower_provenance": self.lower_provenance,
            "lower_parameter": self.lower_parameter,
            **self.metadata,
        }


def check_muckenhoupt_hypothesis(V: PhiFunction, x0: float, eps: float = const.MUCKENHOUPT_EPS,
                                 points: int = const.MUCKENHOUPT_GRID_POINTS) -> float:
    """Largest |V''|/V'^2 on [x0, 1000 max(x0, 1)]; raises unless it is <= 1 - eps."""
    x = np.geomspace(x0, 1e3 * max(x0, 1.0), points)
    d1 = np.asarray(V.d1(x))
    if np.any(d1 == 0.0):
        raise HypothesisError(f"V' vanishes on [{x0:g}, inf)")
    worst = float(np.max(np.abs(np.asarray(V.d2(x))) / (d1 * d1)))
    if worst > 1.0 - eps:
        raise HypothesisError(f"|V''|/V'^2 reaches {worst:.4g} > 1 - {eps:g} beyond x0={x0:g}")
    return worst


def muckenhoupt_tail_bound(V: PhiFunction, y: float, eps: float) -> float:
    """e^{-V(y)} / (eps V'(y)), which dominates the integral of e^{-V} over [y, inf)."""
    return math.exp(-float(V(y))) / (eps * float(V.d1(y)))


def _muckenhoupt_product(V: PhiFunction, eta: Callable[[float], float], y: float) -> float:
    v_y = float(V(y))
    tail = integrate_tail(lambda x: math.exp(-(float(V(x)) - v_y)), y, DEFAULT_QUADRATURE)
    cuts = [y - 2.0**k for k in range(0, 64) if y - 2.0**k > 0.0]
    core = integrate_interval(
        lambda x: math.exp(float(V(x)) - v_y) / (1.0 + eta(x) ** 2), 0.0, y, DEFAULT_QUADRATURE,
        relative=True, points=cuts,
    )
    return tail * core


def muckenhoupt_B(V: PhiFunction, eta: Callable[[float], float], x0: float,
                  y_range: tuple[float, float] = (const.MUCKENHOUPT_Y_MIN, const.MUCKENHOUPT_Y_MAX),
                  points: int = const.MUCKENHOUPT_GRID_POINTS, eps: float = const.MUCKENHOUPT_EPS) -> float:
    """sup over y of (int_y^inf e^{-V}) (int_0^y e^V / (1 + eta^2)).

    The weighted Poincare constant for the weight 1 + eta^2 is 4B. Both
    integrals are shifted by V(y), so B does not see additive constants in V.
    """
    check_muckenhoupt_hypothesis(V, x0, eps)
    lo, hi = float(y_range[0]), float(y_range[1])
    if not 0 < lo < hi:
        raise ParameterError(f"y range must satisfy 0 < lo < hi, got {y_range}")

    def product(y: float) -> float:
        return _muckenhoupt_product(V, eta, y)

    B = grid_supremum(np.vectorize(product, otypes=[float]), product, lo, hi, points)
    _LOG.debug("[%s] Muckenhoupt B = %.10g over %d points", V.label, B, points)
    return B


def muckenhoupt_report(V: PhiFunction, eta: Callable[[float], float], x0: float, weight_label: str,
                       points: int = const.MUCKENHOUPT_GRID_POINTS) -> InequalityReport:
    B = muckenhoupt_B(V, eta, x0, points=points)
    return InequalityReport(
        kind="weighted-poincare",
        weight=weight_label,
        upper=4.0 * B,
        upper_provenance=f"Muckenhoupt criterion, x0={x0:g}",
        metadata={"B": B, "x0": x0, "grid_points": points, "provenance": const.PROVENANCE_QUADRATURE},
    )


@dataclass(frozen=True)
class Witness:
    """An odd test function g on the line with its derivative and kinks."""

    __test__ = False

    parameter: float
    value: Callable[[float], float]
    derivative: Callable[[float], float]
    knots: tuple[float, ...] = ()


@dataclass(frozen=True)
class WitnessFamily:
    name: str
    members: tuple[Witness, ...]


def half_potential_family(m: Measure1D, radii: Iterable[float], core: float = 1.0) -> WitnessFamily:
    """g_R = sign(x) e^{V(|x|)/2} on [core, R], linear on [-core, core], constant beyond R."""
    members = []
    for R in radii:
        if not R > core:
            raise ParameterError(f"witness radius {R} must exceed the core {core}")

        def psi(r: float) -> float:
            return math.exp(0.5 * float(m.potential(r)))

        def value(x: float, R=R) -> float:
            r = abs(x)
            if r <= core:
                return x * psi(core) / core
            return math.copysign(psi(min(r, R)), x)

        def derivative(x: float, R=R) -> float:
            r = abs(x)
            if r <= core:
                return psi(core) / core
            if r <= R:
                return 0.5 * float(m.radial_drift(r)) * psi(r)
            return 0.0

        members.append(Witness(float(R), value, derivative, (core, float(R))))
    return WitnessFamily(f"half-potential[{m.label}]", tuple(members))


def odd_ramp_family(widths: Iterable[float]) -> WitnessFamily:
    """g_a = clip(x, -a, a)."""
    members = []
    for a in widths:
        if not a > 0:
            raise ParameterError(f"ramp width must be positive, got {a}")
        members.append(
            Witness(
                float(a),
                lambda x, a=a: max(-a, min(a, x)),
                lambda x, a=a: 1.0 if abs(x) < a else 0.0,
                (float(a),),
            )
        )
    return WitnessFamily("odd-ramp", tuple(members))


def rayleigh_terms(m: Measure1D, weight: Callable[[float], float], g: Witness) -> tuple[float, float]:
    """(Var g, integral of g'^2 weight) under m."""
    mean = m.expectation(g.value, g.knots)
    second = m.expectation(lambda x: g.value(x) ** 2, g.knots)
    energy = m.expectation(lambda x: g.derivative(x) ** 2 * weight(x), g.knots)
    return max(second - mean * mean, 0.0), energy


@dataclass(frozen=True)
class LowerBound:
    value: float
    family: str
    parameter: float
    ratios: tuple[float, ...]


def variational_lower_bound(m: Measure1D, weight: Callable[[float], float], family: WitnessFamily) -> LowerBound:
    """Largest Var(g) / int g'^2 weight over the family: a lower bound on the optimal constant."""
    if not family.members:
        raise ParameterError(f"witness family {family.name} is empty")
    ratios = []
    for g in family.members:
        variance, energy = rayleigh_terms(m, weight, g)
        if not energy > 0.0:
            raise ParameterError(f"{family.name} member at {g.parameter:g} has zero energy")
        ratios.append(variance / energy)
    best = int(np.argmax(ratios))
    _LOG.debug("[%s] %s: best ratio %.6g at %g", m.label, family.name, ratios[best], family.members[best].parameter)
    return LowerBound(float(ratios[best]), family.name, family.members[best].parameter, tuple(ratios))


@dataclass(frozen=True)
class WitnessPoint:
    radius: float
    variance: float
    energy: float

    @property
    def ratio(self) -> float:
        return self.variance / self.energy


def witness_scaling(m: Measure1D, weight: Callable[[float], float], radii: Sequence[float]) -> list[WitnessPoint]:
    """Variance and weighted energy of the half-potential witness at each radius."""
    family = half_potential_family(m, radii)
    out = []
    for g in family.members:
        variance, energy = rayleigh_terms(m, weight, g)
        out.append(WitnessPoint(g.parameter, variance, energy))
        _LOG.debug("[%s] witness R=%g: Var=%.6g energy=%.6g", m.label, g.parameter, variance, energy)
    return out
