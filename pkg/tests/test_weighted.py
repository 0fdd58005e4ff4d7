import math

import numpy as np
import pytest

from heavytail_ineq.errors import HypothesisError, ParameterError
from heavytail_ineq.measures import Measure1D, PhiFunction
from heavytail_ineq.weighted import (
    InequalityReport,
    WitnessFamily,
    check_muckenhoupt_hypothesis,
    half_potential_family,
    muckenhoupt_B,
    muckenhoupt_report,
    muckenhoupt_tail_bound,
    odd_ramp_family,
    rayleigh_terms,
    variational_lower_bound,
    witness_scaling,
)

SQRT = PhiFunction.power(0.5)


def _no_weight(x: float) -> float:
    return 0.0


def _sqrt_eta(x: float) -> float:
    # 1/V' beyond the hypothesis point, nothing inside it
    return 2.0 * math.sqrt(x) if x >= 4.0 else 0.0


def test_linear_potential_B_is_one():
    assert muckenhoupt_B(PhiFunction.linear(), _no_weight, 1.0) == pytest.approx(1.0, rel=1e-6)


def test_B_ignores_additive_constants():
    shifted = PhiFunction(
        value=lambda x: np.asarray(x, dtype=float) + 3.0,
        derivative=lambda x: np.ones_like(np.asarray(x, dtype=float)),
        second_derivative=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        label="x+3",
    )
    base = muckenhoupt_B(PhiFunction.linear(), _no_weight, 1.0, points=64)
    assert muckenhoupt_B(shifted, _no_weight, 1.0, points=64) == pytest.approx(base, rel=1e-9)


def test_B_decreases_with_the_weight():
    values = [muckenhoupt_B(PhiFunction.linear(), lambda x, c=c: c, 1.0, points=64) for c in (0.0, 1.0, 10.0)]
    assert values[0] > values[1] > values[2]
    assert values[1] == pytest.approx(values[0] / 2.0, rel=1e-6)


def test_hypothesis_point_for_sqrt_potential():
    with pytest.raises(HypothesisError):
        check_muckenhoupt_hypothesis(SQRT, 1.0)
    assert check_muckenhoupt_hypothesis(SQRT, 4.0) == pytest.approx(0.5, rel=1e-9)
    with pytest.raises(HypothesisError):
        muckenhoupt_B(SQRT, _sqrt_eta, 1.0)


def test_sqrt_potential_B_is_grid_converged():
    coarse = muckenhoupt_B(SQRT, _sqrt_eta, 4.0, points=400)
    fine = muckenhoupt_B(SQRT, _sqrt_eta, 4.0, points=800)
    assert math.isfinite(coarse) and coarse > 0.0
    assert fine == pytest.approx(coarse, rel=1e-2)


def test_tail_bound_dominates_the_tail():
    # int_16^inf e^{-sqrt x} dx = 10 e^{-4}
    bound = muckenhoupt_tail_bound(SQRT, 16.0, 0.5)
    assert bound == pytest.approx(16.0 * math.exp(-4.0), rel=1e-12)
    assert bound >= 10.0 * math.exp(-4.0)


def test_muckenhoupt_report():
    report = muckenhoupt_report(PhiFunction.linear(), _no_weight, 1.0, "1", points=64)
    assert report.upper == pytest.approx(4.0 * report.metadata["B"])
    assert report.to_dict()["upper_provenance"].startswith("Muckenhoupt")
    assert report.lower is None


def test_odd_ramps_on_exponential_law(exponential):
    bound = variational_lower_bound(exponential, lambda x: 1.0, odd_ramp_family([0.5, 1.0, 2.0, 5.0, 10.0]))
    assert 1.0 <= bound.value <= 4.0
    assert bound.parameter == 10.0
    assert len(bound.ratios) == 5


def test_ramp_rayleigh_terms(exponential):
    # Var = 2 - 2(1+a)e^{-a}, energy = 1 - e^{-a}
    a = 2.0
    variance, energy = rayleigh_terms(exponential, lambda x: 1.0, odd_ramp_family([a]).members[0])
    assert variance == pytest.approx(2.0 - 2.0 * (1.0 + a) * math.exp(-a), rel=1e-7)
    assert energy == pytest.approx(1.0 - math.exp(-a), rel=1e-7)


def test_half_potential_witness_is_odd_and_continuous(subexp_half):
    g = half_potential_family(subexp_half, [10.0]).members[0]
    assert g.value(-3.0) == pytest.approx(-g.value(3.0))
    assert g.value(1.0 - 1e-12) == pytest.approx(g.value(1.0 + 1e-12), rel=1e-9)
    assert g.value(50.0) == g.value(10.0)
    assert g.derivative(20.0) == 0.0


def test_witness_scaling_separates_weights(subexp_half):
    radii = [10.0, 20.0, 40.0]
    strong = witness_scaling(subexp_half, lambda x: 1.0 + abs(x), radii)
    weak = witness_scaling(subexp_half, lambda x: math.sqrt(1.0 + abs(x)), radii)
    assert all(point.ratio > 1.0 for point in strong)
    assert weak[0].ratio < weak[1].ratio < weak[2].ratio
    assert weak[-1].ratio > strong[-1].ratio
    assert [point.radius for point in weak] == radii


def test_lower_bound_errors(exponential):
    with pytest.raises(ParameterError):
        variational_lower_bound(exponential, lambda x: 1.0, WitnessFamily("empty", ()))
    with pytest.raises(ParameterError):
        variational_lower_bound(exponential, lambda x: 0.0, odd_ramp_family([1.0]))
    with pytest.raises(ParameterError):
        odd_ramp_family([0.0])
    with pytest.raises(ParameterError):
        half_potential_family(exponential, [1.0])


def test_report_rejects_crossed_bounds():
    with pytest.raises(ParameterError):
        InequalityReport("weighted-poincare", "1", upper=1.0, lower=2.0)
    assert InequalityReport("weighted-poincare", "1", upper=2.0, lower=2.0).lower == 2.0


def test_muckenhoupt_y_range_validation():
    with pytest.raises(ParameterError):
        muckenhoupt_B(PhiFunction.linear(), _no_weight, 1.0, y_range=(5.0, 1.0))
