import numpy as np
import pytest

from heavytail_ineq.config import MonteCarloConfig
from heavytail_ineq.errors import ParameterError
from heavytail_ineq.lyapunov import cauchy_certificate, derive_weight
from heavytail_ineq.verify import (
    Ball,
    HalfSpace,
    InequalityKind,
    Status,
    TestFunction,
    boundary_measure,
    check_inequality,
    check_isoperimetric,
    coordinate,
    power_decay,
    radial_bump,
    random_feature,
    truncated_exponential_witness,
    witness_suite,
)
from heavytail_ineq.weak import ProductBoundSpec, product_weak_poincare_rate


def _square(r):
    return (1.0 + np.asarray(r)) ** 2


@pytest.fixture
def points():
    return np.random.default_rng(7).normal(0.0, 3.0, (100, 1))


@pytest.mark.parametrize(
    "build",
    [
        lambda m: coordinate(0, 0.3),
        lambda m: coordinate(0, 10.0),
        lambda m: radial_bump(1.0, 0.5),
        lambda m: power_decay(0.7),
        lambda m: truncated_exponential_witness(m, 8.0),
        lambda m: random_feature(np.random.default_rng(3), 1),
    ],
)
def test_closed_form_gradients(cauchy2, points, build):
    assert build(cauchy2).check_gradient(points) <= 1e-5


def test_wrong_gradient_is_caught(points):
    bad = TestFunction(lambda x: x[:, 0] ** 2, lambda x: 3.0 * x, label="x^2 with a bad gradient")
    with pytest.raises(ParameterError):
        bad.check_gradient(points)


def test_witness_suite(cauchy2):
    suite = witness_suite(cauchy2, n=1, count=50, seed=4)
    assert len(suite) == 50
    assert suite[0].family == "power-decay"
    assert {f.family for f in suite} >= {"random-feature", "truncated-exponential-witness", "coordinate"}
    again = witness_suite(cauchy2, n=1, count=50, seed=4)
    assert [f.label for f in suite] == [f.label for f in again]


def test_weighted_poincare_holds_with_the_transport_constant(cauchy2):
    result = check_inequality(InequalityKind.WEIGHTED_POINCARE, cauchy2, witness_suite(cauchy2, count=42),
                              constant=3.5, weight=_square)
    assert result.status is Status.PASS
    assert result.passed
    assert result.engine == "quadrature"
    assert 0.0 < result.worst_ratio <= 1.0


def test_weighted_poincare_fails_below_the_optimal_constant(cauchy2):
    # slowly decaying powers push the quotient towards Var log(1+|X|) = 1/4
    result = check_inequality("weighted-poincare", cauchy2, [power_decay(0.01), power_decay(0.05)],
                              constant=0.125, weight=_square)
    assert result.status is Status.FAIL
    assert result.worst_ratio > 1.0
    assert result.worst_function.startswith("(1+|x|)^-")


def test_weak_poincare_monte_carlo(cauchy2):
    spec = ProductBoundSpec(cauchy2, 1)
    mc = MonteCarloConfig(seed=11, samples=200_000, blocks=10)
    functions = [coordinate(0, 1.0), radial_bump(0.0, 1.0), power_decay(0.5)]
    result = check_inequality(InequalityKind.WEAK_POINCARE, spec, functions,
                              rate=lambda s: product_weak_poincare_rate(spec, s), s_grid=(0.01, 0.05, 0.1), mc=mc)
    assert result.status is Status.PASS
    assert result.engine == "MC"
    d = result.to_dict()
    assert (d["samples"], d["seed"], d["blocks"]) == (200_000, 11, 10)
    assert d["provenance"] == "MC"


def test_weak_poincare_by_quadrature_on_the_line(cauchy2):
    spec = ProductBoundSpec(cauchy2, 1)
    functions = [coordinate(0, 1.0), radial_bump(0.0, 1.0), power_decay(0.5)]
    result = check_inequality(InequalityKind.WEAK_POINCARE, cauchy2, functions,
                              rate=lambda s: product_weak_poincare_rate(spec, s), s_grid=(0.01, 0.05, 0.1))
    assert result.status is Status.PASS
    assert result.engine == "quadrature"
    assert result.to_dict()["provenance"] == "quadrature"
    assert result.samples is None


def test_gap_inside_the_sigma_margin_is_inconclusive(exponential, linear_witness):
    # with |x|^2 as weight and C = 1 the mean gap is the squared sample mean
    mc = MonteCarloConfig(seed=3, samples=4000, blocks=20)
    result = check_inequality(InequalityKind.WEIGHTED_POINCARE, exponential, [linear_witness], constant=1.0,
                              weight=lambda r: np.asarray(r) ** 2, mc=mc)
    assert result.status is Status.INCONCLUSIVE
    assert not result.passed
    assert result.worst_ratio == pytest.approx(1.0, abs=0.05)
    assert result.to_dict()["status"] == "inconclusive"


def test_converse_poincare_with_certificate_weight(cauchy2):
    weight = derive_weight(cauchy_certificate(1, 2.0), "converse-poincare")
    functions = [coordinate(0, 1.0), radial_bump(0.0, 1.0), radial_bump(2.0, 0.5), power_decay(0.5)]
    result = check_inequality(InequalityKind.CONVERSE_POINCARE, cauchy2, functions,
                              constant=weight.prefactor, weight=weight)
    assert result.status is Status.PASS


def test_halfspace_boundary_is_the_density(product_cauchy3):
    estimate = boundary_measure(product_cauchy3, HalfSpace(1, 0.0), 1e-4)
    assert estimate.value == pytest.approx(1.0, abs=1e-3)
    assert estimate.set_measure == pytest.approx(0.5)
    result = check_isoperimetric(product_cauchy3, HalfSpace(0, 0.0), 1e-4)
    assert result.status is Status.PASS
    assert result.worst_ratio < 1.0


def test_degenerate_ball(cauchy2, product_cauchy3):
    assert boundary_measure(product_cauchy3, Ball(0.0), 0.1).value == 0.0
    assert boundary_measure(ProductBoundSpec(cauchy2, 1), Ball(0.0), 0.1).value == pytest.approx(2.0)


def test_ball_boundary_is_reproducible(product_cauchy3):
    mc = MonteCarloConfig(seed=5, samples=40_000, blocks=4)
    first = boundary_measure(product_cauchy3, Ball(1.0), 0.1, mc)
    second = boundary_measure(product_cauchy3, Ball(1.0), 0.1, mc)
    assert first == second
    assert first.engine == "MC"
    assert 0.0 < first.set_measure < 1.0
    assert first.stderr > 0.0


def test_boundary_validation(product_cauchy3):
    with pytest.raises(ParameterError):
        boundary_measure(product_cauchy3, HalfSpace(3, 0.0), 0.1)
    with pytest.raises(ParameterError):
        boundary_measure(product_cauchy3, Ball(-1.0), 0.1)
    with pytest.raises(ParameterError):
        boundary_measure(product_cauchy3, Ball(1.0), 0.0)


def test_check_inequality_validation(cauchy2):
    f = [coordinate()]
    with pytest.raises(ParameterError):
        check_inequality("weighted-poincare", cauchy2, [], constant=1.0)
    with pytest.raises(ParameterError):
        check_inequality("weighted-poincare", cauchy2, f)
    with pytest.raises(ParameterError):
        check_inequality("weak-poincare", cauchy2, f, rate=lambda s: 1.0, s_grid=(0.1, 0.6))
    with pytest.raises(ParameterError):
        check_inequality("weak-cheeger", cauchy2, f, rate=lambda s: 1.0)
    with pytest.raises(ParameterError):
        power_decay(0.0)
