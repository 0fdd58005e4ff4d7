import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heavytail_ineq.errors import BracketError, DomainError, ParameterError
from heavytail_ineq.measures import (
    Measure1D,
    PhiFunction,
    QuadratureSpec,
    RadialMeasure,
    integrate_half_line,
    solve_increasing,
)


def test_density_closed_forms():
    assert Measure1D.cauchy(1.0).density(0.0) == pytest.approx(0.5)
    assert Measure1D.exponential().density(0.0) == pytest.approx(0.5)
    assert Measure1D.subexponential(1.0).density(math.log(2.0)) == pytest.approx(0.25)


def test_cdf_closed_forms(cauchy2):
    assert Measure1D.cauchy(1.0).cdf(1.0) == pytest.approx(0.75)
    assert cauchy2.cdf(0.0) == 0.5
    assert cauchy2.cdf(-1.0) == pytest.approx(1.0 / 8.0)


def test_cdf_subexponential_against_closed_integral(subexp_half):
    # int_0^4 e^{-sqrt x} dx = 2 (1 - 3 e^{-2}) and Z = 4
    assert subexp_half.cdf(4.0) == pytest.approx(1.0 - 1.5 * math.exp(-2.0), abs=1e-8)


@pytest.mark.parametrize(
    "m",
    [
        Measure1D.cauchy(2.0).numeric(),
        Measure1D.cauchy(1.0).numeric(),
        Measure1D.cauchy_smooth(2.0),
        Measure1D.exponential().numeric(),
        Measure1D.subexponential(0.5),
        Measure1D.subexponential(0.25),
        Measure1D.phi_measure(PhiFunction.power(0.5)),
    ],
    ids=lambda m: m.label,
)
def test_density_integrates_to_one(m):
    assert m.expectation(lambda x: 1.0) == pytest.approx(1.0, abs=1e-8)


def test_vq_tail_is_a_probability():
    m = Measure1D.vq(3.0)
    assert 0.0 < m.tail(1.0) < m.tail(0.5) < 0.5
    assert m.tail(0.0) == pytest.approx(0.5, rel=1e-8)


@pytest.mark.parametrize("r", [0.5, 3.0, 20.0])
def test_closed_and_numeric_tails_agree(r):
    for m in (Measure1D.cauchy(2.0), Measure1D.exponential()):
        assert m.numeric().tail(r) == pytest.approx(m.tail(r), rel=1e-7)


def test_phi_measure_matches_exponential_tail():
    m = Measure1D.phi_measure(PhiFunction.power(1.0))
    assert m.normalizer == pytest.approx(2.0, rel=1e-9)
    assert m.tail(2.0) == pytest.approx(0.5 * math.exp(-2.0), rel=1e-8)


def test_quantile_examples(cauchy2, exponential):
    assert cauchy2.quantile(7.0 / 8.0) == pytest.approx(1.0)
    assert exponential.quantile(0.75) == pytest.approx(math.log(2.0))
    assert cauchy2.quantile(0.5) == 0.0
    assert cauchy2.numeric().quantile(7.0 / 8.0) == pytest.approx(1.0, abs=1e-8)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=-20.0, max_value=20.0))
def test_quantile_inverts_cdf(x):
    m = Measure1D.cauchy(2.0)
    assert m.quantile(m.cdf(x)) == pytest.approx(x, abs=1e-6)


@settings(max_examples=15, deadline=None)
@given(st.floats(min_value=0.01, max_value=15.0), st.booleans())
def test_quantile_inverts_numeric_cdf(r, negative):
    m = Measure1D.subexponential(0.5)
    x = -r if negative else r
    assert m.quantile(m.cdf(x)) == pytest.approx(x, abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=0.0, max_value=50.0))
def test_density_is_even(x):
    for m in (Measure1D.cauchy(0.5), Measure1D.cauchy_smooth(1.0), Measure1D.subexponential(0.5)):
        assert m.density(x) == m.density(-x)


def test_cdf_is_monotone(subexp_half):
    values = subexp_half.cdf(np.linspace(-10.0, 10.0, 41))
    assert np.all(np.diff(values) >= -1e-12)


def test_sample_is_inverse_cdf(cauchy2):
    assert cauchy2.sample(0.5) == 0.0
    assert cauchy2.sample(7.0 / 8.0) == pytest.approx(1.0)
    u = np.array([[0.1, 0.5], [0.75, 0.99]])
    draws = cauchy2.sample(u)
    assert draws.shape == (2, 2)
    np.testing.assert_allclose(draws, cauchy2.quantile(u), rtol=1e-12)


def test_sample_mean_absolute_value():
    rng = np.random.default_rng(2024)
    u = np.maximum(rng.random(1_000_000), np.finfo(float).tiny)
    draws = np.abs(Measure1D.subexponential(1.0).sample(u))
    se = draws.std() / math.sqrt(draws.size)
    assert abs(draws.mean() - 1.0) < 4.0 * se


def test_radial_law_normalized(radial_cauchy3):
    mass = integrate_half_line(lambda r: float(radial_cauchy3.radial_law(r)), heavy=True)
    assert mass == pytest.approx(1.0, abs=1e-8)


def test_radial_law_shape(radial_cauchy3):
    # rho(r) proportional to r^2 (1+r)^{-5}
    ratio = radial_cauchy3.radial_law(1.0) / radial_cauchy3.radial_law(2.0)
    assert ratio == pytest.approx((2.0**-5) / (4.0 * 3.0**-5), rel=1e-12)


def test_radial_law_in_one_dimension_is_twice_h():
    rm = RadialMeasure.subexponential(1, 1.0)
    assert rm.radial_law(0.7) == pytest.approx(2.0 * rm.h(0.7), rel=1e-12)
    assert rm.radial_law(0.0) == pytest.approx(1.0, rel=1e-8)


def test_radial_law_underflows_to_zero():
    assert RadialMeasure.subexponential(2, 0.5).radial_law(1e12) == 0.0


def test_phi_function_fallbacks():
    phi = PhiFunction(value=lambda x: np.power(x, 2.0))
    assert phi.d1(3.0) == pytest.approx(6.0, rel=1e-6)
    assert phi.inv(4.0) == pytest.approx(2.0, rel=1e-10)
    assert PhiFunction.power(0.5).inv(3.0) == pytest.approx(9.0)


@pytest.mark.parametrize(
    "build",
    [
        lambda: Measure1D.cauchy(0.0),
        lambda: Measure1D.subexponential(1.5),
        lambda: Measure1D.vq(1.0),
        lambda: RadialMeasure.cauchy(0, 1.0),
        lambda: QuadratureSpec(abs_tol=0.0),
        lambda: QuadratureSpec(max_depth=0),
        lambda: PhiFunction.power(-1.0),
    ],
)
def test_parameter_errors(build):
    with pytest.raises(ParameterError):
        build()


def test_domain_errors(cauchy2):
    with pytest.raises(DomainError):
        cauchy2.quantile(0.0)
    with pytest.raises(DomainError):
        cauchy2.tail(-1.0)
    with pytest.raises(DomainError):
        cauchy2.sample(np.array([0.0, 0.5]))
    with pytest.raises(DomainError):
        RadialMeasure.cauchy(2, 1.0).radial_law(-1.0)


def test_bracket_errors():
    with pytest.raises(BracketError):
        solve_increasing(math.atan, 2.0)
    with pytest.raises(BracketError):
        solve_increasing(lambda x: x + 1.0, 0.5)
