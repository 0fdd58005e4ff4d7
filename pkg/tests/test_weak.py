import math

import numpy as np
import pytest

from heavytail_ineq import const
from heavytail_ineq.duality import RateFunction
from heavytail_ineq.errors import DomainError, HypothesisError, InfiniteRateError, ParameterError
from heavytail_ineq.measures import Measure1D, PhiFunction
from heavytail_ineq.weak import (
    ProductBoundSpec,
    WeightTailQuantile,
    cube_ball_measure,
    fit_scale,
    product_iso_lower,
    product_iso_phi,
    product_iso_upper,
    product_weak_cheeger,
    product_weak_poincare,
    product_weak_poincare_rate,
    weak_poincare_from_weak_cheeger,
    weak_rate_from_converse,
    weak_rate_function,
)


def test_product_weak_cheeger_coefficients(product_cauchy3):
    c = product_weak_cheeger(product_cauchy3, 0.01)
    assert c.gradient == pytest.approx(10.0 * math.sqrt(3.0), rel=1e-9)
    assert c.oscillation == pytest.approx(0.353939, rel=1e-5)
    assert not c.vacuous


def test_weak_cheeger_vacuous_above_cutoff(product_cauchy3):
    assert product_cauchy3.relevance_cutoff == pytest.approx(1.0 / (3.0 * const.KAPPA_2))
    assert product_weak_cheeger(product_cauchy3, 0.2).vacuous


def test_product_isoperimetric_bounds(product_cauchy3):
    assert product_iso_lower(product_cauchy3, 0.5) == pytest.approx(0.012131, rel=1e-4)
    for t in (1e-4, 0.1, 0.5, 0.9):
        assert product_iso_lower(product_cauchy3, t) < product_iso_upper(product_cauchy3, t)
    assert product_iso_lower(product_cauchy3, 0.2) == pytest.approx(product_iso_lower(product_cauchy3, 0.8))


def test_product_iso_phi_shape():
    value = product_iso_phi(PhiFunction.power(0.5), 4, 0.1)
    assert value == pytest.approx(0.1 / (2.0 * math.log(40.0)), rel=1e-12)
    with pytest.raises(DomainError):
        product_iso_phi(PhiFunction.smoothed_power(0.5), 4, 0.1)


def test_product_iso_phi_checks_regularity():
    phi = PhiFunction.power(0.5)
    assert product_iso_phi(phi, 2, 0.2, theta=2.0) == pytest.approx(product_iso_phi(phi, 2, 0.2))


def test_product_weak_poincare(product_cauchy3):
    energy, oscillation = product_weak_poincare(product_cauchy3, 0.01)
    assert energy == pytest.approx(2400.0, rel=1e-9)
    assert oscillation == pytest.approx(0.70788, rel=1e-4)


@pytest.mark.parametrize("n", [1, 3, 10])
def test_product_weak_poincare_rate_scaling(cauchy2, n):
    spec = ProductBoundSpec(cauchy2, n)
    sigmas = np.geomspace(1e-3, 0.2, 12)
    rates = [product_weak_poincare_rate(spec, float(s)) for s in sigmas]
    fitted = fit_scale(rates, n / sigmas)
    assert fitted.value == pytest.approx(const.KAPPA_1**2 * const.KAPPA_2, rel=1e-9)
    assert fitted.spread == pytest.approx(1.0, abs=1e-9)
    assert fitted.provenance == const.PROVENANCE_FITTED


def test_weak_poincare_from_constant_rate():
    assert weak_poincare_from_weak_cheeger(RateFunction.constant(3.0), 0.1) == pytest.approx((36.0, 0.1))
    with pytest.raises(DomainError):
        weak_poincare_from_weak_cheeger(RateFunction.constant(3.0), 0.3)


def test_quantile_of_reciprocal_weight(cauchy2):
    # mu(1/(1+|x|) < u) = u^2 under the alpha = 2 law
    q = WeightTailQuantile(lambda r: 1.0 / (1.0 + np.asarray(r, dtype=float)), cauchy2)
    for s in (1e-3, 0.05, 0.3):
        assert q.G(s) == pytest.approx(math.sqrt(s), rel=1e-7)
    assert q.F(0.5) == pytest.approx(0.25, rel=1e-9)


def test_quantile_of_constant_weight(cauchy2):
    q = WeightTailQuantile(lambda r: np.ones_like(np.asarray(r, dtype=float)), cauchy2)
    assert q.G(0.2) == pytest.approx(1.0, rel=1e-8)
    assert weak_rate_from_converse(5.0, q, 0.2) == pytest.approx(5.0, rel=1e-8)


def test_quantile_of_vanishing_weight(cauchy2):
    q = WeightTailQuantile(lambda r: np.maximum(0.0, 1.0 - np.asarray(r, dtype=float)), cauchy2)
    with pytest.raises(InfiniteRateError):
        q.G(0.1)


def test_subexponential_quantile_inverts_tail():
    m = Measure1D.subexponential(0.5)
    q = WeightTailQuantile(lambda r: np.power(1.0 + np.asarray(r, dtype=float), -0.5), m)
    for s in (1e-4, 1e-2):
        g = q.G(s)
        assert 2.0 * m.tail(g**-2 - 1.0) == pytest.approx(s, rel=1e-6)
        assert 1.0 / g > math.log(1.0 / s)


def test_weak_rate_function(cauchy2):
    q = WeightTailQuantile(lambda r: 1.0 / (1.0 + np.asarray(r, dtype=float)), cauchy2)
    rate = weak_rate_function(2.0, q)
    assert rate(0.04) == pytest.approx(10.0, rel=1e-6)
    assert weak_rate_from_converse(2.0, q, 0.04, kind="poincare") == pytest.approx(10.0, rel=1e-6)


def test_weak_rate_domains(cauchy2):
    q = WeightTailQuantile(lambda r: 1.0 / (1.0 + np.asarray(r, dtype=float)), cauchy2)
    with pytest.raises(DomainError):
        weak_rate_from_converse(1.0, q, 0.3, kind="poincare")
    with pytest.raises(ParameterError):
        weak_rate_from_converse(1.0, q, 0.1, kind="sobolev")
    with pytest.raises(ParameterError):
        WeightTailQuantile(lambda r: -np.ones_like(np.asarray(r, dtype=float)), cauchy2)


def test_cube_ball_measure(cauchy2):
    assert cube_ball_measure(cauchy2, 3, 1.0) == pytest.approx(0.421875)
    assert cube_ball_measure(cauchy2, 3, 0.0) == 0.0


def test_product_spec_validation(cauchy2):
    with pytest.raises(ParameterError):
        ProductBoundSpec(cauchy2, 0)
    with pytest.raises(HypothesisError):
        ProductBoundSpec(Measure1D.phi_measure(PhiFunction.power(2.0)), 2)


def test_fit_scale_validation():
    with pytest.raises(ParameterError):
        fit_scale([1.0, 2.0], [1.0])
    with pytest.raises(ParameterError):
        fit_scale([1.0, -2.0], [1.0, 1.0])
