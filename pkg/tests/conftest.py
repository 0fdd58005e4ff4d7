"""Shared fixtures."""

import numpy as np
import pytest

from heavytail_ineq.measures import Measure1D, RadialMeasure
from heavytail_ineq.verify import TestFunction
from heavytail_ineq.weak import ProductBoundSpec


@pytest.fixture
def cauchy2():
    return Measure1D.cauchy(2.0)


@pytest.fixture
def exponential():
    return Measure1D.exponential()


@pytest.fixture
def subexp_half():
    return Measure1D.subexponential(0.5)


@pytest.fixture
def radial_cauchy3():
    return RadialMeasure.cauchy(3, 2.0)


@pytest.fixture
def product_cauchy3(cauchy2):
    return ProductBoundSpec(cauchy2, 3)


@pytest.fixture
def linear_witness():
    """f(x) = x_0, whose weighted energy under |x|^2 matches its second moment."""
    return TestFunction(lambda x: x[:, 0], lambda x: np.ones_like(x), "linear", "x0")


@pytest.fixture
def write_config(tmp_path):
    """Write ``key = value`` lines to a config file and return its path."""

    def _write(lines: dict[str, object], name: str = "run.cfg"):
        path = tmp_path / name
        path.write_text("".join(f"{k} = {v}\n" for k, v in lines.items()), encoding="utf-8")
        return path

    return _write
