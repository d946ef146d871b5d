import math

import mpmath
import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from bergmodel.numerics import (
    QuadSpec,
    QuadratureError,
    gamma,
    lower_incomplete_gamma,
    quad_finite,
    quad_periodic,
    quad_semiinf,
    regularized_upper_gamma,
    scaled_lower_gamma,
    upper_incomplete_gamma,
)


def test_gamma_examples():
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert gamma(3) == 2
    assert gamma(2.5) == pytest.approx(0.75 * math.sqrt(math.pi), rel=1e-15)
    with pytest.raises(ValueError):
        gamma(0)


@pytest.mark.parametrize("a", np.linspace(0.1, 10, 23))
def test_gamma_recurrence(a):
    assert gamma(a + 1) == pytest.approx(a * gamma(a), rel=1e-12)


@pytest.mark.parametrize("a", [0.01, 0.5, 1.3, 7.5, 33.0, 50.0])
def test_gamma_against_scipy(a):
    assert gamma(a) == pytest.approx(sp.gamma(a), rel=1e-13)


def test_upper_incomplete_examples():
    for x in (0.0, 0.3, 2.0, 17.0):
        assert upper_incomplete_gamma(1, x) == pytest.approx(math.exp(-x), rel=1e-13)
    assert upper_incomplete_gamma(2.5, 0) == gamma(2.5)
    assert upper_incomplete_gamma(0.5, 1.0) == pytest.approx(0.2788055852806623, rel=1e-12)


@settings(max_examples=150, deadline=None)
@given(st.floats(0.05, 40), st.floats(0, 80))
def test_upper_incomplete_against_scipy(a, x):
    ours = regularized_upper_gamma(a, x)
    ref = sp.gammaincc(a, x)
    if ref > 1e-290:
        assert ours == pytest.approx(ref, rel=1e-11, abs=1e-300)


@settings(max_examples=80, deadline=None)
@given(st.floats(0.1, 20), st.floats(0.0, 40))
def test_series_and_fraction_split_consistent(a, x):
    total = upper_incomplete_gamma(a, x) + lower_incomplete_gamma(a, x)
    assert total == pytest.approx(gamma(a), rel=1e-11)


def test_domain_errors():
    with pytest.raises(ValueError):
        upper_incomplete_gamma(-1, 1)
    with pytest.raises(ValueError):
        upper_incomplete_gamma(1, -1)


@pytest.mark.parametrize("a", [0.5, 1.0, 1.5, 2.0])
@pytest.mark.parametrize("u", [0.5 + 0.3j, 3 - 2j, 12 + 5j, 45 + 10j, -4 + 1j, -7 + 24j, 20 - 25j])
def test_scaled_lower_gamma_against_mpmath(a, u):
    ref = complex(mpmath.exp(u) * mpmath.gammainc(a, 0, u, regularized=True))
    ours = scaled_lower_gamma(a, u)
    assert abs(ours - ref) <= 1e-11 * abs(ref)


@pytest.mark.parametrize("transform", ["exp-sinh", "log-radial"])
def test_quad_semiinf_examples(transform):
    spec = QuadSpec(transform=transform, abs_tol=1e-13)
    assert quad_semiinf(lambda s: np.exp(-s), spec)[0] == pytest.approx(1, abs=1e-12)
    assert quad_semiinf(lambda s: np.exp(-s) * s ** 2, spec)[0] == pytest.approx(2, abs=1e-12)
    assert quad_semiinf(lambda s: np.exp(-s) * s ** 1.5, spec)[0] == pytest.approx(gamma(2.5), abs=1e-12)


@pytest.mark.parametrize("a", [0.5, 1, 2.5, 5])
def test_quad_semiinf_reproduces_gamma(a):
    val, err = quad_semiinf(lambda s: np.exp(-s) * s ** (a - 1))
    assert abs(val - gamma(a)) <= max(err, 1e-10)


def test_quad_semiinf_complex_integrand():
    val, _ = quad_semiinf(lambda s: np.exp(-(1 - 1j) * s))
    assert val == pytest.approx(1 / (1 - 1j), abs=1e-12)


def test_quad_semiinf_nonconvergence():
    with pytest.raises(QuadratureError):
        quad_semiinf(lambda s: np.sin(s) / (1 + s), QuadSpec(max_levels=2, abs_tol=1e-14))


def test_quadspec_validation():
    with pytest.raises(ValueError):
        QuadSpec(abs_tol=0)
    with pytest.raises(ValueError):
        QuadSpec(n_min=4)
    with pytest.raises(ValueError):
        QuadSpec(transform="gauss")


def test_quad_periodic_examples():
    assert quad_periodic(lambda t: np.cos(t) ** 2, 16) == pytest.approx(math.pi, rel=1e-15)
    assert abs(quad_periodic(lambda t: np.exp(3j * t), 16)) < 1e-14
    val = quad_periodic(lambda t: np.exp(1.5 * np.cos(2 * t)), 64)
    assert val == pytest.approx(2 * math.pi * sp.i0(1.5), rel=1e-14)


def test_quad_finite_endpoint_singularity():
    val, _ = quad_finite(lambda x: x ** -0.5, 0.0, 1.0)
    assert val == pytest.approx(2.0, rel=1e-12)
