import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergmodel.model_kernel import (
    ConditioningError,
    KernelModel,
    OutsideValidatedRadius,
    G_function,
    build_moments,
    fit_expansion,
    log_grid,
    monomial_kernel,
    monomial_moments,
    monomial_series_model,
    scaling_residual,
    taylor_array,
)
from bergmodel.poly import monomial_weight, parse_poly

EPS_WEIGHT = parse_poly("(z*w)^2 + 1/4*(z^3*w + z*w^3)")
QUARTIC = monomial_weight(1, 4)


@pytest.fixture(scope="module")
def quartic():
    return KernelModel(QUARTIC)


@pytest.fixture(scope="module")
def eps_model():
    return KernelModel(EPS_WEIGHT)


@pytest.fixture(scope="module")
def gaussian():
    return KernelModel(parse_poly("1/2*z*w"))


def test_first_moment_quartic():
    M = build_moments(QUARTIC, dmax=6).unscaled()
    assert M[0, 0].real == pytest.approx(math.pi ** 1.5 / 2, rel=1e-12)
    assert np.allclose(np.diag(M).real, monomial_moments(1, 4, 7), rtol=1e-12)
    off = M - np.diag(np.diag(M))
    assert np.max(np.abs(off)) < 1e-12 * np.max(np.abs(M))


@pytest.mark.parametrize("c", [0.5, 1.0, 3.0])
def test_gaussian_moments(c):
    p = parse_poly(f"{c}/2*z*w")
    M = build_moments(p, dmax=8).unscaled()
    expected = [math.pi * math.factorial(a) / c ** (a + 1) for a in range(9)]
    assert np.allclose(np.diag(M).real, expected, rtol=1e-12)


def test_kernel_at_origin(quartic):
    assert quartic.kernel_eval(0, 0).real == pytest.approx(2 / math.pi ** 1.5, rel=1e-12)


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
def test_gaussian_diagonal_constant(c):
    km = KernelModel(parse_poly(f"{c}/2*z*w"))
    z = np.array([0, 0.5, 1j, -0.7 + 0.7j])
    assert np.allclose(km.diag(z), c / math.pi, rtol=1e-10)


@pytest.mark.parametrize("z,w", [(0.3, 0.3), (0.2 + 0.1j, 0.4 - 0.05j), (0.6j, 0.5j), (0.9, 0.8)])
def test_quartic_matches_closed_form(quartic, z, w):
    ref = monomial_kernel(1, 4, z, w)
    assert abs(quartic.kernel_eval(z, w) - ref) <= 1e-10 * abs(ref)


@pytest.mark.parametrize("c", [0.5, 2.0])
def test_closed_form_gaussian(c):
    z, w = 0.3 + 0.4j, -0.2 + 0.1j
    ref = c / math.pi * np.exp(c * z * np.conj(w) - c * abs(z) ** 2 / 2 - c * abs(w) ** 2 / 2)
    assert monomial_kernel(c, 2, z, w) == pytest.approx(ref, rel=1e-13)


def test_closed_form_sector_restriction():
    with pytest.raises(ValueError):
        monomial_kernel(1, 4, 1.0, 1j)
    with pytest.raises(ValueError):
        monomial_kernel(1, 3, 1.0, 1.0)


def test_closed_form_large_argument_finite():
    val = monomial_kernel(1, 6, 3.0, 3.0)
    assert np.isfinite(val) and val.real > 0


points = st.complex_numbers(max_magnitude=0.7, allow_nan=False, allow_infinity=False)


@settings(max_examples=40, deadline=None)
@given(points, points)
def test_hermitian_symmetry(z, w):
    km = _eps_model_cached()
    a = km.kernel_eval(z, w)
    b = km.kernel_eval(w, z)
    assert abs(a - np.conj(b)) <= 1e-12 * max(abs(a), 1e-300)


_CACHE = {}


def _eps_model_cached():
    if "eps" not in _CACHE:
        _CACHE["eps"] = KernelModel(EPS_WEIGHT)
    return _CACHE["eps"]


def _plane_grid(rmax=3.0, nr=160, nt=128):
    # Gauss-Legendre in radius times trapezoid in angle
    x, wx = np.polynomial.legendre.leggauss(nr)
    r = 0.5 * rmax * (x + 1)
    wr = 0.5 * rmax * wx
    th = 2 * np.pi * np.arange(nt) / nt
    R, T = np.meshgrid(r, th, indexing="ij")
    zeta = (R * np.exp(1j * T)).ravel()
    wts = (wr[:, None] * R * (2 * np.pi / nt)).ravel()
    return zeta, wts


def test_reproducing_idempotence(eps_model):
    zeta, wts = _plane_grid()
    z, w = 0.3 + 0.1j, -0.2 + 0.25j
    left = eps_model.kernel_eval(np.full_like(zeta, z), zeta, check_radius=False)
    right = eps_model.kernel_eval(zeta, np.full_like(zeta, w), check_radius=False)
    val = np.sum(left * right * wts)
    ref = eps_model.kernel_eval(z, w)
    assert abs(val - ref) <= 1e-9 * abs(ref)


def test_reproduces_polynomial(eps_model):
    zeta, wts = _plane_grid()
    z = 0.4 - 0.3j
    p_zeta = EPS_WEIGHT.eval(zeta, np.conj(zeta)).real
    integrand = eps_model.kernel_eval(np.full_like(zeta, z), zeta, check_radius=False) * zeta ** 2 * np.exp(-p_zeta)
    val = np.sum(integrand * wts)
    ref = np.exp(-EPS_WEIGHT.eval(z, np.conj(z)).real) * z ** 2
    assert abs(val - ref) <= 1e-9 * abs(ref)


def _fd_wirtinger(f, z, a1, a2, h=1e-4):
    """Central-difference d^a1 dbar^a2 for a1 + a2 <= 2."""
    def dx(g):
        return lambda v: (g(v + h) - g(v - h)) / (2 * h)

    def dy(g):
        return lambda v: (g(v + 1j * h) - g(v - 1j * h)) / (2 * h)

    def dz(g):
        return lambda v: 0.5 * (dx(g)(v) - 1j * dy(g)(v))

    def dzb(g):
        return lambda v: 0.5 * (dx(g)(v) + 1j * dy(g)(v))

    g = f
    for _ in range(a1):
        g = dz(g)
    for _ in range(a2):
        g = dzb(g)
    return g(z)


@pytest.mark.parametrize("a1,a2", [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2)])
def test_diag_derivative_matches_fd(eps_model, a1, a2):
    z = 0.35 + 0.2j
    exact = eps_model.diag_derivative(a1, a2, z)
    fd = _fd_wirtinger(lambda v: eps_model.diag(v), z, a1, a2)
    assert abs(exact - fd) <= 1e-5 * max(1.0, abs(exact))


def test_diag_derivative_zero_order_is_diag(eps_model):
    z = 0.2 - 0.3j
    assert eps_model.diag_derivative(0, 0, z) == pytest.approx(eps_model.diag(z), rel=1e-14)


def test_diag_derivative_order_limit(eps_model):
    with pytest.raises(ValueError):
        eps_model.diag_derivative(3, 2, 0.1)


def test_centered_model_agrees_with_origin_model(eps_model):
    centered = KernelModel(EPS_WEIGHT, center=0.3 + 0.1j, dmax=16)
    z = 0.35 + 0.05j
    assert centered.diag(z) == pytest.approx(eps_model.diag(z), rel=1e-9)
    w = 0.25 + 0.15j
    assert abs(centered.kernel_eval(z, w) - eps_model.kernel_eval(z, w)) <= 1e-9 * abs(eps_model.kernel_eval(z, w))


def test_taylor_array_recenters():
    C = taylor_array(EPS_WEIGHT.to_array(), 0.4 - 0.2j)
    h, eta = 0.1 + 0.05j, -0.03 + 0.02j
    z0 = 0.4 - 0.2j
    direct = EPS_WEIGHT.eval(z0 + h, np.conj(z0) + eta)
    assert np.polynomial.polynomial.polyval2d(h, eta, C) == pytest.approx(direct, rel=1e-13)


def test_validated_radius_warning(quartic):
    r = quartic.validated_radius
    assert 1.0 < r < 3.0
    with pytest.warns(OutsideValidatedRadius):
        quartic.diag(r * 1.5)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        quartic.diag(0.5 * r)


def test_conditioning_error_surfaces():
    with pytest.raises(ConditioningError):
        KernelModel(EPS_WEIGHT, center=1.0, dmax=40)


def test_series_model_matches_closed_form():
    km = monomial_series_model(2, 6)
    for z in (0.0, 0.4, 0.5 + 0.3j):
        assert km.diag(z) == pytest.approx(monomial_kernel(2, 6, z, z).real, rel=1e-12)


@pytest.mark.parametrize("t", [2.0, 5.0])
def test_scaling_law(eps_model, t):
    scaled = KernelModel(EPS_WEIGHT, t=t)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutsideValidatedRadius)
        res = scaling_residual(t, 0.4, 0.3 + 0.1j, eps_model, scaled)
    assert res < 1e-9


def test_scaling_law_closed_form():
    t, r = 7.0, 4
    base = lambda z, w: monomial_kernel(1, r, z, w)
    scaled = lambda z, w: monomial_kernel(t, r, z, w)
    assert scaling_residual(t, 0.5, 0.4, base, scaled, r=r) < 1e-13


def test_fit_gaussian_exact():
    fit = fit_expansion(parse_poly("3/2*z*w"), 0.2, log_grid(5, 50, 6), n_terms=2, dmax=12)
    assert fit.estimates[0] == pytest.approx(6.0, rel=1e-9)
    assert abs(fit.estimates[1]) < 1e-7
    assert not fit.ill_conditioned
    rows = list(fit.rows())
    assert set(rows[0]) == {"t", "value", "fitted", "residual"}


def test_fit_grid_validation():
    with pytest.raises(ValueError):
        fit_expansion(EPS_WEIGHT, 1.0, [1, 2, 3, 4, 5, 6], n_terms=2)
    with pytest.raises(ValueError):
        fit_expansion(EPS_WEIGHT, 1.0, [10, 100], n_terms=2)


def _G_oracle(x, r):
    mpmath.mp.dps = 40
    x = mpmath.mpc(x)
    n = int(3 * (r // 2) * abs(x) ** (r // 2)) + 200
    return complex(mpmath.fsum(x ** a / mpmath.gamma(mpmath.mpf(2 * (a + 1)) / r) for a in range(n)))


@pytest.mark.parametrize("r", [4, 6, 8])
@pytest.mark.parametrize("x", [0.5, 2.0 + 1.0j, 3.0, 1.5 * np.exp(-0.3j), 2.5 * np.exp(0.15j)])
def test_G_function_against_series(r, x):
    if r * abs(np.angle(x)) >= math.pi:
        with pytest.raises(ValueError):
            G_function(x, r)
        return
    assert G_function(x, r) == pytest.approx(_G_oracle(x, r), rel=1e-11)


def test_G_function_gaussian_is_exponential():
    for x in (0.3, -20.0, 4.0 - 7.0j):
        assert G_function(x, 2) == pytest.approx(np.exp(x), rel=1e-14)
