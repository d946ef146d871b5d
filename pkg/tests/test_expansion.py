from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergmodel.expansion import HarmonicWeightError, b3_identity_bridge, b_coeffs, eval_b
from bergmodel.poly import GaussianRational, RationalFn, monomial_weight, parse_poly

EPS_WEIGHT = "(z*w)^2 + 1/4*(z^3*w + z*w^3)"


def test_eps_weight_values_exact():
    c = b_coeffs(parse_poly(EPS_WEIGHT))
    exact = [b.eval_exact(1, 1) for b in c.as_list()]
    assert exact == [
        GaussianRational(22),
        GaussianRational(Fraction(-3, 11)),
        GaussianRational(Fraction(-45, 1331)),
        GaussianRational(Fraction(-8247, 644204)),
    ]


def test_eps_weight_values_float():
    vals = eval_b(b_coeffs(parse_poly(EPS_WEIGHT)), 1.0)
    assert vals[0] == pytest.approx(22)
    assert vals[1].real == pytest.approx(-0.2727272727, rel=1e-9)


@pytest.mark.parametrize("c,r", [(1, 4), (Fraction(3, 2), 6), (2, 2)])
def test_monomial_higher_coefficients_vanish(c, r):
    co = b_coeffs(monomial_weight(c, r))
    assert co.b1.is_zero() and co.b2.is_zero() and co.b3.is_zero()


def test_b0_is_laplacian():
    assert b_coeffs(monomial_weight(1, 4)).b0 == parse_poly("8*z*w")
    assert b_coeffs(parse_poly("3*z*w")).b0 == parse_poly("12")


def test_harmonic_weight_rejected():
    with pytest.raises(HarmonicWeightError):
        b_coeffs(parse_poly("z^2 + w^2"))


def test_zero_of_q_rejected():
    with pytest.raises(ZeroDivisionError):
        eval_b(b_coeffs(monomial_weight(1, 4)), 0.0)


@pytest.mark.parametrize("p", [EPS_WEIGHT, "(z*w)^3 + z^4*w^2 + z^2*w^4", "(z*w)^2 + i*z^3*w - i*z*w^3"])
def test_b3_bridge(p):
    assert b3_identity_bridge(parse_poly(p)) is not None


@settings(max_examples=15, deadline=None)
@given(st.fractions(min_value=-1, max_value=1, max_denominator=8))
def test_b_values_real_on_diagonal(eps):
    p = parse_poly("(z*w)^2") + parse_poly("z^3*w + z*w^3") * eps
    vals = eval_b(b_coeffs(p), 0.7 + 0.4j)
    assert np.all(np.abs(vals.imag) <= 1e-12 * np.maximum(1.0, np.abs(vals)))


def test_rotation_covariance():
    # p(e^{i phi} z) has coefficients related by rotation; b_j at rotated points agree
    p = parse_poly(EPS_WEIGHT)
    c = b_coeffs(p)
    v1 = eval_b(c, 1.0)
    v2 = eval_b(c, -1.0)
    assert np.allclose(v1, v2)
