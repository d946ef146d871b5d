from fractions import Fraction

import pytest
from hypothesis import assume, given, settings

from bergmodel.poly import (
    BiPoly,
    GaussianRational,
    PoleError,
    RationalFn,
    admissible_weight_check,
    circle_dominance_certificate,
    is_hermitian,
    monomial_weight,
    parse_poly,
    q_and_Q,
    rf_arith,
    rf_d,
    rf_eval,
)
from strategies import bipolys, hermitian_bipolys, nonzero_bipolys

EPS_WEIGHT = "(z*w)^2 + 1/4*(z^3*w + z*w^3)"
Z, W = BiPoly.z(), BiPoly.w()


def test_product_cancels_cross_multiplied():
    zw = Z * W
    assert rf_arith(RationalFn(1, zw), RationalFn(zw), "*") == RationalFn(1)


def test_derivative_of_reciprocal():
    assert rf_d(RationalFn(1, W), "w") == RationalFn(-1, W * W)


def test_eval_b1_ratio():
    q, Q = q_and_Q(parse_poly(EPS_WEIGHT))
    g = RationalFn(Q) * RationalFn.power(q, -2)
    assert rf_eval(g, 1, 1) == GaussianRational(Fraction(-3, 11))


def test_pole_raises():
    with pytest.raises(PoleError):
        rf_eval(RationalFn(1, Z - W), 1, 1)


@settings(max_examples=40, deadline=None)
@given(bipolys(max_deg=2), nonzero_bipolys(max_deg=2))
def test_quotient_rule(f, g):
    lhs = rf_d(RationalFn(f, g), "z")
    rhs = RationalFn(f.d("z") * g - f * g.d("z"), g * g)
    assert lhs.equals(rhs)


@settings(max_examples=40, deadline=None)
@given(bipolys(max_deg=2), nonzero_bipolys(max_deg=2), bipolys(max_deg=2), nonzero_bipolys(max_deg=2))
def test_field_operations_consistent(a, b, c, d):
    x, y = RationalFn(a, b), RationalFn(c, d)
    assert (x + y) - y == x
    assume(not c.is_zero())
    assert (x * y) / y == x


def test_q_and_Q_examples():
    q, Q = q_and_Q(monomial_weight(1, 4))
    assert q == 2 * Z * W and Q.is_zero()
    q, Q = q_and_Q(parse_poly(EPS_WEIGHT))
    assert q == parse_poly("4*z*w + 3/4*z^2 + 3/4*w^2")
    assert Q == parse_poly("-9/4*z*w - 3*z^2 - 3*w^2")
    q, Q = q_and_Q(parse_poly("3/2*z*w"))
    assert q == BiPoly.const(Fraction(3, 2)) and Q.is_zero()


@settings(max_examples=40, deadline=None)
@given(hermitian_bipolys(max_deg=3))
def test_q_and_Q_preserve_hermitian(p):
    q, Q = q_and_Q(p)
    assert is_hermitian(q) and is_hermitian(Q)


def test_admissible_examples():
    rep = admissible_weight_check(monomial_weight(1, 4))
    assert rep.admissible and rep.degree == 4
    rep = admissible_weight_check(parse_poly(EPS_WEIGHT))
    assert rep.admissible and rep.degree == 4
    assert rep.min_circle_q == pytest.approx(2.5, rel=1e-9)
    rep = admissible_weight_check(parse_poly("z^2"))
    assert not rep.admissible and not rep.hermitian and not rep.no_pure_terms


def test_admissible_rejects_superharmonic_and_harmonic():
    assert not admissible_weight_check(parse_poly("-(z*w)^2")).subharmonic
    rep = admissible_weight_check(parse_poly("z^2 + w^2"))
    assert not rep.nonharmonic and not rep.admissible
    assert not admissible_weight_check(parse_poly("z*w + (z*w)^2")).even_degree


def test_circle_dominance_exact_mode():
    q, _ = q_and_Q(parse_poly(EPS_WEIGHT))
    assert circle_dominance_certificate(q)
    assert not circle_dominance_certificate(parse_poly("z*w + z^2 + w^2"))
    assert admissible_weight_check(parse_poly(EPS_WEIGHT), exact=True).admissible


def test_monomial_weight_validation():
    with pytest.raises(ValueError):
        monomial_weight(1, 3)
