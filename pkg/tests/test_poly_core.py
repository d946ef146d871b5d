from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergmodel.poly import (
    BiPoly,
    GaussianRational,
    ParseError,
    homogeneous_degree,
    is_hermitian,
    parse_poly,
    wirtinger_d,
)
from strategies import bipolys, gaussian, hermitian_bipolys

I = GaussianRational(0, 1)


def test_parse_single_term():
    assert parse_poly("1/2*z^2*w^2") == BiPoly({(2, 2): Fraction(1, 2)})


def test_parse_grouped_sum():
    expected = BiPoly({(1, 1): 1, (3, 1): Fraction(1, 4), (1, 3): Fraction(1, 4)})
    assert parse_poly("z*w + 1/4*(z^3*w + z*w^3)") == expected


def test_parse_imaginary_unit():
    assert parse_poly("i*z - i*w") == BiPoly({(1, 0): I, (0, 1): -I})


def test_parse_decimal_literal_is_exact():
    assert parse_poly("0.25*z*w").coeff(1, 1) == GaussianRational(Fraction(1, 4))


def test_parse_power_of_group():
    assert parse_poly("(z+w)^2") == parse_poly("z^2 + 2*z*w + w^2")


@pytest.mark.parametrize("text", ["z^^2", "z*", "(z+w", "x*z", "z/w", "", "z^-1", "z^999999"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_poly(text)


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as info:
        parse_poly("z + * w")
    assert info.value.position == 4


def test_derivative_examples():
    f = BiPoly({(2, 2): Fraction(1, 2)})
    assert wirtinger_d(f, "z") == BiPoly({(1, 2): 1})
    assert wirtinger_d(BiPoly.const(7), "w").is_zero()
    assert f.d("z").d("w") == BiPoly({(1, 1): 2})


def test_hermitian_examples():
    assert is_hermitian(BiPoly({(1, 1): 1}))
    assert not is_hermitian(BiPoly({(1, 0): 1}))
    assert is_hermitian(BiPoly({(3, 1): Fraction(1, 4), (1, 3): Fraction(1, 4)}))
    assert not is_hermitian(BiPoly({(1, 1): I}))


def test_homogeneous_degree_examples():
    assert homogeneous_degree(BiPoly({(2, 2): Fraction(1, 2)})) == 4
    assert homogeneous_degree(BiPoly({(1, 1): 1, (2, 2): 1})) is None
    assert homogeneous_degree(BiPoly({(3, 1): Fraction(1, 4), (1, 3): Fraction(1, 4), (2, 2): 1})) == 4


def test_gaussian_rational_arithmetic():
    a = GaussianRational(1, 2)
    b = GaussianRational(Fraction(1, 3), -1)
    assert a * b / b == a
    assert (a * a.conjugate()).im == 0
    assert a ** -1 * a == GaussianRational(1)
    assert GaussianRational.parse("3/4,-1/2") == GaussianRational(Fraction(3, 4), Fraction(-1, 2))
    with pytest.raises(ZeroDivisionError):
        a / GaussianRational(0)


@given(gaussian)
def test_gaussian_json_round_trip(g):
    assert GaussianRational.from_json(g.to_json()) == g


@settings(max_examples=60, deadline=None)
@given(bipolys(), bipolys(), bipolys())
def test_ring_axioms(f, g, h):
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f + g == g + f
    assert f * g == g * f
    assert (f - f).is_zero()


@settings(max_examples=60, deadline=None)
@given(bipolys(max_deg=4))
def test_mixed_derivatives_commute(f):
    assert f.d("z").d("w") == f.d("w").d("z")


@settings(max_examples=60, deadline=None)
@given(bipolys(), bipolys())
def test_leibniz_rule(f, g):
    assert (f * g).d("z") == f.d("z") * g + f * g.d("z")


@settings(max_examples=40, deadline=None)
@given(hermitian_bipolys(), st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False), min_size=1, max_size=5))
def test_hermitian_is_real_on_diagonal(f, zs):
    assert is_hermitian(f)
    z = np.array(zs)
    vals = f.eval(z, np.conj(z))
    scale = max(1.0, float(np.max(np.abs(vals))))
    assert np.all(np.abs(vals.imag) <= 1e-12 * scale)


@settings(max_examples=60, deadline=None)
@given(bipolys(), gaussian, gaussian)
def test_float_eval_matches_exact(f, z, w):
    exact = complex(f.eval_exact(z, w))
    approx = complex(f.eval(complex(z), complex(w)))
    assert abs(exact - approx) <= 1e-12 * max(1.0, abs(exact))


@settings(max_examples=60, deadline=None)
@given(bipolys())
def test_bipoly_json_round_trip(f):
    assert BiPoly.from_json(f.to_json()) == f


@settings(max_examples=60, deadline=None)
@given(bipolys())
def test_str_reparses(f):
    assert parse_poly(str(f)) == f


def test_eval_vectorizes():
    f = parse_poly("z*w + 2")
    z = np.array([0, 1, 1j])
    assert np.allclose(f.eval(z, np.conj(z)), [2, 3, 3])
