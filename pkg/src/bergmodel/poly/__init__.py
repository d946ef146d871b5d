"""Exact polynomial and rational-function algebra in ``(z, w)``."""

from .bipoly import BiPoly, homogeneous_degree, is_hermitian, wirtinger_d
from .gaussian import GaussianRational
from .grammar import ParseError, parse_poly
from .rational import PoleError, RationalFn, rf_arith, rf_d, rf_eval
from .weights import (
    WeightReport,
    admissible_weight_check,
    circle_dominance_certificate,
    monomial_weight,
    q_and_Q,
    q_from_q,
)

__all__ = [
    "BiPoly",
    "GaussianRational",
    "ParseError",
    "PoleError",
    "RationalFn",
    "WeightReport",
    "admissible_weight_check",
    "circle_dominance_certificate",
    "homogeneous_degree",
    "is_hermitian",
    "monomial_weight",
    "parse_poly",
    "q_and_Q",
    "q_from_q",
    "rf_arith",
    "rf_d",
    "rf_eval",
    "wirtinger_d",
]
