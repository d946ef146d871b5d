"""Divisibility classes ``D_a(k, lambda)`` and the b3-vanishing certificate.

A nonzero polynomial ``f`` is in ``D_a(k, lam)`` when
``f = (z + a w)^k * h`` with ``h(-a, 1) = lam``. For ``lam != 0`` the ``k`` is
the exact multiplicity of the linear factor; ``lam == 0`` only says "at least
``k``". Rational functions get ``k = k_num - k_den`` and the quotient of the
cofactor values.

The certificate decides whether the combination ``(48/q) * b3`` vanishes for
a Hermitian homogeneous ``q`` by an exact identity test, and, given a root
``a`` of ``q(., 1)`` in Q(i), records the leading divisibility class of that
combination as a witness.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from .poly import BiPoly, GaussianRational, RationalFn, homogeneous_degree, is_hermitian, q_from_q


class DivisibilityError(ValueError):
    pass


@dataclass(frozen=True)
class DivClass:
    a: GaussianRational
    k: int
    lam: GaussianRational

    def __post_init__(self):
        object.__setattr__(self, "a", GaussianRational.coerce(self.a))
        object.__setattr__(self, "lam", GaussianRational.coerce(self.lam))

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "k": self.k, "lambda": self.lam.to_json()}


def multiplicity(f: BiPoly, a) -> Tuple[int, BiPoly]:
    """Exact multiplicity of ``z + a w`` in ``f`` and the remaining cofactor."""
    if f.is_zero():
        raise DivisibilityError("multiplicity of the zero polynomial is undefined")
    a = GaussianRational.coerce(a)
    k = 0
    cof = f
    while True:
        quot, exact = cof.divide_linear(a)
        if not exact:
            return k, cof
        k += 1
        cof = quot


def cofactor_value(cof: BiPoly, a) -> GaussianRational:
    return cof.eval_exact(-GaussianRational.coerce(a), 1)


def poly_class(f: BiPoly, a) -> DivClass:
    k, cof = multiplicity(f, a)
    return DivClass(a, k, cofactor_value(cof, a))


def div_class(g, a) -> DivClass:
    """Class of a rational function (or polynomial) with respect to ``a``."""
    g = RationalFn.coerce(g)
    a = GaussianRational.coerce(a)
    if g.is_zero():
        raise DivisibilityError("divisibility class of the zero function is undefined")
    k, cof = multiplicity(g.num, a)
    lam = cofactor_value(cof, a)
    for base, e in g.factors:
        kb, cb = multiplicity(base, a)
        k -= e * kb
        lam = lam / cofactor_value(cb, a) ** e
    return DivClass(a, k, lam)


def rule_derivative(c: DivClass, var: str) -> DivClass:
    """``d/dz: (k-1, k lam)``; ``d/dw: (k-1, a k lam)``."""
    if var == "z":
        return DivClass(c.a, c.k - 1, c.lam * c.k)
    if var == "w":
        return DivClass(c.a, c.k - 1, c.a * c.lam * c.k)
    raise ValueError(f"unknown variable {var!r}")


def rule_combine(c1: DivClass, c2, op: str) -> DivClass:
    """Product, scalar multiple, sum and quotient rules.

    For ``op == 'scalar'`` the second argument is the complex scalar.
    """
    if op == "scalar":
        return DivClass(c1.a, c1.k, c1.lam * GaussianRational.coerce(c2))
    if c1.a != c2.a:
        raise DivisibilityError("classes refer to different linear factors")
    if op in ("*", "×"):
        return DivClass(c1.a, c1.k + c2.k, c1.lam * c2.lam)
    if op == "+":
        if c1.k == c2.k:
            return DivClass(c1.a, c1.k, c1.lam + c2.lam)
        lo = c1 if c1.k < c2.k else c2
        return DivClass(c1.a, lo.k, lo.lam)
    if op in ("/", "÷"):
        if c2.lam.is_zero():
            raise DivisibilityError("quotient rule needs a nonzero divisor coefficient")
        return DivClass(c1.a, c1.k - c2.k, c1.lam / c2.lam)
    raise ValueError(f"unknown operation {op!r}")


def _ddbar(g: RationalFn) -> RationalFn:
    return g.d("z").d("w")


def eqncomb3_lhs(q: BiPoly) -> RationalFn:
    """``[q^-1 d_z d_w]^2 R - q^-4 Q d_z d_w R - q^-1 (d_w R)(d_z R)``, ``R = q^-3 Q``."""
    if q.is_zero():
        raise DivisibilityError("q must not vanish identically")
    Q = q_from_q(q)
    inv_q = RationalFn.power(q, -1)
    R = RationalFn(Q) * RationalFn.power(q, -3)
    ddR = _ddbar(R)
    first = inv_q * _ddbar(inv_q * ddR)
    second = RationalFn(Q) * RationalFn.power(q, -4) * ddR
    third = inv_q * R.d("w") * R.d("z")
    return first - second - third


def t_formula(a, k: int, lam) -> GaussianRational:
    """Leading coefficient of the combination for ``q ~ D_a(k, lam)``."""
    a = GaussianRational.coerce(a)
    lam = GaussianRational.coerce(lam)
    if lam.is_zero():
        raise DivisibilityError("lambda must be nonzero")
    if k < 1:
        raise DivisibilityError("k must be at least 1")
    bracket = k * (k + 2) + (k + 3) * (2 * k + 4) * (2 * k + 5) + k * (k + 3)
    return -(a ** 3) * (k * (k + 2)) / lam ** 3 * bracket


@dataclass(frozen=True)
class Witness:
    a: GaussianRational
    k: int
    lam: GaussianRational
    T: GaussianRational
    lhs_class: DivClass


@dataclass(frozen=True)
class ObstructionCertificate:
    verdict: str
    monomial_data: Optional[Tuple[Fraction, int]] = None
    witness: Optional[Witness] = None
    note: str = ""

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict,
            "c0": None,
            "m": None,
            "a": None,
            "k": None,
            "lambda": None,
            "T": None,
            "lhs_k": None,
            "lhs_lambda": None,
        }
        if self.monomial_data is not None:
            out["c0"] = str(self.monomial_data[0])
            out["m"] = self.monomial_data[1]
        if self.witness is not None:
            w = self.witness
            out.update(
                a=w.a.to_json(),
                k=w.k,
                T=w.T.to_json(),
                lhs_k=w.lhs_class.k,
                lhs_lambda=w.lhs_class.lam.to_json(),
            )
            out["lambda"] = w.lam.to_json()
        if self.note:
            out["note"] = self.note
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _monomial_form(q: BiPoly) -> Optional[Tuple[Fraction, int]]:
    exps = q.exponents()
    if len(exps) != 1:
        return None
    (i, j), = exps
    c = q.coeff(i, j)
    if i != j or not c.is_real() or c.re <= 0:
        return None
    return c.re, i


def obstruction_certificate(q: BiPoly, hint_a=None) -> ObstructionCertificate:
    """Decide the b3 dichotomy for ``q`` by an exact zero test.

    Homogeneity is only needed for the monomial conclusion; a nonzero
    combination is reported for any Hermitian ``q``.
    """
    if q.is_zero():
        raise DivisibilityError("q must not vanish identically")
    if not is_hermitian(q):
        raise DivisibilityError("q must be Hermitian")
    lhs = eqncomb3_lhs(q)
    if lhs.is_zero():
        if homogeneous_degree(q) is None:
            # e.g. q = (1+z)(1+w) has Q = 0 without being a monomial
            raise DivisibilityError("the monomial conclusion needs a homogeneous q")
        mono = _monomial_form(q)
        if mono is None:
            raise AssertionError(f"combination vanishes but q = {q} is not c0 (zw)^m")
        return ObstructionCertificate("monomial", monomial_data=mono)
    if hint_a is None:
        return ObstructionCertificate("nonvanishing")
    a = GaussianRational.coerce(hint_a)
    if not q.eval_exact(-a, 1).is_zero():
        raise DivisibilityError(f"hint a = {a} is not a root of q(., 1) at -a")
    if a.is_zero():
        return ObstructionCertificate(
            "nonvanishing", note="hint a = 0 gives no witness for a non-monomial q"
        )
    cls = poly_class(q, a)
    if cls.lam.is_zero():
        raise DivisibilityError(
            f"the cofactor of (z + {a} w)^{cls.k} vanishes at the root; no witness for this q"
        )
    T = t_formula(a, cls.k, cls.lam)
    lhs_class = div_class(lhs, a)
    if lhs_class.k != -3 * cls.k - 6 or lhs_class.lam != T:
        raise AssertionError(
            f"witness mismatch: expected D_a({-3 * cls.k - 6}, {T}), got D_a({lhs_class.k}, {lhs_class.lam})"
        )
    return ObstructionCertificate(
        "nonvanishing", witness=Witness(a, cls.k, cls.lam, T, lhs_class)
    )
