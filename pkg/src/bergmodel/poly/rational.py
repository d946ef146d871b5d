"""Rational functions in ``(z, w)`` kept unreduced, with factored denominators.

No multivariate gcd is ever taken. The denominator is stored as a product of
powers of base polynomials; identical bases are merged by exact equality. In
this package every denominator is a power of ``q``, so the derivative chains
behind ``b2``/``b3`` grow the exponent by one per differentiation instead of
doubling the denominator degree.
"""

from __future__ import annotations

from typing import Dict, Tuple

from .bipoly import BiPoly, Exp
from .gaussian import GaussianRational


class PoleError(ZeroDivisionError):
    """Evaluation at a zero of the denominator."""


class RationalFn:
    """Immutable quotient ``num / prod(base**exp)``."""

    __slots__ = ("num", "_factors")

    def __init__(self, num, den=None):
        num = BiPoly.coerce(num)
        factors: Dict[BiPoly, int] = {}
        if den is not None:
            den = BiPoly.coerce(den)
            if den.is_zero():
                raise ZeroDivisionError("rational function with zero denominator")
            if den.is_constant():
                num = num / den.coeff(0, 0)
            else:
                factors[den] = 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "_factors", factors)

    @classmethod
    def _make(cls, num: BiPoly, factors: Dict[BiPoly, int]) -> "RationalFn":
        obj = cls.__new__(cls)
        object.__setattr__(obj, "num", num)
        object.__setattr__(obj, "_factors", {b: e for b, e in factors.items() if e > 0})
        return obj

    @classmethod
    def power(cls, base: BiPoly, exponent: int) -> "RationalFn":
        """``base**exponent`` for any integer exponent."""
        if exponent >= 0:
            return cls(base ** exponent)
        if base.is_zero():
            raise ZeroDivisionError("negative power of the zero polynomial")
        if base.is_constant():
            return cls(BiPoly.const(GaussianRational(1) / base.coeff(0, 0) ** (-exponent)))
        return cls._make(BiPoly.const(1), {base: -exponent})

    @classmethod
    def coerce(cls, value) -> "RationalFn":
        if isinstance(value, RationalFn):
            return value
        return cls(BiPoly.coerce(value))

    def __setattr__(self, name, value):
        raise AttributeError("RationalFn is immutable")

    @property
    def factors(self) -> Tuple[Tuple[BiPoly, int], ...]:
        return tuple(self._factors.items())

    @property
    def den(self) -> BiPoly:
        out = BiPoly.const(1)
        for b, e in self._factors.items():
            out = out * b ** e
        return out

    def is_zero(self) -> bool:
        return self.num.is_zero()

    # -- field operations --------------------------------------------------
    def _common(self, other: "RationalFn"):
        """Rewrite both numerators over the factorwise-max denominator."""
        common = dict(self._factors)
        for b, e in other._factors.items():
            common[b] = max(common.get(b, 0), e)
        n1, n2 = self.num, other.num
        for b, e in common.items():
            k1 = e - self._factors.get(b, 0)
            k2 = e - other._factors.get(b, 0)
            if k1:
                n1 = n1 * b ** k1
            if k2:
                n2 = n2 * b ** k2
        return n1, n2, common

    def __add__(self, other) -> "RationalFn":
        other = RationalFn.coerce(other)
        n1, n2, common = self._common(other)
        return RationalFn._make(n1 + n2, common)

    __radd__ = __add__

    def __neg__(self) -> "RationalFn":
        return RationalFn._make(-self.num, self._factors)

    def __sub__(self, other) -> "RationalFn":
        return self + (-RationalFn.coerce(other))

    def __rsub__(self, other) -> "RationalFn":
        return RationalFn.coerce(other) - self

    def __mul__(self, other) -> "RationalFn":
        if not isinstance(other, (RationalFn, BiPoly)):
            return RationalFn._make(self.num * GaussianRational.coerce(other), self._factors)
        other = RationalFn.coerce(other)
        factors = dict(self._factors)
        for b, e in other._factors.items():
            factors[b] = factors.get(b, 0) + e
        return RationalFn._make(self.num * other.num, factors)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFn":
        if not isinstance(other, (RationalFn, BiPoly)):
            return self * (GaussianRational(1) / GaussianRational.coerce(other))
        other = RationalFn.coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        num = self.num
        for b, e in other._factors.items():
            num = num * b ** e
        factors = dict(self._factors)
        onum = other.num
        if onum.is_constant():
            num = num / onum.coeff(0, 0)
        else:
            factors[onum] = factors.get(onum, 0) + 1
        return RationalFn._make(num, factors)

    def __rtruediv__(self, other) -> "RationalFn":
        return RationalFn.coerce(other) / self

    def __pow__(self, n: int) -> "RationalFn":
        if n < 0:
            return RationalFn(1) / self ** (-n)
        return RationalFn._make(self.num ** n, {b: e * n for b, e in self._factors.items()})

    def d(self, var: str) -> "RationalFn":
        """Quotient-rule derivative, bumping only the factors that move."""
        moving = {b: b.d(var) for b in self._factors}
        moving = {b: db for b, db in moving.items() if not db.is_zero()}
        # N' * prod(moving b) - N * sum e_i b_i' * prod_{j != i} b_j
        lead = self.num.d(var)
        for b in moving:
            lead = lead * b
        for b, db in moving.items():
            term = self.num * db * self._factors[b]
            for other in moving:
                if other is not b:
                    term = term * other
            lead = lead - term
        factors = dict(self._factors)
        for b in moving:
            factors[b] += 1
        return RationalFn._make(lead, factors)

    def equals(self, other) -> bool:
        """Exact identity test by cross-multiplication over a common denominator."""
        other = RationalFn.coerce(other)
        n1, n2, _ = self._common(other)
        return (n1 - n2).is_zero()

    def __eq__(self, other) -> bool:
        try:
            return self.equals(other)
        except (TypeError, ValueError):
            return NotImplemented

    __hash__ = None

    # -- evaluation --------------------------------------------------------
    def eval_exact(self, z, w) -> GaussianRational:
        den = GaussianRational(1)
        for b, e in self._factors.items():
            den = den * b.eval_exact(z, w) ** e
        if den.is_zero():
            raise PoleError(f"pole of rational function at ({z}, {w})")
        return self.num.eval_exact(z, w) / den

    def eval(self, z, w):
        den = 1.0 + 0j
        for b, e in self._factors.items():
            den = den * b.eval(z, w) ** e
        if _any_zero(den):
            raise PoleError(f"pole of rational function at ({z}, {w})")
        return self.num.eval(z, w) / den

    def __call__(self, z, w):
        if isinstance(z, complex) or isinstance(w, complex) or isinstance(z, float):
            return self.eval(z, w)
        try:
            return self.eval_exact(z, w)
        except TypeError:
            return self.eval(z, w)

    def __repr__(self) -> str:
        if not self._factors:
            return f"RationalFn({self.num})"
        den = " * ".join(f"({b})^{e}" for b, e in self._factors.items())
        return f"RationalFn(({self.num}) / {den})"

    def to_json(self) -> dict:
        return {
            "num": self.num.to_json(),
            "den_factors": [{"base": b.to_json(), "exp": e} for b, e in self._factors.items()],
        }


def _any_zero(x) -> bool:
    import numpy as np

    return bool(np.any(np.asarray(x) == 0))


def rf_arith(a, b, op: str) -> RationalFn:
    a, b = RationalFn.coerce(a), RationalFn.coerce(b)
    if op == "+":
        return a + b
    if op in ("-", "−"):
        return a - b
    if op in ("*", "×"):
        return a * b
    if op in ("/", "÷"):
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def rf_d(g, var: str) -> RationalFn:
    return RationalFn.coerce(g).d(var)


def rf_eval(g, z, w):
    return RationalFn.coerce(g)(z, w)


__all__ = ["RationalFn", "PoleError", "rf_arith", "rf_d", "rf_eval", "Exp"]
