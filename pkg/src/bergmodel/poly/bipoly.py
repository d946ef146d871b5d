"""Exact bivariate polynomials in ``(z, w)`` over the Gaussian rationals.

``w`` stands for the complexified conjugate variable: a real-valued weight
``p(z, conj z)`` is stored as the Hermitian polynomial ``p(z, w)``.

Coefficients are kept as Gaussian integers over one common positive
denominator, which keeps products and sums in plain integer arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, Mapping, Tuple

import numpy as np

from .gaussian import GaussianRational

Exp = Tuple[int, int]


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


class BiPoly:
    """Immutable polynomial ``sum c[i,j] z**i w**j`` with exact coefficients."""

    __slots__ = ("_terms", "_den", "_hash")

    def __init__(self, terms: Mapping[Exp, object] | None = None):
        num: Dict[Exp, Tuple[int, int]] = {}
        den = 1
        if terms:
            coeffs = {}
            for (i, j), c in terms.items():
                if i < 0 or j < 0:
                    raise ValueError(f"negative exponent {(i, j)}")
                g = GaussianRational.coerce(c)
                if not g.is_zero():
                    coeffs[(int(i), int(j))] = g
                    den = _lcm(den, _lcm(g.re.denominator, g.im.denominator))
            for e, g in coeffs.items():
                num[e] = (int(g.re * den), int(g.im * den))
        self._set(num, den)

    def _set(self, num: Dict[Exp, Tuple[int, int]], den: int) -> None:
        num = {e: c for e, c in num.items() if c[0] or c[1]}
        if not num:
            den = 1
        else:
            g = den
            for a, b in num.values():
                g = gcd(g, gcd(a, b))
                if g == 1:
                    break
            if g > 1:
                num = {e: (a // g, b // g) for e, (a, b) in num.items()}
                den //= g
        object.__setattr__(self, "_terms", num)
        object.__setattr__(self, "_den", den)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _raw(cls, num: Dict[Exp, Tuple[int, int]], den: int) -> "BiPoly":
        obj = cls.__new__(cls)
        if den < 0:
            num = {e: (-a, -b) for e, (a, b) in num.items()}
            den = -den
        obj._set(num, den)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("BiPoly is immutable")

    # -- constructors ------------------------------------------------------
    @classmethod
    def const(cls, c) -> "BiPoly":
        return cls({(0, 0): c})

    @classmethod
    def z(cls) -> "BiPoly":
        return cls({(1, 0): 1})

    @classmethod
    def w(cls) -> "BiPoly":
        return cls({(0, 1): 1})

    @classmethod
    def monomial(cls, i: int, j: int, c=1) -> "BiPoly":
        return cls({(i, j): c})

    @classmethod
    def coerce(cls, value) -> "BiPoly":
        if isinstance(value, BiPoly):
            return value
        return cls.const(value)

    # -- inspection --------------------------------------------------------
    @property
    def terms(self) -> Dict[Exp, GaussianRational]:
        d = self._den
        return {
            e: GaussianRational(Fraction(a, d), Fraction(b, d))
            for e, (a, b) in sorted(self._terms.items())
        }

    def coeff(self, i: int, j: int) -> GaussianRational:
        a, b = self._terms.get((i, j), (0, 0))
        return GaussianRational(Fraction(a, self._den), Fraction(b, self._den))

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(e == (0, 0) for e in self._terms)

    @property
    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(i + j for i, j in self._terms)

    def exponents(self) -> list:
        return sorted(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BiPoly):
            try:
                other = BiPoly.const(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self._den == other._den and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self._den, frozenset(self._terms.items()))))
        return self._hash

    # -- ring operations ---------------------------------------------------
    def __neg__(self) -> "BiPoly":
        return BiPoly._raw({e: (-a, -b) for e, (a, b) in self._terms.items()}, self._den)

    def __add__(self, other) -> "BiPoly":
        other = BiPoly.coerce(other)
        l = _lcm(self._den, other._den)
        s1, s2 = l // self._den, l // other._den
        out = {e: (a * s1, b * s1) for e, (a, b) in self._terms.items()}
        for e, (a, b) in other._terms.items():
            a0, b0 = out.get(e, (0, 0))
            out[e] = (a0 + a * s2, b0 + b * s2)
        return BiPoly._raw(out, l)

    __radd__ = __add__

    def __sub__(self, other) -> "BiPoly":
        return self + (-BiPoly.coerce(other))

    def __rsub__(self, other) -> "BiPoly":
        return BiPoly.coerce(other) - self

    def __mul__(self, other) -> "BiPoly":
        if not isinstance(other, BiPoly):
            g = GaussianRational.coerce(other)
            d = _lcm(g.re.denominator, g.im.denominator)
            ga, gb = int(g.re * d), int(g.im * d)
            out = {e: (a * ga - b * gb, a * gb + b * ga) for e, (a, b) in self._terms.items()}
            return BiPoly._raw(out, self._den * d)
        out: Dict[Exp, list] = {}
        t2 = list(other._terms.items())
        for (i1, j1), (a1, b1) in self._terms.items():
            if b1 == 0:
                for (i2, j2), (a2, b2) in t2:
                    key = (i1 + i2, j1 + j2)
                    acc = out.get(key)
                    if acc is None:
                        out[key] = [a1 * a2, a1 * b2]
                    else:
                        acc[0] += a1 * a2
                        acc[1] += a1 * b2
            else:
                for (i2, j2), (a2, b2) in t2:
                    key = (i1 + i2, j1 + j2)
                    acc = out.get(key)
                    if acc is None:
                        out[key] = [a1 * a2 - b1 * b2, a1 * b2 + b1 * a2]
                    else:
                        acc[0] += a1 * a2 - b1 * b2
                        acc[1] += a1 * b2 + b1 * a2
        return BiPoly._raw({e: (v[0], v[1]) for e, v in out.items()}, self._den * other._den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "BiPoly":
        """Division by a nonzero scalar only."""
        g = GaussianRational.coerce(other)
        return self * (GaussianRational(1) / g)

    def __pow__(self, n: int) -> "BiPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("BiPoly powers must be nonnegative integers")
        result = BiPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- calculus ----------------------------------------------------------
    def d(self, var: str) -> "BiPoly":
        """Formal partial derivative in ``'z'`` or ``'w'``."""
        if var == "z":
            out = {(i - 1, j): (i * a, i * b) for (i, j), (a, b) in self._terms.items() if i > 0}
        elif var == "w":
            out = {(i, j - 1): (j * a, j * b) for (i, j), (a, b) in self._terms.items() if j > 0}
        else:
            raise ValueError(f"unknown variable {var!r}; expected 'z' or 'w'")
        return BiPoly._raw(out, self._den)

    def conj_swap(self) -> "BiPoly":
        """``f*(z, w) = conj(f(conj w, conj z))``; fixed exactly by Hermitian f."""
        return BiPoly._raw({(j, i): (a, -b) for (i, j), (a, b) in self._terms.items()}, self._den)

    def homogeneous_part(self, degree: int) -> "BiPoly":
        return BiPoly._raw(
            {e: c for e, c in self._terms.items() if e[0] + e[1] == degree}, self._den
        )

    # -- evaluation --------------------------------------------------------
    def __call__(self, z, w):
        if isinstance(z, (GaussianRational, int, Fraction)) and isinstance(
            w, (GaussianRational, int, Fraction)
        ):
            return self.eval_exact(z, w)
        return self.eval(z, w)

    def eval_exact(self, z, w) -> GaussianRational:
        z = GaussianRational.coerce(z)
        w = GaussianRational.coerce(w)
        zp: Dict[int, GaussianRational] = {0: GaussianRational(1)}
        wp: Dict[int, GaussianRational] = {0: GaussianRational(1)}
        total = GaussianRational(0)
        for (i, j), (a, b) in self._terms.items():
            if i not in zp:
                zp[i] = z ** i
            if j not in wp:
                wp[j] = w ** j
            total = total + GaussianRational(a, b) * zp[i] * wp[j]
        return total / self._den

    def to_array(self) -> np.ndarray:
        """Complex coefficient array ``C[i, j]`` (floating)."""
        if not self._terms:
            return np.zeros((1, 1), dtype=complex)
        ni = max(i for i, _ in self._terms) + 1
        nj = max(j for _, j in self._terms) + 1
        arr = np.zeros((ni, nj), dtype=complex)
        for (i, j), (a, b) in self._terms.items():
            arr[i, j] = complex(a / self._den, b / self._den)
        return arr

    def eval(self, z, w):
        """Floating evaluation; ``z`` and ``w`` may be numpy arrays."""
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        return np.polynomial.polynomial.polyval2d(z, w, self.to_array())

    # -- division by linear forms -----------------------------------------
    def divide_linear(self, a) -> Tuple["BiPoly", bool]:
        """Divide by ``z + a*w``; returns ``(quotient, exact)``."""
        a = GaussianRational.coerce(a)
        if self.is_zero():
            return self, True
        by_z: Dict[int, Dict[int, GaussianRational]] = {}
        for (i, j), c in self.terms.items():
            by_z.setdefault(i, {})[j] = c
        n = max(by_z)
        if n == 0:
            return BiPoly(), False
        # synthetic division in z by (z - r), r = -a*w
        quot: Dict[int, Dict[int, GaussianRational]] = {}
        carry: Dict[int, GaussianRational] = {}
        for k in range(n, 0, -1):
            ck = dict(by_z.get(k, {}))
            for j, c in carry.items():
                ck[j] = ck.get(j, GaussianRational(0)) + c
            quot[k - 1] = ck
            carry = {j + 1: -a * c for j, c in ck.items() if not c.is_zero()}
        rem = dict(by_z.get(0, {}))
        for j, c in carry.items():
            rem[j] = rem.get(j, GaussianRational(0)) + c
        exact = all(c.is_zero() for c in rem.values())
        out = {}
        for i, row in quot.items():
            for j, c in row.items():
                if not c.is_zero():
                    out[(i, j)] = c
        return BiPoly(out), exact

    # -- display -----------------------------------------------------------
    def __repr__(self) -> str:
        return f"BiPoly({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (i, j), c in self.terms.items():
            mono = "*".join(
                s for s in (_pw("z", i), _pw("w", j)) if s
            )
            cs = str(c)
            if not mono:
                parts.append(cs)
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> list:
        return [[i, j, c.to_json()] for (i, j), c in self.terms.items()]

    @classmethod
    def from_json(cls, items: Iterable) -> "BiPoly":
        return cls({(int(i), int(j)): GaussianRational.from_json(c) for i, j, c in items})


def _pw(var: str, n: int) -> str:
    if n == 0:
        return ""
    if n == 1:
        return var
    return f"{var}^{n}"


def wirtinger_d(f: BiPoly, var: str) -> BiPoly:
    return f.d(var)


def is_hermitian(f: BiPoly) -> bool:
    """True iff ``coeff(i, j) == conj(coeff(j, i))`` for every exponent pair."""
    return f.conj_swap() == f


def homogeneous_degree(f: BiPoly):
    """Common total degree of all terms, or ``None`` if mixed."""
    if f.is_zero():
        raise ValueError("the zero polynomial has no homogeneous degree")
    degrees = {i + j for i, j in f.exponents()}
    if len(degrees) == 1:
        return degrees.pop()
    return None
