"""Exact diagonal expansion coefficients ``b0..b3`` of the model kernel.

With ``q = p_zw`` and ``Q = q q_zw - q_z q_w``::

    b0 = 4 q
    b1 = Q / q^2
    b2 = (1/6) d_z d_w (Q / q^3)
    b3 = (q/48) { [q^-1 d_z d_w]^2 R - q^-4 Q d_z d_w R - q^-1 (d_w R)(d_z R) },  R = Q/q^3

``w`` is evaluated at ``conj(z)`` for numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .divisibility import eqncomb3_lhs
from .poly import BiPoly, RationalFn, q_and_Q


class HarmonicWeightError(ValueError):
    pass


@dataclass(frozen=True)
class BCoeffs:
    q: BiPoly
    Q: BiPoly
    b0: BiPoly
    b1: RationalFn
    b2: RationalFn
    b3: RationalFn

    def as_list(self):
        return [RationalFn(self.b0), self.b1, self.b2, self.b3]


def b_coeffs(p: BiPoly) -> BCoeffs:
    q, Q = q_and_Q(p)
    if q.is_zero():
        raise HarmonicWeightError("p is harmonic (q == 0); the expansion is undefined")
    Qr = RationalFn(Q)
    R = Qr * RationalFn.power(q, -3)
    b1 = Qr * RationalFn.power(q, -2)
    b2 = R.d("z").d("w") * Fraction(1, 6)
    b3 = RationalFn(q) * eqncomb3_lhs(q) * Fraction(1, 48)
    return BCoeffs(q=q, Q=Q, b0=q * 4, b1=b1, b2=b2, b3=b3)


def eval_b(coeffs: BCoeffs, z: complex, tol: float = 1e-12) -> np.ndarray:
    """Floating ``(b0, b1, b2, b3)`` at ``z`` on the diagonal ``w = conj(z)``."""
    z = complex(z)
    w = z.conjugate()
    qv = complex(coeffs.q.eval(z, w))
    scale = max(1.0, float(np.max(np.abs(coeffs.q.to_array()))) * max(1.0, abs(z)) ** max(coeffs.q.degree, 0))
    if abs(qv) <= tol * scale:
        raise ZeroDivisionError(f"q vanishes at z = {z}; the expansion needs q != 0")
    vals = np.array([complex(b.eval(z, w)) for b in coeffs.as_list()])
    return vals


def b3_identity_bridge(p: BiPoly) -> RationalFn:
    """``(48/q) b3``, checked exactly against the divisibility-side combination."""
    c = b_coeffs(p)
    bridged = c.b3 * 48 / RationalFn(c.q)
    lhs = eqncomb3_lhs(c.q)
    if not bridged.equals(lhs):
        raise AssertionError("(48/q) b3 differs from the complexified combination")
    return bridged
