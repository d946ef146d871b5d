"""Weight admissibility and the ``q``/``Q`` building blocks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .bipoly import BiPoly, homogeneous_degree, is_hermitian

SUBHARMONIC_MARGIN = 1e-9
DEFAULT_NTHETA = 4096


@dataclass(frozen=True)
class WeightReport:
    hermitian: bool
    degree: Optional[int]
    even_degree: bool
    no_pure_terms: bool
    subharmonic: bool
    nonharmonic: bool
    min_circle_q: float

    @property
    def admissible(self) -> bool:
        return (
            self.hermitian
            and self.even_degree
            and self.no_pure_terms
            and self.subharmonic
            and self.nonharmonic
        )

    def as_dict(self) -> dict:
        return {
            "hermitian": self.hermitian,
            "degree": self.degree,
            "even_degree": self.even_degree,
            "no_pure_terms": self.no_pure_terms,
            "subharmonic": self.subharmonic,
            "nonharmonic": self.nonharmonic,
            "min_circle_q": self.min_circle_q,
            "admissible": self.admissible,
        }


def q_and_Q(p: BiPoly) -> Tuple[BiPoly, BiPoly]:
    """``q = p_zw`` (a quarter of the Laplacian) and ``Q = q q_zw - q_z q_w``."""
    q = p.d("z").d("w")
    return q, q_from_q(q)


def q_from_q(q: BiPoly) -> BiPoly:
    return q * q.d("z").d("w") - q.d("z") * q.d("w")


def circle_values(f: BiPoly, ntheta: int = DEFAULT_NTHETA) -> np.ndarray:
    theta = 2.0 * np.pi * np.arange(ntheta) / ntheta
    z = np.exp(1j * theta)
    return f.eval(z, np.conj(z))


def circle_dominance_certificate(q: BiPoly) -> bool:
    """Exact sufficient test for ``q >= 0`` on the unit circle.

    On ``|z| = 1`` the term ``z^i w^j`` becomes ``exp(i(i-j)theta)``; if the
    constant Fourier mode dominates the sum of the other modes' moduli the
    restriction is nonnegative. Moduli are bounded by ``|re| + |im|`` so the
    test stays rational.
    """
    modes = {}
    for (i, j), c in q.terms.items():
        modes[i - j] = modes.get(i - j, 0) + c
    c0 = modes.pop(0, 0)
    c0 = c0 if not isinstance(c0, int) else None
    if c0 is None or not c0.is_real() or c0.re <= 0:
        return False
    bound = sum(abs(c.re) + abs(c.im) for c in modes.values())
    return bound <= c0.re


def admissible_weight_check(p: BiPoly, ntheta: int = DEFAULT_NTHETA,
                            margin: float = SUBHARMONIC_MARGIN,
                            exact: bool = False) -> WeightReport:
    """Report on the hypotheses a model weight must satisfy.

    Subharmonicity is sampled on the unit circle: ``q`` is homogeneous of
    degree ``r - 2``, so its sign on the circle fixes its sign everywhere.
    For non-homogeneous input the circle test is only indicative. With
    ``exact=True`` a weight whose circle restriction passes
    :func:`circle_dominance_certificate` is accepted without sampling.
    """
    herm = is_hermitian(p)
    deg = homogeneous_degree(p) if not p.is_zero() else None
    even = deg is not None and deg >= 2 and deg % 2 == 0
    pure = any((i == 0) != (j == 0) for i, j in p.exponents())
    q, _ = q_and_Q(p)
    nonharmonic = not q.is_zero()
    if nonharmonic:
        vals = circle_values(q, ntheta)
        min_q = float(np.min(vals.real))
        sub = bool(herm and min_q >= -margin and np.max(np.abs(vals.imag)) <= 1e-9 * max(1.0, np.max(np.abs(vals))))
        if exact and herm:
            sub = sub or circle_dominance_certificate(q)
    else:
        min_q = 0.0
        sub = herm
    return WeightReport(
        hermitian=herm,
        degree=deg,
        even_degree=even,
        no_pure_terms=not pure,
        subharmonic=sub,
        nonharmonic=nonharmonic,
        min_circle_q=min_q,
    )


def monomial_weight(c, r: int) -> BiPoly:
    """``p = (c/2) (z w)^(r/2)``."""
    if r < 2 or r % 2:
        raise ValueError("r must be an even integer >= 2")
    from fractions import Fraction

    return BiPoly.monomial(r // 2, r // 2, Fraction(c) / 2)
