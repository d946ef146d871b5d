"""Boundary-limit transforms of the model kernel and the Kähler-Einstein test.

``Bt_a(z1) = (1/pi) int_0^inf e^{-s} s^{1 + 2/r + a} B_p(s^{1/r} z1) ds``

with derivatives taken under the integral: ``d^a1 dbar^a2`` of the integrand
picks up ``s^{(a1+a2)/r}`` from the dilation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from .model_kernel import KernelModel, monomial_kernel, monomial_series_model
from .numerics import QuadSpec, quad_finite, quad_semiinf
from .poly import BiPoly, monomial_weight, q_and_Q

TAIL_WEIGHT = 1e-16
S_MAX = -math.log(TAIL_WEIGHT)
QUAD_TOL = 1e-13
KE_CONSTANT = 9.0 * math.pi ** 2 / 2.0


class RadiusError(ValueError):
    """The dilated ray leaves the region where the kernel model is validated."""


class MonomialSource:
    """Kernel source for ``p = (c/2)|z|^r``: closed-form diagonal, series derivatives."""

    def __init__(self, c, r: int, dmax: int = 80):
        self.c = float(c)
        self.r = int(r)
        self.p = monomial_weight(Fraction(c).limit_denominator(10 ** 12), r)
        self._series = monomial_series_model(c, r, dmax)
        self.center = 0j

    @property
    def validated_radius(self) -> float:
        return self._series.validated_radius

    def diag(self, z, check_radius: bool = True):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.array([monomial_kernel(self.c, self.r, v, v).real for v in z])
        return out if out.size > 1 else float(out[0])

    def diag_derivative(self, a1: int, a2: int, z, check_radius: bool = True):
        if a1 == 0 and a2 == 0:
            return self.diag(z)
        return self._series.diag_derivative(a1, a2, z, check_radius=check_radius)


def _check_ray(source, z1: complex, s_max: float) -> None:
    radius = getattr(source, "validated_radius", math.inf)
    center = getattr(source, "center", 0j)
    far = abs(s_max ** (1.0 / source.r) * z1 - center)
    near = abs(center)
    if max(far, near) > radius:
        raise RadiusError(
            f"dilated ray reaches distance {max(far, near):.4g} from the model center, "
            f"beyond the validated radius {radius:.4g}; raise dmax or move z1 toward 0"
        )


def b_tilde_deriv(source, alpha0: int, a1: int, a2: int, z1: complex,
                  s_max: float = S_MAX, tol: float = QUAD_TOL) -> complex:
    """``d^a1 dbar^a2 Bt_alpha0`` at ``z1`` by quadrature along the dilated ray."""
    if alpha0 not in (0, 1, 2):
        raise ValueError("alpha0 must be 0, 1 or 2")
    if a1 < 0 or a2 < 0 or a1 + a2 > 2:
        raise ValueError("derivative orders need a1 + a2 <= 2")
    z1 = complex(z1)
    _check_ray(source, z1, s_max)
    r = source.r
    power = 1.0 + 2.0 / r + alpha0 + (a1 + a2) / r

    def f(s):
        s = np.asarray(s, dtype=float)
        vals = np.asarray(source.diag_derivative(a1, a2, s ** (1.0 / r) * z1, check_radius=False))
        return np.exp(-s) * s ** power * vals

    re, _ = quad_finite(lambda s: f(s).real, 0.0, s_max, tol=tol)
    im, _ = quad_finite(lambda s: f(s).imag, 0.0, s_max, tol=tol)
    return complex(re, im) / math.pi


def b_tilde(source, alpha0: int, z1: complex, s_max: float = S_MAX, tol: float = QUAD_TOL) -> float:
    return b_tilde_deriv(source, alpha0, 0, 0, z1, s_max, tol).real


@dataclass(frozen=True)
class KEResidual:
    lhs: float
    rhs: float
    residual: float
    ratio: float
    z1: complex
    matrix: Optional[np.ndarray] = None

    def as_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "ratio": self.ratio,
            "z1": [self.z1.real, self.z1.imag],
        }


def ke_matrix(source, p: BiPoly, z1: complex) -> np.ndarray:
    """The 3x3 matrix whose determinant is compared with ``(9 pi^2 / 2) Bt_0^4``."""
    z1 = complex(z1)
    q, _ = q_and_Q(p)
    lap = 4.0 * complex(q.eval(z1, z1.conjugate())).real

    def T(a0, a1=0, a2=0):
        return b_tilde_deriv(source, a0, a1, a2, z1)

    B0, B1, B2 = T(0), T(1), T(2)
    return np.array(
        [
            [B0, T(0, 0, 1), B1],
            [T(0, 1, 0), T(0, 1, 1) + 0.5 * lap * B1, T(1, 1, 0)],
            [B1, T(1, 0, 1), B2],
        ],
        dtype=complex,
    )


def ke_determinant(source, z1: complex = 0j, p: Optional[BiPoly] = None) -> KEResidual:
    """Determinant side and ``(9 pi^2/2) Bt_0^4`` side of the KE comparison at ``z1``."""
    if p is None:
        p = source.p
    m = ke_matrix(source, p, z1)
    det = np.linalg.det(m)
    lhs = float(det.real)
    rhs = KE_CONSTANT * float(m[0, 0].real) ** 4
    return KEResidual(lhs=lhs, rhs=rhs, residual=lhs - rhs, ratio=lhs / rhs, z1=complex(z1), matrix=m)


def quadratic_root_check(r: int) -> Tuple[Fraction, Fraction, bool]:
    """``(1 + 4/r)(2 + 2/r)`` against ``(9/4)(1 + 2/r)^2`` in exact arithmetic."""
    if r < 2 or r % 2:
        raise ValueError("r must be an even integer >= 2")
    x = Fraction(1, r)
    lhs = (1 + 4 * x) * (2 + 2 * x)
    rhs = Fraction(9, 4) * (1 + 2 * x) ** 2
    return lhs, rhs, lhs == rhs


# -- Watson-Laplace bookkeeping -----------------------------------------------------

@dataclass(frozen=True)
class WatsonExpansion:
    """``T(t) ~ sum_j c_j t^{3+a-j} + d0 ln t + O(1)`` for ``T(t) = (1/pi) int e^{-tau/t} tau^{1+a} sigma(tau) dtau``."""

    c: Tuple[float, ...]
    d0: float
    alpha0: int
    r: int

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        top = 3 + self.alpha0
        out = sum(cj * t ** (top - j) for j, cj in enumerate(self.c))
        return out + self.d0 * np.log(t)


def watson_coeffs(b: Sequence[float], alpha0: int, r: int, N: Optional[int] = None) -> WatsonExpansion:
    """Term-wise Laplace integration of ``sigma(tau) = (tau / 2 pi) sum_j b_j tau^{-j}``."""
    if alpha0 < 0:
        raise ValueError("alpha0 must be nonnegative")
    b = [float(v) for v in b]
    if N is None:
        N = len(b) - 1
    if N > len(b) - 1:
        raise ValueError("N must not exceed len(b) - 1")
    top = 3 + alpha0
    c = tuple(math.gamma(top - j) * b[j] / (2.0 * math.pi ** 2) for j in range(min(N + 1, top)))
    d0 = b[top] / (2.0 * math.pi ** 2) if top <= N else 0.0
    return WatsonExpansion(c=c, d0=d0, alpha0=alpha0, r=r)


def smooth_cutoff(tau):
    """C-infinity step: 0 on ``[0, 1/2]``, 1 on ``[1, inf)``."""
    tau = np.asarray(tau, dtype=float)
    x = np.clip(2.0 * tau - 1.0, 0.0, 1.0)

    def g(v):
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(v > 0, np.exp(-1.0 / np.where(v > 0, v, 1.0)), 0.0)

    return g(x) / (g(x) + g(1.0 - x))


def synthetic_transform(b: Sequence[float], alpha0: int, t: float, tol: float = 1e-13) -> float:
    """``(1/pi) int e^{-tau/t} tau^{1+a} chi(tau) (tau/2pi) sum_j b_j tau^{-j} dtau``."""
    b = np.asarray(list(b), dtype=float)
    if b.size == 0:
        return 0.0

    def sym(tau):
        tau = np.asarray(tau, dtype=float)
        powers = tau[..., None] ** (-np.arange(b.size))
        return tau / (2.0 * math.pi) * (powers @ b)

    def f(tau):
        return np.exp(-tau / t) * tau ** (1 + alpha0) * smooth_cutoff(tau) * sym(tau)

    head, _ = quad_finite(f, 0.5, 1.0, tol=tol)
    spec = QuadSpec(rel_tol=tol, abs_tol=1e-300, max_levels=10)
    tail, _ = quad_semiinf(lambda x: f(1.0 + x), spec, scale=t)
    return (head + tail) / math.pi


def watson_vs_quadrature(b: Sequence[float], alpha0: int, r: int, t_grid: Sequence[float]) -> float:
    """Max over ``t`` of ``|T_quad - T_watson| / t^{3+a}``."""
    w = watson_coeffs(b, alpha0, r) if len(b) else WatsonExpansion((), 0.0, alpha0, r)
    dev = 0.0
    for t in t_grid:
        num = synthetic_transform(b, alpha0, t)
        asym = float(w.evaluate(t)) if len(b) else 0.0
        dev = max(dev, abs(num - asym) / t ** (3 + alpha0))
    return dev


@dataclass(frozen=True)
class LogFit:
    d0: float
    e0: float
    e1: float
    expected: float
    relative_error: float


def fit_log_coefficient(b: Sequence[float], alpha0: int, t_grid: Sequence[float]) -> LogFit:
    """Fit ``T - sum_{j<3+a} c_j t^{3+a-j} = d0 ln t + e0 + e1 / t`` over ``t_grid``."""
    w = watson_coeffs(b, alpha0, 2)
    t = np.asarray(t_grid, dtype=float)
    power_part = WatsonExpansion(w.c, 0.0, alpha0, 2).evaluate(t)
    y = np.array([synthetic_transform(b, alpha0, tk) for tk in t]) - power_part
    V = np.column_stack([np.log(t), np.ones_like(t), 1.0 / t])
    (d0, e0, e1), *_ = np.linalg.lstsq(V, y, rcond=None)
    expected = w.d0
    rel = abs(d0 - expected) / abs(expected) if expected else abs(d0)
    return LogFit(float(d0), float(e0), float(e1), expected, float(rel))
