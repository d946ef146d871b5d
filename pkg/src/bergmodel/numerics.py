"""Gamma functions and quadrature engines."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

EPS = 1e-16
_MAX_ITER = 10_000


class QuadratureError(RuntimeError):
    pass


# -- gamma functions -----------------------------------------------------------

def gamma(a: float) -> float:
    if not a > 0:
        raise ValueError(f"gamma is only provided for a > 0, got {a}")
    return math.gamma(a)


def _lower_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma ``P(a, x)`` by its power series."""
    if x == 0:
        return 0.0
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * EPS:
            break
    else:
        raise ArithmeticError("incomplete gamma series did not converge")
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_cf(a: float, x: float) -> float:
    """Regularized upper incomplete gamma ``Q(a, x)`` by modified Lentz."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            break
    else:
        raise ArithmeticError("incomplete gamma continued fraction did not converge")
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def regularized_upper_gamma(a: float, x: float) -> float:
    """``Q(a, x) = Gamma(a, x) / Gamma(a)``."""
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _lower_series(a, x)
    return _upper_cf(a, x)


def lower_incomplete_gamma(a: float, x: float) -> float:
    """Non-regularized lower part computed only by the series branch."""
    if not a > 0 or x < 0:
        raise ValueError("need a > 0 and x >= 0")
    return _lower_series(a, x) * math.gamma(a)


def upper_incomplete_gamma(a: float, x: float) -> float:
    """``Gamma(a, x) = int_x^inf t^(a-1) e^(-t) dt``."""
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if x == 0:
        return math.gamma(a)
    if x < a + 1.0:
        return math.gamma(a) * (1.0 - _lower_series(a, x))
    return math.gamma(a) * _upper_cf(a, x)


def scaled_lower_gamma(a: float, u: complex, log_scale: complex = 0.0) -> complex:
    """``exp(u + log_scale) * P(a, u)`` for complex ``u``, principal branch of ``u**a``.

    Equal to ``exp(log_scale) * u**a * sum_n u**n / Gamma(a + n + 1)``. The
    series is used for ``|u| < 30``; otherwise ``exp(u) - exp(u) Q(a, u)`` with
    the continued fraction for ``Q``, which converges off the negative real axis.
    ``log_scale`` lets callers fold in a decaying factor before anything overflows.
    """
    u = complex(u)
    if u == 0:
        return 0j
    log_u = cmath.log(u)
    if abs(u) < 2.0 or (abs(u) < 30.0 and abs(u) - u.real < 8.0):
        term = 1.0 + 0j
        total = term
        ap = a
        for _ in range(_MAX_ITER):
            ap += 1.0
            term *= u / ap
            total += term
            if abs(term) < abs(total) * EPS:
                break
        else:
            raise ArithmeticError("complex incomplete gamma series did not converge")
        return total * cmath.exp(a * log_u - math.lgamma(a + 1.0) + log_scale)
    tiny = 1e-300
    b = u + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            break
    else:
        raise ArithmeticError("complex incomplete gamma continued fraction did not converge")
    scaled_q = cmath.exp(a * log_u - math.lgamma(a) + log_scale) * h
    return cmath.exp(u + log_scale) - scaled_q


# -- quadrature ----------------------------------------------------------------

@dataclass(frozen=True)
class QuadSpec:
    """Settings for the semi-infinite rules.

    ``transform`` is ``"exp-sinh"`` (``x = e^{pi/2 sinh t}``) or
    ``"log-radial"`` (plain trapezoid in ``u = log x`` on ``[u_lo, u_hi]``).
    ``n_min`` is the node count of the coarsest level; levels halve the step.
    """

    n_min: int = 64
    transform: str = "exp-sinh"
    abs_tol: float = 1e-10
    rel_tol: float = 1e-13
    max_levels: int = 8
    t_lo: float = -5.0
    t_hi: float = 4.0
    u_lo: float = -40.0
    u_hi: float = 7.0

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be positive")
        if self.n_min < 16:
            raise ValueError("n_min must be at least 16")
        if self.transform not in ("exp-sinh", "log-radial"):
            raise ValueError(f"unknown transform {self.transform!r}")


def exp_sinh_nodes(h: float, t_lo: float = -5.0, t_hi: float = 4.0, scale: float = 1.0,
                   offset: int = 0, stride: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes/weights of ``x = scale * exp(pi/2 sinh t)`` on ``t = k h``.

    ``offset``/``stride`` select a subset of the grid (used for nested levels).
    """
    k0 = math.ceil(t_lo / h)
    k1 = math.floor(t_hi / h)
    k = np.arange(k0, k1 + 1)
    if stride != 1:
        k = k[(k - offset) % stride == 0]
    t = k * h
    x = scale * np.exp(0.5 * np.pi * np.sinh(t))
    wts = h * 0.5 * np.pi * np.cosh(t) * x
    return x, wts


def log_radial_nodes(h: float, u_lo: float = -40.0, u_hi: float = 7.0, scale: float = 1.0,
                     offset: int = 0, stride: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """Trapezoid nodes/weights in ``u = log(x / scale)`` on the grid ``u = k h``."""
    k = np.arange(math.ceil(u_lo / h), math.floor(u_hi / h) + 1)
    if stride != 1:
        k = k[(k - offset) % stride == 0]
    x = scale * np.exp(k * h)
    return x, h * x


def quad_semiinf(f: Callable[[np.ndarray], np.ndarray], spec: QuadSpec = QuadSpec(),
                 scale: float = 1.0) -> Tuple[complex, float]:
    """Integrate ``f`` over ``(0, inf)``; returns ``(value, error_estimate)``.

    ``f`` is called on arrays of nodes. Non-finite values far in the tails
    (overflow of e.g. ``s**a`` where ``exp(-s)`` underflows) count as zero.
    """
    nodes = exp_sinh_nodes if spec.transform == "exp-sinh" else log_radial_nodes
    lo, hi = (spec.t_lo, spec.t_hi) if spec.transform == "exp-sinh" else (spec.u_lo, spec.u_hi)
    h = (hi - lo) / spec.n_min
    x, wts = nodes(h, lo, hi, scale)
    total = _sum(f, x, wts)
    prev = None
    for _ in range(spec.max_levels):
        # add the midpoints of the current grid
        h /= 2.0
        x, wts = nodes(h, lo, hi, scale, offset=1, stride=2)
        total = 0.5 * total + _sum(f, x, wts)
        if prev is not None:
            err = abs(total - prev)
            if err <= max(spec.abs_tol, spec.rel_tol * abs(total)):
                return total, err
        prev = total
    raise QuadratureError(
        f"semi-infinite quadrature did not converge in {spec.max_levels} levels"
    )


def _sum(f, x, wts):
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        vals = np.asarray(f(x))
    vals = np.where(np.isfinite(vals), vals, 0.0)
    s = np.sum(vals * wts)
    return complex(s) if np.iscomplexobj(s) else float(s)


def tanh_sinh_nodes(h: float, a: float, b: float, t_max: float = 4.5):
    k = np.arange(-math.floor(t_max / h), math.floor(t_max / h) + 1)
    t = k * h
    s = 0.5 * np.pi * np.sinh(t)
    wu = h * 0.5 * np.pi * np.cosh(t) / np.cosh(s) ** 2
    half = 0.5 * (b - a)
    # (1 + tanh s) / 2 without cancellation near the left endpoint
    frac = 1.0 / (1.0 + np.exp(-2.0 * s))
    return a + (b - a) * frac, half * wu


def quad_finite(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                tol: float = 1e-13, max_levels: int = 10) -> Tuple[float, float]:
    """Tanh-sinh quadrature on ``[a, b]``."""
    h = 0.5
    prev = None
    for _ in range(max_levels):
        x, wts = tanh_sinh_nodes(h, a, b)
        total = _sum(f, x, wts)
        if prev is not None:
            err = abs(total - prev)
            if err <= tol * max(1.0, abs(total)):
                return total, err
        prev = total
        h /= 2.0
    raise QuadratureError("finite-interval quadrature did not converge")


def quad_periodic(f: Callable[[np.ndarray], np.ndarray], n: int) -> complex:
    """Trapezoid rule over ``[0, 2 pi)`` with ``n`` equispaced nodes."""
    if n < 1:
        raise ValueError("n must be positive")
    theta = 2.0 * np.pi * np.arange(n) / n
    vals = np.asarray(f(theta))
    s = (2.0 * np.pi / n) * np.sum(vals)
    return complex(s) if np.iscomplexobj(s) else float(s)
