"""Fefferman's complex Monge-Ampère operator and unit-ball reference checks in C^2.

``J(u) = (-1)^n det [[u, u_bbar], [u_a, u_abbar]]`` with ``n = 2``. Wirtinger
derivatives come from central differences in the real coordinates
``(x1, y1, x2, y2)`` with one Richardson extrapolation level, unless analytic
callbacks are supplied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

N_DIM = 2
DEFAULT_H = 1e-3
KE_BALL_CONSTANT = (N_DIM + 1) ** N_DIM * math.pi ** N_DIM / math.factorial(N_DIM)


class StencilError(ValueError):
    """A finite-difference stencil point falls outside the field's domain."""


@dataclass(frozen=True)
class ScalarField:
    """Real function on C^2.

    ``grad`` returns ``(u_1, u_2)`` (holomorphic Wirtinger derivatives) and
    ``hess`` the 2x2 matrix ``u_{a bbar}``; both are optional.
    """

    u: Callable[[np.ndarray], float]
    domain: Optional[Callable[[np.ndarray], bool]] = None
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hess: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, z) -> float:
        return float(self.u(np.asarray(z, dtype=complex)))


def _as_point(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.size != N_DIM:
        raise ValueError(f"points must have {N_DIM} complex coordinates")
    return z


def _to_complex(x: np.ndarray) -> np.ndarray:
    return x[0::2] + 1j * x[1::2]


def default_step(z) -> float:
    """``1e-3 * (1 - |z|)``, floored so points near the boundary keep a usable step."""
    return DEFAULT_H * max(1.0 - float(np.linalg.norm(z)), 1e-3)


def _real_derivatives(f: Callable[[np.ndarray], float], x: np.ndarray, h: float,
                      domain=None):
    """Central-difference gradient and Hessian in real coordinates."""
    n = x.size
    eye = np.eye(n)
    cache = {}

    def F(offsets):
        key = tuple(offsets)
        if key not in cache:
            pt = x + h * np.asarray(offsets, dtype=float)
            if domain is not None and not domain(_to_complex(pt)):
                raise StencilError(f"stencil point {_to_complex(pt)} leaves the domain")
            cache[key] = f(pt)
        return cache[key]

    zero = [0] * n
    f0 = F(zero)
    g = np.empty(n)
    H = np.empty((n, n))
    for i in range(n):
        ei = eye[i].astype(int)
        fp, fm = F(list(ei)), F(list(-ei))
        g[i] = (fp - fm) / (2 * h)
        H[i, i] = (fp - 2 * f0 + fm) / h ** 2
        for j in range(i):
            ej = eye[j].astype(int)
            v = (F(list(ei + ej)) - F(list(ei - ej)) - F(list(-ei + ej)) + F(list(-ei - ej))) / (4 * h * h)
            H[i, j] = H[j, i] = v
    return f0, g, H


def _richardson(f, x, h, domain=None):
    f0, g1, H1 = _real_derivatives(f, x, h, domain)
    _, g2, H2 = _real_derivatives(f, x, h / 2, domain)
    return f0, (4 * g2 - g1) / 3, (4 * H2 - H1) / 3


def _wirtinger(g: np.ndarray, H: np.ndarray):
    """Real gradient/Hessian to ``u_a`` and ``u_{a bbar}``."""
    ux, uy = g[0::2], g[1::2]
    grad = 0.5 * (ux - 1j * uy)
    Hxx = H[0::2, 0::2]
    Hyy = H[1::2, 1::2]
    Hxy = H[0::2, 1::2]  # [a, b] = d_{x_a} d_{y_b}
    hess = 0.25 * (Hxx + Hyy + 1j * (Hxy - Hxy.T))
    return grad, hess


def wirtinger_derivatives(field: ScalarField, z, h: Optional[float] = None,
                          transform: Optional[Callable[[float], float]] = None):
    """``(u, u_a, u_{a bbar})`` at ``z``; ``transform`` is applied to ``u`` first."""
    z = _as_point(z)
    if h is None:
        h = default_step(z)
    if transform is None and field.grad is not None and field.hess is not None:
        return field(z), np.asarray(field.grad(z), dtype=complex), np.asarray(field.hess(z), dtype=complex)
    x = np.empty(2 * N_DIM)
    x[0::2], x[1::2] = z.real, z.imag

    def f(pt):
        val = field(_to_complex(pt))
        return transform(val) if transform is not None else val

    f0, g, H = _richardson(f, x, h, field.domain)
    grad, hess = _wirtinger(g, H)
    return f0, grad, hess


def j_operator(field: ScalarField, z, h: Optional[float] = None) -> float:
    u, grad, hess = wirtinger_derivatives(field, z, h)
    m = np.empty((N_DIM + 1, N_DIM + 1), dtype=complex)
    m[0, 0] = u
    m[0, 1:] = np.conj(grad)  # u_bbar of a real function
    m[1:, 0] = grad
    m[1:, 1:] = hess
    return float(((-1) ** N_DIM * np.linalg.det(m)).real)


def j_log_form(field: ScalarField, z, h: Optional[float] = None) -> float:
    """``u^{n+1} det d dbar(-ln u)`` with the Hessian of ``-ln u`` by finite differences."""
    z = _as_point(z)
    u0 = field(z)
    if u0 <= 0:
        raise ValueError("the log form needs u(z) > 0")
    plain = ScalarField(field.u, field.domain)
    _, _, hess = wirtinger_derivatives(plain, z, h, transform=lambda v: -math.log(v))
    return float((u0 ** (N_DIM + 1) * np.linalg.det(hess)).real)


def ball_defining(z) -> float:
    z = _as_point(z)
    return float(1.0 - np.vdot(z, z).real)


def in_ball(z) -> bool:
    return float(np.linalg.norm(z)) < 1.0


def ball_kernel(z) -> float:
    """Bergman kernel of the unit ball in C^2 on the diagonal."""
    z = _as_point(z)
    s = float(np.vdot(z, z).real)
    if s >= 1.0:
        raise ValueError("the ball kernel needs |z| < 1")
    return 2.0 / (math.pi ** 2 * (1.0 - s) ** 3)


BALL_KERNEL = ScalarField(ball_kernel, domain=in_ball)
BALL_FUNCTION = ScalarField(ball_defining)


def bergman_invariant(K: ScalarField, z, h: Optional[float] = None) -> float:
    """``det(d dbar ln K) / K``."""
    z = _as_point(z)
    k0 = K(z)
    if k0 <= 0:
        raise ValueError("the kernel must be positive")
    plain = ScalarField(K.u, K.domain)
    _, _, hess = wirtinger_derivatives(plain, z, h, transform=math.log)
    return float(np.linalg.det(hess).real / k0)


def ke_kernel_check(K: ScalarField, z, h: Optional[float] = None) -> float:
    """``|J(K) - C K^{n+2}| / (C K^{n+2})`` with ``C = (n+1)^n pi^n / n!``."""
    k0 = K(_as_point(z))
    if k0 <= 0:
        raise ValueError("the kernel must be positive")
    target = KE_BALL_CONSTANT * k0 ** (N_DIM + 2)
    return abs(j_operator(K, z, h) - target) / target
