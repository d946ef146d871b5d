"""Model Bergman kernels for homogeneous subharmonic weights on the plane.

The model kernel of a weight ``p`` is ``B(z, w) = e^{-p(z)-p(w)} K(z, w)`` where
``K`` reproduces entire functions in ``L^2(e^{-2p} dA)``. ``K`` is built from a
truncated basis

    phi_a(z) = ((z - z0)/sigma)^a * exp(G(z)),   G(z) = 2 P(z, conj z0) - P(z0, conj z0),

with ``P`` the complexified weight. For ``z0 = 0`` and weights without pure
terms ``G == 0`` and this is the plain monomial basis. Moving ``z0`` to the
evaluation point turns the local weight into a near-Gaussian one, which is
what makes large dilations ``t p`` tractable at moderate truncation.

In Taylor coordinates ``h = z - z0``, ``eta = zeta - conj z0`` the combined
exponent of the sesquianalytic extension is ``-2 D(h, eta)`` with
``D = sum_{i,j>=1} C[i,j] h^i eta^j`` and ``C`` the Taylor array of ``P``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .numerics import (
    QuadSpec,
    QuadratureError,
    scaled_lower_gamma,
)
from .poly import BiPoly, homogeneous_degree, monomial_weight

DEFAULT_DMAX = 40
DEFAULT_NTHETA = 256
EXTRA_BASIS = 8
RADIUS_TOL = 1e-8


class ConditioningError(RuntimeError):
    """The truncated moment matrix is not numerically positive definite."""


class OutsideValidatedRadius(UserWarning):
    pass


# -- small dense polynomial helpers on coefficient arrays A[i, j] h^i eta^j ----

def taylor_array(coeffs: np.ndarray, z0: complex) -> np.ndarray:
    """Coefficients of ``P(z0 + h, conj z0 + eta)`` given those of ``P(z, zeta)``."""
    ni, nj = coeffs.shape
    zb = np.conj(z0)
    out = np.zeros_like(coeffs, dtype=complex)
    for a in range(ni):
        for b in range(nj):
            c = coeffs[a, b]
            if c == 0:
                continue
            for i in range(a + 1):
                zi = comb(a, i) * z0 ** (a - i)
                for j in range(b + 1):
                    out[i, j] += c * zi * comb(b, j) * zb ** (b - j)
    return out


def _poly_eval(arr: np.ndarray, h, eta):
    return np.polynomial.polynomial.polyval2d(h, eta, arr)


def _poly_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1), dtype=complex)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            if a[i, j] != 0:
                out[i:i + b.shape[0], j:j + b.shape[1]] += a[i, j] * b
    return out


def _poly_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((max(a.shape[0], b.shape[0]), max(a.shape[1], b.shape[1])), dtype=complex)
    out[:a.shape[0], :a.shape[1]] += a
    out[:b.shape[0], :b.shape[1]] += b
    return out


def _poly_d(a: np.ndarray, axis: int) -> np.ndarray:
    if a.shape[axis] == 1:
        return np.zeros((1, 1), dtype=complex)
    if axis == 0:
        return a[1:, :] * np.arange(1, a.shape[0])[:, None]
    return a[:, 1:] * np.arange(1, a.shape[1])[None, :]


def _falling(n: np.ndarray, k: int) -> np.ndarray:
    out = np.ones_like(n, dtype=float)
    for m in range(k):
        out = out * (n - m)
    return out


# -- moment matrix ---------------------------------------------------------------

@dataclass(frozen=True)
class MomentMatrix:
    """``M[a][b] = int phi_b conj(phi_a) e^{-2p} dA`` in the scaled basis."""

    dmax: int
    entries: np.ndarray
    center: complex
    sigma: float

    def unscaled(self) -> np.ndarray:
        """Entries for the unscaled basis ``(z - z0)^a e^G``."""
        s = self.sigma ** np.arange(self.dmax + 1)
        return self.entries * np.outer(s, s)


class _Weight:
    """Weight data at a center: Taylor array ``C`` and the pieces ``D``, ``H``."""

    def __init__(self, p_arr: np.ndarray, center: complex):
        self.center = complex(center)
        C = taylor_array(p_arr, self.center)
        self.C = C
        D = C.copy()
        D[0, :] = 0
        D[:, 0] = 0
        self.D = D
        self.H = C[:, 0].copy()
        self.H[0] = 0
        self.E = -2.0 * D  # combined exponent of the sesquianalytic diagonal

    def diastasis(self, h):
        return _poly_eval(self.D, h, np.conj(h)).real

    def phase(self, h):
        return 2.0 * np.polynomial.polynomial.polyval(h, self.H).imag

    def natural_scale(self) -> float:
        theta = 2.0 * np.pi * np.arange(64) / 64
        u = np.exp(1j * theta)

        def size(rho):
            return float(np.max(2.0 * self.diastasis(rho * u)))

        lo, hi = 1e-12, 1e12
        if size(hi) < 1.0 or not np.isfinite(size(hi)):
            hi = 1e12
        for _ in range(200):
            mid = math.sqrt(lo * hi)
            if size(mid) < 1.0:
                lo = mid
            else:
                hi = mid
            if hi / lo < 1 + 1e-6:
                break
        return math.sqrt(lo * hi)


def _weight_array(p: BiPoly, t: float) -> np.ndarray:
    return p.to_array() * float(t)


LOG_X_LO = -18.0
LOG_X_HI = 7.0


def _radial_block(wt: _Weight, sigma: float, ncols: int, u: np.ndarray, ntheta: int) -> np.ndarray:
    """Unit-step contribution of radial nodes ``x = e^u`` to the moment matrix.

    The angular sum of ``e^{-2D} e^{i(b-a) theta}`` is an FFT of the weight on
    each circle; the radial powers are combined in log space.
    """
    theta = 2.0 * np.pi * np.arange(ntheta) / ntheta
    hpts = sigma * np.exp(u)[:, None] * np.exp(1j * theta)[None, :]
    with np.errstate(over="ignore", invalid="ignore"):
        expo = -2.0 * wt.diastasis(hpts)
    shift = np.max(expo, axis=1)
    ok = np.isfinite(shift) & (shift > -1e300)
    u, expo, shift = u[ok], expo[ok], shift[ok]
    # sum_theta g e^{i m theta} for m = b - a
    spec_ = ntheta * np.fft.ifft(np.exp(expo - shift[:, None]), axis=1) * (2.0 * np.pi / ntheta)
    a = np.arange(ncols)
    m = (a[None, :] - a[:, None]) % ntheta
    # dA = sigma^2 x^2 du dtheta; x^{a+b} from the monomials
    logw = shift + 2.0 * u + 2.0 * math.log(sigma)
    half = 0.5 * logw[:, None] + a[None, :] * u[:, None]
    with np.errstate(under="ignore"):
        scale = np.exp(half)
    return np.einsum("ra,rb,rab->ab", scale, scale, spec_[:, m])


def build_moments(p: BiPoly, dmax: int = DEFAULT_DMAX, spec: QuadSpec = QuadSpec(),
                  center: complex = 0.0, t: float = 1.0, ntheta: int = DEFAULT_NTHETA,
                  sigma: Optional[float] = None) -> MomentMatrix:
    """Moment matrix from a nested trapezoid rule in ``log |h|`` times an angular trapezoid.

    Radial refinement halves the step until two levels agree to ``spec.rel_tol``
    relative to the diagonal scale ``sqrt(M_aa M_bb)``.
    """
    wt = _Weight(_weight_array(p, t), center)
    if sigma is None:
        sigma = wt.natural_scale()
    M = _converged_moments(wt, sigma, dmax + 1, spec, ntheta)
    return MomentMatrix(dmax=dmax, entries=M, center=complex(center), sigma=sigma)


def _converged_moments(wt, sigma, ncols, spec, ntheta):
    h = 0.25
    u = np.arange(LOG_X_LO, LOG_X_HI + h / 2, h)
    S = _radial_block(wt, sigma, ncols, u, ntheta)
    M = h * S
    for _ in range(spec.max_levels):
        h /= 2.0
        u = np.arange(LOG_X_LO + h, LOG_X_HI, 2.0 * h)
        S = S + _radial_block(wt, sigma, ncols, u, ntheta)
        M_new = h * S
        d = np.sqrt(np.abs(np.diag(M_new)))
        err = np.max(np.abs(M_new - M) / np.outer(d, d))
        M = M_new
        if err <= max(spec.rel_tol, 1e-15) * 10:
            return 0.5 * (M + M.conj().T)
    raise QuadratureError("moment quadrature did not converge")


def cholesky_factor(M: np.ndarray) -> np.ndarray:
    """Lower factor of ``M = L L^H`` computed on the diagonally normalized matrix."""
    d = np.sqrt(np.abs(np.diag(M)))
    if not np.all(np.isfinite(M)) or np.any(d == 0):
        raise ConditioningError("moment matrix has non-finite or zero diagonal entries")
    try:
        Ln = np.linalg.cholesky(M / np.outer(d, d))
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(
            "moment matrix is not numerically positive definite; reduce dmax"
        ) from exc
    return d[:, None] * Ln


# -- kernel model ------------------------------------------------------------------

class KernelModel:
    """Truncated reproducing-kernel representation of ``B_{t p}``.

    ``L`` is the Cholesky factor of the moment matrix (``M = L L^H``), taken
    after diagonal normalization. Only Hermitian symmetrization is applied;
    no regularization. ``dmax + 8`` basis elements are factored so the
    validated radius comes from the same factorization.
    """

    def __init__(self, p: BiPoly, dmax: int = DEFAULT_DMAX, spec: QuadSpec = QuadSpec(),
                 center: complex = 0.0, t: float = 1.0, ntheta: int = DEFAULT_NTHETA,
                 r: Optional[int] = None, *, _factor=None, _sigma=None):
        self.p = p
        self.dmax = int(dmax)
        self.spec = spec
        self.center = complex(center)
        self.t = float(t)
        self.ntheta = ntheta
        self.r = r if r is not None else homogeneous_degree(p)
        self._wt = _Weight(_weight_array(p, t), self.center)
        self.sigma = _sigma if _sigma is not None else self._wt.natural_scale()
        ncols = self.dmax + 1 + EXTRA_BASIS
        if _factor is None:
            M = _converged_moments(self._wt, self.sigma, ncols, spec, ntheta)
            _factor = cholesky_factor(M)
        self._L_full = _factor
        self._check_factor(self._L_full[: self.dmax + 1, : self.dmax + 1])
        self.L = self._L_full[: self.dmax + 1, : self.dmax + 1]

    @classmethod
    def from_moments(cls, p: BiPoly, diag_moments: Sequence[float], r: Optional[int] = None,
                     sigma: float = 1.0) -> "KernelModel":
        """Model from known diagonal moments of ``z^a`` (rotation-invariant weight, center 0)."""
        m = np.asarray(diag_moments, dtype=float)
        a = np.arange(len(m))
        scaled = m / sigma ** (2 * a)
        L = np.diag(np.sqrt(scaled)).astype(complex)
        obj = cls.__new__(cls)
        obj.p = p
        obj.dmax = len(m) - 1 - EXTRA_BASIS
        if obj.dmax < 0:
            raise ValueError("need more moments than the extra validation block")
        obj.spec = QuadSpec()
        obj.center = 0j
        obj.t = 1.0
        obj.ntheta = 0
        obj.r = r if r is not None else homogeneous_degree(p)
        obj._wt = _Weight(p.to_array(), 0j)
        obj.sigma = sigma
        obj._L_full = L
        obj.L = L[: obj.dmax + 1, : obj.dmax + 1]
        return obj

    @staticmethod
    def _check_factor(L: np.ndarray) -> None:
        # |L_ii| / ||row i|| is the part of basis vector i not spanned by earlier ones
        d = np.abs(np.diag(L)) / np.linalg.norm(L, axis=1)
        if not np.all(np.isfinite(L)) or d.min() <= 1e-13:
            raise ConditioningError(
                "moment matrix is numerically singular at this dmax; reduce dmax"
            )

    # -- basic evaluation ---------------------------------------------------
    def _basis(self, h: np.ndarray, ncols: int, deriv: int = 0) -> np.ndarray:
        """``d^k/dh^k (h/sigma)^a`` for a < ncols, shape (npts, ncols)."""
        a = np.arange(ncols)
        u = h[:, None] / self.sigma
        with np.errstate(divide="ignore", invalid="ignore"):
            powers = np.where(a[None, :] >= deriv, u ** np.maximum(a - deriv, 0)[None, :], 0.0)
        return powers * (_falling(a, deriv) / self.sigma ** deriv)[None, :]

    def _solve(self, L, vecs):
        return solve_triangular(L, vecs.T, lower=True)

    def _S(self, h, eta, i=0, j=0, full=False):
        """``d_h^i d_eta^j`` of ``u(h)^T M^-1 v(eta)`` (vectorized over points)."""
        L = self._L_full if full else self.L
        n = L.shape[0]
        U = self._basis(np.atleast_1d(h).astype(complex), n, i)
        V = self._basis(np.atleast_1d(eta).astype(complex), n, j)
        A = self._solve(L, np.conj(U))
        B = self._solve(L, V)
        return np.sum(np.conj(A) * B, axis=0)

    def kernel_eval(self, z, w, check_radius: bool = True):
        """``B(z, w)``; vectorized over matching arrays of points."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        if check_radius:
            self._warn_radius(np.concatenate([z, w]))
        hz, hw = z - self.center, w - self.center
        S = self._S(hz, np.conj(hw))
        expo = (-self._wt.diastasis(hz) - self._wt.diastasis(hw)
                + 1j * (self._wt.phase(hz) - self._wt.phase(hw)))
        out = np.exp(expo) * S
        return out if out.size > 1 else complex(out[0])

    def diag(self, z, check_radius: bool = True, full: bool = False):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if check_radius:
            self._warn_radius(z)
        h = z - self.center
        S = self._S(h, np.conj(h), full=full)
        out = (np.exp(-2.0 * self._wt.diastasis(h)) * S).real
        return out if out.size > 1 else float(out[0])

    def diag_derivative(self, a1: int, a2: int, z, check_radius: bool = True):
        """``d_z^a1 d_zbar^a2`` of the diagonal ``B(z, z)`` via its sesquianalytic extension."""
        if a1 < 0 or a2 < 0 or a1 + a2 > 4:
            raise ValueError("supported derivative orders satisfy a1 + a2 <= 4")
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if check_radius:
            self._warn_radius(z)
        h = z - self.center
        eta = np.conj(h)
        # d^i d^j exp(E) = exp(E) * Hpoly[i][j]
        E = self._wt.E
        Ez, Ew = _poly_d(E, 0), _poly_d(E, 1)
        Hpoly = {(0, 0): np.ones((1, 1), dtype=complex)}
        for i in range(a1 + 1):
            for j in range(a2 + 1):
                if (i, j) in Hpoly:
                    continue
                if i > 0:
                    prev = Hpoly[(i - 1, j)]
                    Hpoly[(i, j)] = _poly_add(_poly_d(prev, 0), _poly_mul(prev, Ez))
                else:
                    prev = Hpoly[(i, j - 1)]
                    Hpoly[(i, j)] = _poly_add(_poly_d(prev, 1), _poly_mul(prev, Ew))
        expE = np.exp(_poly_eval(E, h, eta).real)
        total = np.zeros(h.shape, dtype=complex)
        for i in range(a1 + 1):
            for j in range(a2 + 1):
                coef = comb(a1, i) * comb(a2, j)
                total += coef * _poly_eval(Hpoly[(i, j)], h, eta) * self._S(h, eta, a1 - i, a2 - j)
        out = expE * total
        return out if out.size > 1 else complex(out[0])

    # -- validated radius -----------------------------------------------------
    @cached_property
    def validated_radius(self) -> float:
        """Largest distance from the center where ``dmax + 8`` terms change the diagonal < 1e-8."""
        if EXTRA_BASIS == 0 or self._L_full.shape[0] == self.L.shape[0]:
            return float("inf")
        angles = np.exp(2j * np.pi * np.arange(16) / 16)
        radii = self.sigma * np.geomspace(1e-3, 1e3, 400)
        ok = 0.0
        for rho in radii:
            pts = self.center + rho * angles
            base = self.diag(pts, check_radius=False)
            ext = self.diag(pts, check_radius=False, full=True)
            rel = np.max(np.abs(ext - base) / np.maximum(np.abs(ext), 1e-300))
            if not np.isfinite(rel) or rel >= RADIUS_TOL:
                break
            ok = rho
        return float(ok)

    def _warn_radius(self, pts: np.ndarray) -> None:
        dist = np.max(np.abs(pts - self.center)) if pts.size else 0.0
        if dist > self.validated_radius:
            warnings.warn(
                f"evaluation at distance {dist:.4g} beyond validated radius "
                f"{self.validated_radius:.4g} (dmax={self.dmax})",
                OutsideValidatedRadius,
                stacklevel=3,
            )

    @property
    def condition(self) -> float:
        """Condition number of the diagonally normalized moment matrix."""
        M = self.L @ self.L.conj().T
        d = np.sqrt(np.abs(np.diag(M)))
        return float(np.linalg.cond(M / np.outer(d, d)))

    def moments(self) -> MomentMatrix:
        M = self.L @ self.L.conj().T
        return MomentMatrix(self.dmax, M, self.center, self.sigma)


def kernel_eval(km: KernelModel, z, w):
    return km.kernel_eval(z, w)


def diag_derivative(km: KernelModel, a1: int, a2: int, z):
    return km.diag_derivative(a1, a2, z)


# -- monomial weights -----------------------------------------------------------

def monomial_moments(c: float, r: int, n: int) -> np.ndarray:
    """``int |z|^{2a} e^{-c |z|^r} dA = (2 pi / r) c^{-2(a+1)/r} Gamma(2(a+1)/r)``."""
    a = np.arange(n)
    ex = 2.0 * (a + 1) / r
    return np.exp(math.log(2.0 * math.pi / r) - ex * math.log(c) + np.array([math.lgamma(e) for e in ex]))


def monomial_series_model(c, r: int, dmax: int = DEFAULT_DMAX) -> KernelModel:
    """Exact-moment model for ``p = (c/2) (z w)^{r/2}`` (orthogonal monomials)."""
    p = monomial_weight(Fraction(c).limit_denominator(10 ** 12) if not isinstance(c, Fraction) else c, r)
    cf = float(c)
    sigma = cf ** (-1.0 / r)
    return KernelModel.from_moments(p, monomial_moments(cf, r, dmax + 1 + EXTRA_BASIS), r=r, sigma=sigma)


def _check_sector(x: complex, s: int) -> None:
    # beyond |arg x| = pi/(2s) G is algebraically small and the head and tail cancel
    if s > 1 and x != 0 and 2 * s * abs(cmath.phase(x)) >= math.pi:
        raise ValueError(
            "monomial closed form is restricted to |arg(z conj w)| < pi / r"
        )


def _G_scaled(x: complex, r: int, log_scale: float) -> complex:
    """``G(x) exp(log_scale)`` without intermediate overflow."""
    s = r // 2
    x = complex(x)
    if s == 1:
        return cmath.exp(x + log_scale)
    _check_sector(x, s)
    head = sum(x ** a / math.gamma(2.0 * (a + 1) / r) for a in range(s)) * math.exp(log_scale)
    if x == 0:
        return head
    u = x ** s
    tail = sum(scaled_lower_gamma(2.0 * (a + 1) / r, u, log_scale) for a in range(s))
    return head + x ** (s - 1) * tail


def G_function(x: complex, r: int) -> complex:
    """Entire function with ``B = (r c^{2/r} / 2 pi) e^{-p(z)-p(w)} G(c^{2/r} z conj w)``."""
    return _G_scaled(x, r, 0.0)


def monomial_kernel(c: float, r: int, z: complex, w: complex) -> complex:
    """Closed form of ``B_p`` for ``p = (c/2)|z|^r``."""
    if c <= 0:
        raise ValueError("c must be positive")
    if r < 2 or r % 2:
        raise ValueError("r must be an even integer >= 2")
    z, w = complex(z), complex(w)
    decay = -0.5 * c * (abs(z) ** r + abs(w) ** r)
    x = c ** (2.0 / r) * z * w.conjugate()
    return complex(r * c ** (2.0 / r) / (2.0 * math.pi) * _G_scaled(x, r, decay))


# -- rescaling law and expansion fit ---------------------------------------------

def scaling_residual(t: float, z, w, km_base, km_scaled, r: Optional[int] = None) -> float:
    """``|B_p(t^{1/r} z, t^{1/r} w) - t^{-2/r} B_{tp}(z, w)| / |B_{tp}(z, w)|``.

    ``km_base``/``km_scaled`` are kernel callables ``(z, w) -> complex`` or
    :class:`KernelModel` instances for ``p`` and ``t p``.
    """
    if r is None:
        r = km_base.r
    f = _as_kernel(km_base)
    g = _as_kernel(km_scaled)
    s = t ** (1.0 / r)
    lhs = f(s * complex(z), s * complex(w))
    rhs = t ** (-2.0 / r) * g(complex(z), complex(w))
    return float(abs(lhs - rhs) / abs(g(complex(z), complex(w))))


def _as_kernel(k):
    if isinstance(k, KernelModel):
        return lambda a, b: complex(k.kernel_eval(a, b))
    return k


@dataclass
class ExpansionFit:
    z: complex
    t: np.ndarray
    values: np.ndarray
    estimates: np.ndarray
    fitted: np.ndarray
    residual_norm: float
    condition: float
    dmax_used: np.ndarray
    ill_conditioned: bool = False

    def rows(self):
        for t, v, f in zip(self.t, self.values, self.fitted):
            yield {"t": float(t), "value": float(v), "fitted": float(f), "residual": float(v - f)}


def log_grid(tmin: float, tmax: float, count: int) -> np.ndarray:
    return np.geomspace(tmin, tmax, count)


MIN_DMAX = 8


def centered_model(p: BiPoly, z: complex, t: float, dmax: int = DEFAULT_DMAX,
                   spec: QuadSpec = QuadSpec(), ntheta: int = DEFAULT_NTHETA) -> KernelModel:
    """Model of ``B_{tp}`` centered at ``z``; steps ``dmax`` down by 4 on conditioning failure."""
    d = dmax
    while True:
        try:
            return KernelModel(p, dmax=d, spec=spec, center=z, t=t, ntheta=ntheta)
        except ConditioningError:
            if d - 4 < MIN_DMAX:
                raise
            d -= 4


def fit_expansion(p: BiPoly, z: complex, t_grid: Sequence[float], n_terms: int = 4,
                  dmax: int = DEFAULT_DMAX, spec: QuadSpec = QuadSpec(),
                  ntheta: int = DEFAULT_NTHETA) -> ExpansionFit:
    """Least-squares estimates of ``b_0..b_{n-1}`` from ``2 pi B_{tp}(z, z) / t``."""
    t = np.asarray(sorted(t_grid), dtype=float)
    if n_terms < 1:
        raise ValueError("n_terms must be positive")
    if len(t) < n_terms + 2:
        raise ValueError("t_grid needs at least n_terms + 2 points")
    if t[0] <= 0 or t[-1] / t[0] < 10.0 * (1 - 1e-12):
        raise ValueError("t_grid must be positive and span at least one decade")
    z = complex(z)
    values = np.empty(len(t))
    used = np.empty(len(t), dtype=int)
    for k, tk in enumerate(t):
        km = centered_model(p, z, tk, dmax, spec, ntheta)
        used[k] = km.dmax
        values[k] = 2.0 * math.pi * km.diag(z, check_radius=False) / tk
    V = (1.0 / t)[:, None] ** np.arange(n_terms)[None, :]
    est, *_ = np.linalg.lstsq(V, values, rcond=None)
    fitted = V @ est
    cond = float(np.linalg.cond(V))
    return ExpansionFit(
        z=z,
        t=t,
        values=values,
        estimates=est,
        fitted=fitted,
        residual_norm=float(np.linalg.norm(values - fitted)),
        condition=cond,
        dmax_used=used,
        ill_conditioned=cond > 1e8,
    )
