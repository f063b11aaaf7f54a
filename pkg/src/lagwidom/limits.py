"""Limiting kernels at the hard edge, soft edge and in the bulk.

Scalar kernels are the Bessel kernel ``K_J``, the Airy kernel ``K_Ai`` and
the sine kernel ``K_inf``.  The 2x2 matrix kernels for ``beta = 1, 4`` are
built from them together with integrals of ``J`` and ``Ai``.

Both ``K_J`` and ``K_Ai`` have the integrable form

    K(x, y) = (f(x) g(y) - f(y) g(x)) / (x - y),   f' = a g,  g' = b f,

with ``f = Ai, g = Ai'`` and ``f = J_a(sqrt x), g = x f'(x)`` respectively.
Near the diagonal the ratio is replaced by a Taylor expansion whose
coefficients follow from the ODE.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _special as sf
from .equilibrium import EquilibriumData, omega_n
from .quadrature import gauss_jacobi_left, gauss_legendre

CONFLUENT = 1e-6
CONFLUENT_DERIV = 1e-3
_NTAYLOR = 16


def special_bessel(nu: float, x):
    """``(J_nu(x), J_nu'(x))``; series, ODE table and Hankel expansion."""
    return sf.bessel_j(nu, x)


def special_airy(x):
    """``(Ai(x), Ai'(x))``; ODE table and asymptotic expansions."""
    return sf.airy_ai(x)


# ---------------------------------------------------------------- integrable kernels

def _series_mul(p, q, k):
    return sum(p[i] * q[k - i] for i in range(k + 1))


def _confluent_coeffs(f0, g0, a, b, K=_NTAYLOR):
    """Taylor coefficients of ``f, g`` about ``x`` given those of ``a, b``."""
    f = [f0]
    g = [g0]
    for k in range(K):
        f.append(_series_mul(a, g, k) / (k + 1))
        g.append(_series_mul(b, f, k) / (k + 1))
    return f, g


def _integrable(x, y, fg, ab, tol_rel, tol_floor=1.0):
    """Evaluate ``K(x, y)`` and ``d/dy K(x, y)`` for an integrable kernel."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = x.shape
    x = x.ravel()
    y = y.ravel()
    tol_rel = np.broadcast_to(tol_rel, shape).ravel()
    fx, gx = fg(x)
    fy, gy = fg(y)
    ay, by = ab(y, 1)
    d = x - y
    scale = np.maximum(np.abs(x), tol_floor)
    near_k = np.abs(d) < CONFLUENT * scale * tol_rel
    near_d = np.abs(d) < CONFLUENT_DERIV * scale * tol_rel
    with np.errstate(divide="ignore", invalid="ignore"):
        K = (fx * gy - fy * gx) / d
        Nd = fx * by[0] * fy - ay[0] * gy * gx
        dK = (Nd + K) / d
    if near_d.any():
        xs = x[near_d]
        t = (y - x)[near_d]
        f0, g0 = fg(xs)
        a, b = ab(xs, _NTAYLOR)
        f, g = _confluent_coeffs(f0, g0, a, b)
        e = [f0 * g[k] - f[k] * g0 for k in range(_NTAYLOR + 1)]
        Kc = np.zeros_like(t)
        dKc = np.zeros_like(t)
        for k in range(_NTAYLOR, 0, -1):
            Kc = Kc * t - e[k]
        for k in range(_NTAYLOR, 1, -1):
            dKc = dKc * t - (k - 1) * e[k]
        dK[near_d] = dKc
        sub = near_k[near_d]
        Ktmp = K[near_d]
        Ktmp[sub] = Kc[sub]
        K[near_d] = Ktmp
    K = K.reshape(shape)
    dK = dK.reshape(shape)
    if not shape:
        return float(K), float(dK)
    return K, dK


def _bessel_fg(alpha):
    def fg(x):
        u = np.sqrt(x)
        J, dJ = sf.bessel_j(alpha, u)
        return J, 0.5 * u * dJ
    return fg


def _bessel_ab(alpha):
    # a = 1/x, b = -1/4 + alpha^2/(4x), expanded in t about x
    def ab(x, K):
        inv = [(-1) ** i / x ** (i + 1) for i in range(K + 1)]
        a = inv
        b = [0.25 * alpha * alpha * c for c in inv]
        b[0] = b[0] - 0.25
        return a, b
    return ab


def _airy_fg(x):
    return sf.airy_ai(x)


def _airy_ab(x, K):
    one = np.ones_like(x)
    zero = np.zeros_like(x)
    a = [one] + [zero] * K
    b = [x, one] + [zero] * (K - 1)
    return a, b


def kernel_bessel(alpha: float, xi, eta, deriv: bool = False):
    """Bessel kernel ``K_J(xi, eta)`` (and ``d/d eta`` when ``deriv``).

    The confluent form is used for ``|xi - eta| < 1e-6 max(xi, 1)``, further
    restricted to ``1e-3 xi`` so that the expansion in ``(eta - xi)/xi``
    converges for tiny arguments.
    """
    xi, eta = np.broadcast_arrays(np.asarray(xi, dtype=float), np.asarray(eta, dtype=float))
    if np.any(xi <= 0) or np.any(eta <= 0):
        raise ValueError("Bessel kernel needs xi, eta > 0")
    tol = np.minimum(1.0, 1e3 * xi / np.maximum(xi, 1.0))
    K, dK = _integrable(xi, eta, _bessel_fg(alpha), _bessel_ab(alpha), tol)
    return (K, dK) if deriv else K


def kernel_airy(xi, eta, deriv: bool = False):
    """Airy kernel ``K_Ai(xi, eta)`` (and ``d/d eta`` when ``deriv``)."""
    K, dK = _integrable(xi, eta, _airy_fg, _airy_ab, 1.0)
    return (K, dK) if deriv else K


def kernel_sine(t, deriv: bool = False):
    """``sin(pi t) / (pi t)`` with ``K(0) = 1``."""
    t = np.asarray(t, dtype=float)
    z = math.pi * t
    small = np.abs(z) < 1e-3
    with np.errstate(divide="ignore", invalid="ignore"):
        K = np.where(small, 1 - z * z / 6 + z ** 4 / 120, np.sin(z) / z)
        dK = np.where(small, math.pi * (-z / 3 + z ** 3 / 30 - z ** 5 / 840),
                      math.pi * (z * np.cos(z) - np.sin(z)) / (z * z))
    if deriv:
        return K, dK
    return K


def sine_integral(t):
    """``int_0^t K_inf(s) ds``."""
    t = np.asarray(t, dtype=float)
    out = sf._gl_integral(lambda s: kernel_sine(s), np.zeros(t.size), t.ravel(), width=1.0, order=20)
    out = out.reshape(t.shape)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------- integrals used by the matrix kernels

def bessel_kernel_integral(alpha: float, xi, eta, order: int = 40):
    """``int_0^xi K_J(s, eta) ds``.

    With ``s = xi r^2`` the integrand is ``r^(alpha+1)`` times an entire
    function of ``r``; a single Gauss-Jacobi rule absorbs the power.
    """
    xi, eta = np.broadcast_arrays(np.asarray(xi, dtype=float), np.asarray(eta, dtype=float))
    shape = xi.shape
    xi = xi.ravel()
    eta = eta.ravel()
    p = order + int(2 * math.sqrt(max(xi.max(initial=0.0), eta.max(initial=0.0))))
    e = alpha + 1.0
    y, wy = gauss_jacobi_left(p, e)
    r = 0.5 * (1.0 + y)
    # int_0^1 r^e G(r) dr = sum wy 2^-(e+1) G(r_j)
    wr = wy * 0.5 ** (e + 1.0)
    s = xi[:, None] * r[None, :] ** 2
    Kv = kernel_bessel(alpha, s, np.broadcast_to(eta[:, None], s.shape))
    G = Kv * 2.0 * xi[:, None] * r[None, :] / r[None, :] ** e
    out = (G * wr).sum(axis=1)
    return out.reshape(shape)


def airy_kernel_tail(xi, eta, width: float = 0.5, order: int = 16):
    """``int_xi^inf K_Ai(s, eta) ds`` by composite Gauss-Legendre."""
    xi, eta = np.broadcast_arrays(np.asarray(xi, dtype=float), np.asarray(eta, dtype=float))
    shape = xi.shape
    xi = xi.ravel()
    eta = eta.ravel()
    top = np.maximum(xi, 0.0) + 14.0
    P = int(math.ceil(np.max(top - xi) / width))
    y, wy = gauss_legendre(order)
    h = (top - xi) / P
    j = np.arange(P)
    x = (xi[:, None, None] + h[:, None, None] * (j[None, :, None] + 0.5 * (1.0 + y)[None, None, :]))
    Kv = kernel_airy(x, np.broadcast_to(eta[:, None, None], x.shape))
    out = 0.5 * h * (Kv * wy).sum(axis=(1, 2))
    return out.reshape(shape)


def _bessel_pieces(alpha, xi):
    """Quantities of one argument that enter the hard-edge matrix kernels."""
    u = np.sqrt(xi)
    Ja, _ = sf.bessel_j(alpha, u)
    J1, _ = sf.bessel_j(alpha + 1.0, u)
    L = sf.bessel_alpha_integral(alpha, u)
    j0 = 1.0 if alpha == 0 else 0.0
    total = 1.0 - (2.0 if alpha > 0 else 0.0)
    Ib = L - Ja + j0                      # int_0^u J_{a+1}
    Ic = -L - Ja + j0                     # int_0^u (J_{a+1} - 2a J_a / s)
    return {
        "Jr": J1 / u,                     # J_{a+1}(u)/u
        "Fa": J1 / u - 2.0 * alpha / xi * Ja,
        "Ib": Ib,
        "Ic": Ic,
        "tail": total - Ic,               # int_u^inf (J_{a+1} - 2a J_a / s)
    }


def _stack(k11, k12, k21, k22):
    return np.stack([np.stack([k11, k12], -1), np.stack([k21, k22], -1)], -2)


def kernel_hard_limit(beta: int, alpha: float, xi, eta) -> np.ndarray:
    """Hard-edge limit kernel ``K^(beta)`` for ``beta`` in {1, 4}; shape ``(..., 2, 2)``."""
    xi, eta = np.broadcast_arrays(np.asarray(xi, dtype=float), np.asarray(eta, dtype=float))
    KJ, dKJ = kernel_bessel(alpha, xi, eta, deriv=True)
    KJt = kernel_bessel(alpha, eta, xi)
    px = _bessel_pieces(alpha, xi)
    pe = _bessel_pieces(alpha, eta)
    if beta == 4:
        k11 = KJ + 0.25 * px["Fa"] * pe["Ib"]
        k22 = KJt + 0.25 * pe["Fa"] * px["Ib"]
        k12 = -dKJ - 0.125 * px["Fa"] * pe["Jr"]
        k21 = bessel_kernel_integral(alpha, xi, eta) + 0.5 * px["Ic"] * pe["Ib"]
        return 0.5 * _stack(k11, k12, k21, k22)
    if beta == 1:
        k11 = KJ - 0.25 * px["Jr"] * pe["tail"]
        k22 = KJt - 0.25 * pe["Jr"] * px["tail"]
        k12 = -dKJ - 0.125 * px["Jr"] * pe["Fa"]
        k21 = (bessel_kernel_integral(alpha, xi, eta) - bessel_kernel_integral(alpha, eta, eta)
               + 0.5 * (pe["Ib"] - px["Ib"]) * pe["tail"] - 0.5 * np.sign(xi - eta))
        return _stack(k11, k12, k21, k22)
    raise ValueError("beta must be 1 or 4")


def kernel_soft_limit(beta: int, xi, eta) -> np.ndarray:
    """Soft-edge limit kernel ``K^(beta)`` for ``beta`` in {1, 4}."""
    xi, eta = np.broadcast_arrays(np.asarray(xi, dtype=float), np.asarray(eta, dtype=float))
    K, dK = kernel_airy(xi, eta, deriv=True)
    Kt = kernel_airy(eta, xi)
    Ax, _ = sf.airy_ai(xi)
    Ae, _ = sf.airy_ai(eta)
    Rx, Re = sf.airy_tail_right(xi), sf.airy_tail_right(eta)
    tail = airy_kernel_tail(xi, eta)
    if beta == 4:
        k11 = K - 0.5 * Ax * Re
        k22 = Kt - 0.5 * Ae * Rx
        k12 = -dK - 0.5 * Ax * Ae
        k21 = -tail + 0.5 * Rx * Re
        return 0.5 * _stack(k11, k12, k21, k22)
    if beta == 1:
        Lx, Le = sf.airy_tail_left(xi), sf.airy_tail_left(eta)
        k11 = K + 0.5 * Ax * Le
        k22 = Kt + 0.5 * Ae * Lx
        k12 = -dK - 0.5 * Ax * Ae
        k21 = (-tail - 0.5 * sf.airy_integral(xi, eta) + 0.5 * Rx * Re
               - 0.5 * np.sign(xi - eta))
        return _stack(k11, k12, k21, k22)
    raise ValueError("beta must be 1 or 4")


def kernel_bulk_limit(beta: int, xi, eta) -> np.ndarray:
    """Bulk limit kernel ``K_inf,beta`` for ``beta`` in {1, 4}."""
    xi, eta = np.broadcast_arrays(np.asarray(xi, dtype=float), np.asarray(eta, dtype=float))
    d = xi - eta
    if beta == 1:
        K, dK = kernel_sine(d, deriv=True)
        return _stack(K, dK, sine_integral(d) - 0.5 * np.sign(d), K)
    if beta == 4:
        K, dK = kernel_sine(2 * d, deriv=True)
        return _stack(K, 2 * dK, 0.5 * sine_integral(2 * d), K)
    raise ValueError("beta must be 1 or 4")


# ---------------------------------------------------------------- scalings

@dataclass(frozen=True)
class ScalingConstants:
    """Local scales.

    ``nu_sq_inv = beta_n / (4 tilde_c_n n^2)``,
    ``lambda_sq_inv = beta_n / (c_n n^(2/3))``,
    ``q_n_sq = n omega_n(x) / beta_n`` at the bulk point, ``q_n4_sq = q_n_sq / 2``.
    """

    nu_sq_inv: float
    lambda_sq_inv: float
    q_n_sq: float | None
    q_n4_sq: float | None
    beta_n: float
    x_bulk: float | None = None

    def hard(self, xi):
        return self.nu_sq_inv * np.asarray(xi, dtype=float)

    def soft(self, xi):
        return self.beta_n + self.lambda_sq_inv * np.asarray(xi, dtype=float)

    def bulk(self, xi, beta: int = 2):
        if self.q_n_sq is None:
            raise ValueError("no bulk point set")
        q2 = self.q_n4_sq if beta == 4 else self.q_n_sq
        return self.beta_n * self.x_bulk + np.asarray(xi, dtype=float) / q2

    def factor(self, regime: str, beta: int = 2) -> float:
        """Inverse of the Jacobian ``d x / d xi`` of the map for ``regime``."""
        if regime == "hard":
            return 1.0 / self.nu_sq_inv
        if regime == "soft":
            return 1.0 / self.lambda_sq_inv
        if regime == "bulk":
            return self.q_n4_sq if beta == 4 else self.q_n_sq
        raise ValueError(f"unknown regime {regime!r}")

    def map(self, regime: str, xi, beta: int = 2):
        return {"hard": self.hard, "soft": self.soft}[regime](xi) if regime != "bulk" else self.bulk(xi, beta)


def scalings(eq: EquilibriumData, x_bulk: float | None = None) -> ScalingConstants:
    """Scaling constants for the three regimes.

    Raises
    ------
    ValueError
        If ``x_bulk`` is given outside ``(0, 1)``.
    """
    n = eq.n
    q2 = q4 = None
    if x_bulk is not None:
        if not 0.0 < x_bulk < 1.0:
            raise ValueError("bulk point must lie in (0, 1)")
        q2 = n * float(omega_n(eq, x_bulk)) / eq.beta_n
        q4 = 0.5 * q2
    return ScalingConstants(
        nu_sq_inv=eq.beta_n / (4.0 * eq.tilde_c_n * n * n),
        lambda_sq_inv=eq.beta_n / (eq.c_n * n ** (2.0 / 3.0)),
        q_n_sq=q2, q_n4_sq=q4, beta_n=eq.beta_n, x_bulk=x_bulk,
    )


def limit_matrix_kernel(regime: str, beta: int, xi, eta, alpha: float = 0.0) -> np.ndarray:
    if regime == "hard":
        return kernel_hard_limit(beta, alpha, xi, eta)
    if regime == "soft":
        return kernel_soft_limit(beta, xi, eta)
    if regime == "bulk":
        return kernel_bulk_limit(beta, xi, eta)
    raise ValueError(f"unknown regime {regime!r}")


def limit_scalar_kernel(regime: str, xi, eta, alpha: float = 0.0):
    if regime == "hard":
        return kernel_bessel(alpha, xi, eta)
    if regime == "soft":
        return kernel_airy(xi, eta)
    if regime == "bulk":
        return kernel_sine(np.asarray(xi, dtype=float) - np.asarray(eta, dtype=float))
    raise ValueError(f"unknown regime {regime!r}")


# ---------------------------------------------------------- finite-n kernels

LATTICES = {
    "hard": np.array([0.5, 1.0, 2.0, 4.0, 8.0]),
    "soft": np.arange(-4.0, 3.0),
    "bulk": np.arange(-2.0, 3.0),
}
BULK_POINTS = (0.3, 0.5, 0.7)


def _conj(K, lam):
    out = np.array(K, dtype=float, copy=True)
    out[0, 1] /= lam**2
    out[1, 0] *= lam**2
    return out


def finite_scalar_kernel(t, w, eq: EquilibriumData, sc: ScalingConstants, regime: str, xi, eta):
    """Rescaled Christoffel-Darboux kernel ``K_n(x(xi), x(eta)) dx/dxi``."""
    from .orthopoly import cd_kernel
    jac = 1.0 / sc.factor(regime, 2)
    return jac * np.asarray(cd_kernel(t, w, int(eq.n), sc.map(regime, xi), sc.map(regime, eta)))


def finite_matrix_kernel(system, sc: ScalingConstants, regime: str, beta: int, xi, eta):
    """Rescaled and conjugated ``K_{n,1}`` or ``K_{n/2,4}``, shape ``shape + (2, 2)``.

    With ``jac = dx/dxi`` the result is ``jac * conj(K, jac**-1/2)``, which
    leaves the ``-1/2 sgn`` part of the ``beta = 1`` (2,1) entry unscaled.
    """
    jac = 1.0 / sc.factor(regime, beta)
    K = system.matrix_kernel(beta, sc.map(regime, xi, beta), sc.map(regime, eta, beta))
    return np.moveaxis(jac * _conj(K, jac ** -0.5), (0, 1), (-2, -1))


def _mat(a, b, c, d):
    return np.stack([np.stack([a, b], -1), np.stack([c, d], -1)], -2)


def error_weights(regime: str, beta: int, alpha: float, xi, eta):
    """Entry-dependent size of the error terms, divided out in the error metric.

    Only the hard edge carries nontrivial factors; elsewhere they are 1.
    """
    xi, eta = np.broadcast_arrays(np.asarray(xi, float), np.asarray(eta, float))
    one = np.ones_like(xi)
    if regime != "hard":
        return one if beta == 2 else np.stack([np.stack([one, one], -1)] * 2, -2)
    a2 = 0.5 * alpha
    if beta == 2:
        return xi**a2 * eta**a2
    if beta == 4:
        s = xi**a2 * eta**a2
        return _mat(s / xi, s / (xi * eta), s, s / eta)
    if beta == 1:
        return _mat(xi**a2, xi**a2 * eta ** (a2 - 1), one, eta**a2)
    raise ValueError("beta must be 1, 2 or 4")


def lattice_error(regime: str, beta: int, alpha: float, finite, limit=None):
    """Weighted sup error of ``finite(xi, eta)`` against the limit kernel.

    Returns a float for ``beta = 2`` and a 2x2 array of per-entry errors
    otherwise.
    """
    g = LATTICES[regime]
    X, Y = np.meshgrid(g, g, indexing="ij")
    if limit is None:
        if beta == 2:
            limit = lambda s, t: limit_scalar_kernel(regime, s, t, alpha)
        else:
            limit = lambda s, t: limit_matrix_kernel(regime, beta, s, t, alpha)
    diff = np.abs(np.asarray(finite(X, Y)) - np.asarray(limit(X, Y))) / error_weights(regime, beta, alpha, X, Y)
    if beta == 2:
        return float(diff.max())
    return diff.reshape(-1, 2, 2).max(axis=0)


def finite_kernel(w, n: int, regime: str, beta: int, x_bulk=None, t=None):
    """Scaled finite-n kernel: scalar for ``beta = 2``, else the 2x2 matrix kernel."""
    from .fredholm import FiniteSource
    src = FiniteSource(w, n, t=t)
    return src.scalar(regime, x_bulk) if beta == 2 else src.matrix(regime, beta, x_bulk)


def convergence_table(w, regime: str, beta: int, ns, x_bulk=None) -> np.ndarray:
    """Weighted lattice sup errors against the limit kernel, one row per ``n``.

    Rows have one column for ``beta = 2`` and four (entries 11, 12, 21, 22)
    otherwise.  In the bulk the maximum over ``x_bulk`` (default
    :data:`BULK_POINTS`) is taken.
    """
    from .fredholm import FiniteSource
    from .orthopoly import compute_recurrence
    xs = list(x_bulk or BULK_POINTS) if regime == "bulk" else [None]
    t = compute_recurrence(w, max(ns) + w.m + 2)
    out = []
    for n in ns:
        src = FiniteSource(w, n, t=t)
        errs = []
        for x in xs:
            K = src.scalar(regime, x) if beta == 2 else src.matrix(regime, beta, x)
            errs.append(np.ravel(lattice_error(regime, beta, w.alpha, K)))
        out.append(np.max(errs, axis=0))
    return np.array(out)
