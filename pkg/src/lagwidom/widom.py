"""Widom's construction of the beta = 1 and beta = 4 kernels.

For even ``n`` the kernels are finite-rank corrections of the
Christoffel-Darboux kernel ``K_n``:

    S4(x, y) = K_n(x, y) - Phi2(x) A21 eps Phi1(y)^T - Phi2(x) G11 eps Phi2(y)^T
    S1(x, y) = K_n(x, y) - Phi1(x) A12 eps Phi2(y)^T - Phi1(x) Ghat11 eps Phi1(y)^T

with ``S4`` the kernel of ``K_{n/2,4}`` and ``S1`` that of ``K_{n,1}``.  The
bases are

    Phi1 = (phi_{n-1}, ..., phi_{n-m+1}, psi1),
    Phi2 = (phi_n, ..., phi_{n+m-2}, psi2),

where ``psi1`` and ``psi2`` are normalized versions of

    psi1~(x) = sum_{k<n} p_k(0) phi_k(x),
    psi2~(x) = (gamma_{n-1}/gamma_n) (I_{n-1} phi_n(x) - I_n phi_{n-1}(x)) / x,

with ``I_j = int p_j(y) w(y) / y dy``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import orthopoly as op
from .equilibrium import EquilibriumData, equilibrium
from .quadrature import PanelGrid
from .weights import Weight, eval_V_prime


class SingularityError(np.linalg.LinAlgError):
    pass


class AsymmetryError(ValueError):
    pass


COND_LIMIT = 1e8
B_DEFECT_LIMIT = 1e-5


def d_n_constant(w: Weight, n: float, eq: EquilibriumData) -> float:
    """``d_n = -Gamma(alpha) beta_n**(alpha/2) / (tilde_c_n**(alpha/2) n**alpha e**(V(0)/2))``."""
    if w.alpha <= 0:
        raise ValueError("d_n needs alpha > 0")
    log_mag = (math.lgamma(w.alpha) + 0.5 * w.alpha * math.log(eq.beta_n)
               - 0.5 * w.alpha * math.log(eq.tilde_c_n) - w.alpha * math.log(n)
               - 0.5 * w.v_coeffs[0])
    if log_mag > 700:
        raise OverflowError(f"|d_n| overflows (log = {log_mag:.1f})")
    return -math.exp(log_mag)


def a21_matrix(w: Weight, t: op.RecurrenceTable, n: int, beta_n: float,
               grid: PanelGrid) -> tuple:
    """``A21 = -(n/beta_n) diag[Q_n, 1/2]`` and the block ``Q_n``.

    ``Q_n(i, j) = (beta_n/2n) <V' phi_{n-j}, phi_{n+i-1}>`` for ``1 <= i, j <= m-1``,
    computed by quadrature.
    """
    m = w.m
    x, wq = grid.rule(w.alpha)
    F = op.phi_matrix(t, w, x, n + m - 2)
    vp = eval_V_prime(w, x)
    Q = np.zeros((m - 1, m - 1))
    for i in range(1, m):
        for j in range(1, m):
            Q[i - 1, j - 1] = beta_n / (2 * n) * np.sum(vp * F[n - j] * F[n + i - 1] * wq)
    blk = np.zeros((m, m))
    blk[: m - 1, : m - 1] = Q
    blk[m - 1, m - 1] = 0.5
    return -(n / beta_n) * blk, Q


def q_matrix_recurrence(w: Weight, t: op.RecurrenceTable, n: int, beta_n: float) -> np.ndarray:
    """``Q_n`` from ``<V'(x) phi_k, phi_l> = V'(J)_{lk}`` with ``J`` the Jacobi matrix."""
    m = w.m
    N = min(t.n_max + 1, n + 2 * m + 2)
    J = np.diag(t.a[:N]) + np.diag(t.b[: N - 1], 1) + np.diag(t.b[: N - 1], -1)
    Vp = np.zeros((N, N))
    Jp = np.eye(N)
    for j in range(1, m + 1):
        Vp += j * w.v_coeffs[j] * Jp
        Jp = Jp @ J
    Q = np.zeros((m - 1, m - 1))
    for i in range(1, m):
        for j in range(1, m):
            Q[i - 1, j - 1] = beta_n / (2 * n) * Vp[n + i - 1, n - j]
    return Q


@dataclass
class WidomSystem:
    """Assembled Widom system at even ``n``.

    Use :func:`build` to construct.  ``B`` is stored skew-symmetrized, and
    ``B_defect`` records the relative asymmetry before that step.
    """

    w: Weight
    n: int
    t: op.RecurrenceTable
    eq: EquilibriumData
    grid: PanelGrid
    d_n: float
    I_nm1: float
    I_n: float
    A21: np.ndarray
    A12: np.ndarray
    Q_n: np.ndarray
    B: np.ndarray
    B_defect: float
    C: np.ndarray
    G11: np.ndarray
    Ghat11: np.ndarray
    Ghat11_alt: np.ndarray
    B_scale: float
    epsPhi1_inf: np.ndarray
    epsPhi2_inf: np.ndarray
    cond_C11: float
    cond_Chat22: float
    anti: op.Antiderivative

    @property
    def m(self) -> int:
        return self.w.m

    @property
    def kmax(self) -> int:
        return self.n + max(self.m - 2, 0)

    @property
    def idx1(self) -> list:
        n, K = self.n, self.kmax
        return [n - 1 - i for i in range(self.m - 1)] + [K + 1]

    @property
    def idx2(self) -> list:
        n, K = self.n, self.kmax
        return [n + i for i in range(self.m - 1)] + [K + 2]

    @property
    def A(self) -> np.ndarray:
        m = self.m
        A = np.zeros((2 * m, 2 * m))
        A[:m, m:] = self.A12
        A[m:, :m] = self.A21
        return A

    # -- family of functions ---------------------------------------------------

    def family(self, x) -> np.ndarray:
        return _family(self.w, self.t, self.n, self.d_n, self.eq.beta_n,
                       self.I_nm1, self.I_n, x)

    def family_deriv(self, x) -> tuple:
        return _family(self.w, self.t, self.n, self.d_n, self.eq.beta_n,
                       self.I_nm1, self.I_n, x, deriv=True)

    def psi1(self, x):
        return self.family(np.atleast_1d(x))[self.kmax + 1]

    def psi2(self, x):
        return self.family(np.atleast_1d(x))[self.kmax + 2]

    def psi_tilde(self, x):
        """Unnormalized ``(psi1~, psi2~)``."""
        f = self.family(np.atleast_1d(x))
        s = math.sqrt(self.eq.beta_n / self.n)
        return f[self.kmax + 1] / (self.w.alpha * self.d_n * s), f[self.kmax + 2] * self.d_n / s

    def Phi(self, x) -> tuple:
        f = self.family(np.atleast_1d(x))
        return f[self.idx1], f[self.idx2]

    # -- kernels ----------------------------------------------------------------

    def _parts(self, x, y, kind):
        # flat work arrays plus the broadcast shape (() for scalars)
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        return x.ravel(), y.ravel(), x.shape

    def _y_terms(self, y, form):
        """Vectors standing in for ``eps Phi(y)`` in the chosen form."""
        if form == "eps":
            return self.anti.eps(y)
        if form == "hard":
            return self.anti(y)
        if form == "soft":
            return -self.anti.tail(y)
        raise ValueError(f"unknown form {form!r}")

    def S4(self, x, y, form: str = "auto"):
        """``S_{n/2,4}(x, y)``.

        ``form`` selects how ``eps Phi(y)`` enters: ``"eps"`` literally,
        ``"hard"`` as ``int_0^y Phi``, ``"soft"`` as ``-int_y^inf Phi``.  The
        three agree because ``A21 eps Phi1(inf) + G11 eps Phi2(inf) = 0``;
        ``"auto"`` picks hard below ``beta_n/2`` and soft above.
        """
        x, y, shape = self._parts(x, y, None)
        fx = self.family(x)
        out = np.sum(fx[: self.n] * self.family(y)[: self.n], axis=0)
        out -= self._corr4(fx, y, form)
        return out.reshape(shape)

    def _corr4(self, fx, y, form):
        P2x = fx[self.idx2]
        out = np.zeros(y.size)
        for f, mask in self._split(y, form):
            E = self._y_terms(y[mask], f)
            out[mask] = np.einsum("in,ij,jn->n", P2x[:, mask], self.A21, E[self.idx1]) \
                + np.einsum("in,ij,jn->n", P2x[:, mask], self.G11, E[self.idx2])
        return out

    def _split(self, y, form):
        if form != "auto":
            return [(form, np.ones(y.size, bool))]
        low = y <= 0.5 * self.eq.beta_n
        return [(f, m) for f, m in (("hard", low), ("soft", ~low)) if np.any(m)]

    def S1(self, x, y):
        """``S_{n,1}(x, y) = K_n - Phi1(x) A12 eps Phi2(y)^T - Phi1(x) Ghat11 eps Phi1(y)^T``."""
        x, y, shape = self._parts(x, y, None)
        fx = self.family(x)
        out = np.sum(fx[: self.n] * self.family(y)[: self.n], axis=0)
        E = self.anti.eps(y)
        P1x = fx[self.idx1]
        out -= np.einsum("in,ij,jn->n", P1x, self.A12, E[self.idx2])
        out -= np.einsum("in,ij,jn->n", P1x, self.Ghat11, E[self.idx1])
        return out.reshape(shape)

    def S1_widom(self, x, y):
        """``S_{n,1}`` from the undigested form ``K_n - (Phi1(x), 0)(AC(I-BAC)^{-1})^T eps Phi(y)^T``."""
        x, y, shape = self._parts(x, y, None)
        fx = self.family(x)
        out = np.sum(fx[: self.n] * self.family(y)[: self.n], axis=0)
        A = self.A
        M = (A @ self.C @ np.linalg.inv(np.eye(2 * self.m) - self.B @ A @ self.C)).T
        E = self.anti.eps(y)
        Ey = np.concatenate([E[self.idx1], E[self.idx2]])
        out -= np.einsum("in,ij,jn->n", fx[self.idx1], M[: self.m], Ey)
        return out.reshape(shape)

    def dS4_dy(self, x, y):
        """``d/dy S_{n/2,4}(x, y)``, using ``D eps Phi = Phi``."""
        x, y, shape = self._parts(x, y, None)
        fx = self.family(x)
        fy, dfy = self.family_deriv(y)
        out = np.sum(fx[: self.n] * dfy[: self.n], axis=0)
        P2x = fx[self.idx2]
        out -= np.einsum("in,ij,jn->n", P2x, self.A21, fy[self.idx1])
        out -= np.einsum("in,ij,jn->n", P2x, self.G11, fy[self.idx2])
        return out.reshape(shape)

    def dS1_dy(self, x, y):
        x, y, shape = self._parts(x, y, None)
        fx = self.family(x)
        fy, dfy = self.family_deriv(y)
        out = np.sum(fx[: self.n] * dfy[: self.n], axis=0)
        P1x = fx[self.idx1]
        out -= np.einsum("in,ij,jn->n", P1x, self.A12, fy[self.idx2])
        out -= np.einsum("in,ij,jn->n", P1x, self.Ghat11, fy[self.idx1])
        return out.reshape(shape)

    def epsS4(self, x, y, form: str = "auto", yform: str = "auto"):
        """``(eps S4)(x, y)``: ``int_0^x S4(t, y) dt`` (``form="hard"``),
        ``-int_x^inf S4(t, y) dt`` (``"soft"``) or the literal ``eps`` form.
        """
        x, y, shape = self._parts(x, y, None)
        fy = self.family(y)
        out = np.zeros(x.size)
        for f, mask in self._split(x, form):
            Ex = self._y_terms(x[mask], f)
            part = np.sum(Ex[: self.n] * fy[: self.n, mask], axis=0)
            part -= self._corr4(Ex, y[mask], yform)
            out[mask] = part
        return out.reshape(shape)

    def epsS1(self, x, y):
        """``(eps S1)(x, y)``, skew-symmetric in ``(x, y)``."""
        x, y, shape = self._parts(x, y, None)
        Ex = self.anti.eps(x)
        fy = self.family(y)
        Ey = self.anti.eps(y)
        out = np.sum(Ex[: self.n] * fy[: self.n], axis=0)
        P1x = Ex[self.idx1]
        out -= np.einsum("in,ij,jn->n", P1x, self.A12, Ey[self.idx2])
        out -= np.einsum("in,ij,jn->n", P1x, self.Ghat11, Ey[self.idx1])
        return out.reshape(shape)

    def matrix_kernel(self, beta: int, x, y) -> np.ndarray:
        """``K_{n,1}`` (``beta=1``) or ``K_{n/2,4}`` (``beta=4``); shape ``(2, 2) + shape``."""
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        if beta == 1:
            return np.array([
                [self.S1(x, y), -self.dS1_dy(x, y)],
                [self.epsS1(x, y) - 0.5 * np.sign(x - y), self.S1(y, x)],
            ])
        if beta == 4:
            return 0.5 * np.array([
                [self.S4(x, y), -self.dS4_dy(x, y)],
                [self.epsS4(x, y), self.S4(y, x)],
            ])
        raise ValueError("beta must be 1 or 4")

    # -- diagnostics --------------------------------------------------------

    def bac_residual(self) -> float:
        """Size of ``BAC - [[0, 0], [C21, C22]]`` relative to ``|B| |A| |C|``.

        ``|B|`` is the integrand scale ``B_scale`` so that the measure stays
        meaningful when ``B`` itself nearly vanishes.
        """
        m = self.m
        M = self.B @ self.A @ self.C
        target = np.zeros_like(M)
        target[m:, :] = self.C[m:, :]
        scale = self.B_scale * np.abs(self.A).max() * max(np.abs(self.C).max(), 1.0)
        return float(np.abs(M - target).max() / scale)

    def moreC_check(self) -> float:
        """Normalized max norm of ``A21 eps Phi1(inf) + G11 eps Phi2(inf)``.

        The scale is ``|A21|`` times the largest entry of the full ``eps Phi(inf)``;
        for ``m = 1`` the first block vanishes identically.
        """
        r = self.A21 @ self.epsPhi1_inf + self.G11 @ self.epsPhi2_inf
        e = max(np.abs(self.epsPhi1_inf).max(), np.abs(self.epsPhi2_inf).max())
        scale = np.abs(self.A21).max() * e
        return float(np.abs(r).max() / scale)

    def matrices(self) -> dict:
        m = self.m
        B = self.B
        return {
            "A21": self.A21, "A12": self.A12,
            "B": B, "B11": B[:m, :m], "B12": B[:m, m:], "B21": B[m:, :m], "B22": B[m:, m:],
            "C": self.C, "G11": self.G11, "Ghat11": self.Ghat11,
            "epsPhi1_inf": self.epsPhi1_inf[None, :], "epsPhi2_inf": self.epsPhi2_inf[None, :],
        }

    def metadata(self) -> dict:
        return {"n": self.n, "m": self.m, "alpha": self.w.alpha,
                "v_coeffs": list(self.w.v_coeffs), "beta_n": self.eq.beta_n,
                "d_n": self.d_n, "B_defect": self.B_defect,
                "cond_C11": self.cond_C11, "cond_Chat22": self.cond_Chat22,
                "quadrature": self.grid.config()}


def _family(w, t, n, d_n, beta_n, I_nm1, I_n, x, deriv=False):
    """Rows ``phi_0..phi_{n+m-2}, psi1, psi2`` at ``x`` (and derivatives)."""
    K = n + max(w.m - 2, 0)
    x = np.asarray(x, dtype=float)
    s = math.sqrt(beta_n / n)
    c1 = w.alpha * d_n * s
    c2 = s / d_n
    ratio = t.b[n - 1]  # gamma_{n-1} / gamma_n
    pz = t.p_at_zero[:n]
    if not deriv:
        F = op.phi_matrix(t, w, x, K)
        psi1 = c1 * (pz @ F[:n])
        with np.errstate(divide="ignore", invalid="ignore"):
            psi2 = c2 * ratio * (I_nm1 * F[n] - I_n * F[n - 1]) / x
        return np.vstack([F, psi1, psi2])
    F, D = op.phi_and_deriv(t, w, x, K)
    num = I_nm1 * F[n] - I_n * F[n - 1]
    dnum = I_nm1 * D[n] - I_n * D[n - 1]
    vals = np.vstack([F, c1 * (pz @ F[:n]), c2 * ratio * num / x])
    ders = np.vstack([D, c1 * (pz @ D[:n]), c2 * ratio * (dnum / x - num / x**2)])
    return vals, ders


def build(w: Weight, n: int, t: op.RecurrenceTable | None = None,
          eq: EquilibriumData | None = None, order: int = 24, refine: int = 1,
          check: bool = True) -> WidomSystem:
    """Assemble the Widom system for even ``n``.

    Parameters
    ----------
    order, refine : int
        Nodes per panel and a multiplier on the panel count of the
        double-precision grid.
    check : bool
        Raise on a large ``B`` asymmetry or ill-conditioned ``C11``/``Chat22``.
    """
    m = w.m
    if n % 2:
        raise ValueError("n must be even")
    if n < m + 2:
        raise ValueError("n must be >= m + 2")
    if w.alpha <= 0:
        raise ValueError("the Widom system needs alpha > 0")
    if t is None:
        t = op.compute_recurrence(w, n + m + 2)
    if t.n_max < n + m - 1:
        raise ValueError("recurrence table too short for this n")
    eq = eq or equilibrium(w, n)
    beta_n = eq.beta_n
    K = n + max(m - 2, 0)
    grid = op.default_grid(t, w, K + 1, order=order, refine=refine)
    d_n = d_n_constant(w, n, eq)
    I_nm1, I_n = op.cauchy_at_zero(t, w, [n - 1, n], grid)
    A21, Q = a21_matrix(w, t, n, beta_n, grid)
    A12 = A21.T.copy()

    def fam(x):
        return _family(w, t, n, d_n, beta_n, I_nm1, I_n, x)

    a = 0.5 * w.alpha
    expo = np.concatenate([np.full(K + 2, a), [a - 1.0]])
    anti = op.Antiderivative(fam, expo, grid)
    idx = [n - 1 - i for i in range(m - 1)] + [K + 1] + [n + i for i in range(m - 1)] + [K + 2]
    ex = expo[idx]
    T = anti.total[idx]
    Bs = np.zeros((2 * m, 2 * m))
    Babs = np.zeros((2 * m, 2 * m))
    for e in np.unique(ex[:, None] + ex[None, :] + 1.0):
        xq, wq = grid.rule(e)
        Fv = anti(xq)[idx]
        Pv = fam(xq)[idx]
        sel = np.isclose(ex[:, None] + ex[None, :] + 1.0, e)
        Bs[sel] = ((Fv * wq) @ Pv.T)[sel]
        Babs[sel] = ((np.abs(Fv - 0.5 * T[:, None]) * np.abs(wq)) @ np.abs(Pv).T)[sel]
    Bs -= 0.5 * np.outer(T, T)
    # defect relative to the size of the integrands, not of B itself (B can vanish)
    B_scale = float(Babs.max())
    asym = np.abs(Bs + Bs.T).max() / B_scale
    if check and asym > B_DEFECT_LIMIT:
        raise AsymmetryError(f"B is not skew-symmetric (defect {asym:.2e})")
    B = 0.5 * (Bs - Bs.T)
    A = np.zeros((2 * m, 2 * m))
    A[:m, m:] = A12
    A[m:, :m] = A21
    C = B @ A
    C[:m, :m] += np.eye(m)
    C11, C12, C21, C22 = C[:m, :m], C[:m, m:], C[m:, :m], C[m:, m:]
    Chat22 = np.eye(m) - C22
    cond11 = float(np.linalg.cond(C11))
    cond22 = float(np.linalg.cond(Chat22))
    if check and max(cond11, cond22) > COND_LIMIT:
        raise SingularityError(f"cond(C11) = {cond11:.2e}, cond(Chat22) = {cond22:.2e}")
    G11 = A21 @ np.linalg.solve(C11, C12)
    B22 = B[m:, m:]
    Ghat11 = -A12 @ B22 @ np.linalg.inv(Chat22).T @ A21
    Ghat11_alt = -A12 @ np.linalg.solve(Chat22, C21)
    epsinf = 0.5 * T
    return WidomSystem(
        w=w, n=n, t=t, eq=eq, grid=grid, d_n=d_n, I_nm1=float(I_nm1), I_n=float(I_n),
        A21=A21, A12=A12, Q_n=Q, B=B, B_defect=float(asym), C=C, G11=G11,
        Ghat11=Ghat11, Ghat11_alt=Ghat11_alt, B_scale=B_scale, epsPhi1_inf=epsinf[:m], epsPhi2_inf=epsinf[m:],
        cond_C11=cond11, cond_Chat22=cond22, anti=anti)


def conjugate(K: np.ndarray, lam: float) -> np.ndarray:
    """``diag(1/lam, lam) K diag(lam, 1/lam)``: scales (1,2) by ``lam**-2`` and (2,1) by ``lam**2``."""
    out = np.array(K, dtype=float, copy=True)
    out[0, 1] = out[0, 1] / lam**2
    out[1, 0] = out[1, 0] * lam**2
    return out


IDENTITY_LIMITS = {"B_skew": 1e-8, "BAC": 1e-6, "G11_skew": 1e-7, "Ghat11_skew": 1e-7,
                   "moreC": 1e-5, "A21_mm": 1e-10}


def identity_residuals(system) -> dict:
    """Residuals of the structural identities of an assembled Widom system."""
    def skew(G):
        return float(np.abs(G + G.T).max() / max(np.abs(G).max(), 1e-300))
    n, beta_n = system.n, system.eq.beta_n
    return {
        "B_skew": system.B_defect,
        "BAC": system.bac_residual(),
        "G11_skew": skew(system.G11),
        "Ghat11_skew": skew(system.Ghat11),
        "moreC": system.moreC_check(),
        "A21_mm": abs(system.A21[-1, -1] + n / (2 * beta_n)),
    }
