"""Fredholm determinants by Nystrom discretization.

Scalar kernels give ``det(I - K)`` on an interval; 2x2 matrix kernels
(``beta = 1, 4``) give ``det(I - K)`` of the block operator.  For
``beta = 1`` the ``-1/2 sgn(x - y)`` part of the (2,1) entry is integrated
exactly against the interpolant through the nodes instead of being sampled,
which restores spectral convergence across the diagonal jump.

For block operators the regularized determinant ``det_2`` coincides with
``det`` after discretization: the correction factor only involves traces of
the diagonal blocks, which are finite-rank matrices here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre as Leg

from . import limits
from . import orthopoly as op
from .equilibrium import EquilibriumData, equilibrium
from .quadrature import gauss_legendre
from .weights import Weight

DEFAULT_ORDER = 40
SOFT_RIGHT = 12.0  # K_Ai(x, x) < 1e-15 for x beyond this
NEG_TOL = 1e-9


class SingularEntryError(ValueError):
    """A kernel entry is not finite on the grid (e.g. a bad weighting exponent)."""


class NegativeDeterminantError(ArithmeticError):
    """``det < 0`` under a square root by more than round-off."""


def _sgn_matrix_ref(t, wt):
    """``E[i, j] = int_{-1}^1 sgn(t_i - y) l_j(y) dy`` at Gauss-Legendre nodes ``t``."""
    N = len(t)
    P = Leg.legvander(t, N)  # P_k(t_i), k = 0..N
    k = np.arange(N)
    # int_{-1}^{t} P_k = (P_{k+1} - P_{k-1}) / (2k + 1), and t + 1 for k = 0
    Q = np.empty((N, N))
    Q[:, 0] = t + 1.0
    Q[:, 1:] = (P[:, 2:N + 1] - P[:, 0:N - 1]) / (2 * k[1:] + 1)
    # l_j(t) = w_j sum_k (k + 1/2) P_k(t_j) P_k(t)
    C = (k + 0.5) * P[:, :N] * wt[:, None]
    return 2.0 * (Q @ C.T) - wt[None, :]


@dataclass(frozen=True)
class NystromGrid:
    """Gauss-Legendre nodes and weights on ``(a, b)``.

    With ``graded=True`` the rule is applied in ``u`` with
    ``x = a + (b - a) u**2``, which turns functions of ``sqrt(x - a)`` into
    smooth functions of ``u`` (hard-edge kernels at non-even ``alpha``).
    """

    a: float
    b: float
    order: int = DEFAULT_ORDER
    graded: bool = False
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("need a < b")
        if self.order < 1:
            raise ValueError("order must be positive")
        t, wt = gauss_legendre(self.order)
        L = self.b - self.a
        if self.graded:
            u = 0.5 * (t + 1.0)
            x, w = self.a + L * u**2, L * u * wt
        else:
            x, w = self.a + 0.5 * L * (t + 1.0), 0.5 * L * wt
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "weights", w)

    def refined(self, factor: int = 2) -> "NystromGrid":
        return NystromGrid(self.a, self.b, self.order * factor, self.graded)

    def sgn_matrix(self) -> np.ndarray:
        """``E[i, j]`` with ``sum_j E[i, j] f(x_j) ~ int_a^b sgn(x_i - y) f(y) dy``.

        Exact for polynomials of degree ``< order`` in the rule variable.
        """
        t, wt = gauss_legendre(self.order)
        E = _sgn_matrix_ref(t, wt)
        L = self.b - self.a
        if self.graded:
            # dy = 2 L v dv, v = (t + 1)/2 on (0, 1)
            return 0.5 * E * (L * (t + 1.0))[None, :]
        return 0.5 * L * E


@dataclass(frozen=True)
class DeltaWeighting:
    """Conjugation by ``g(xi) = diag(xi**delta, xi**-delta)`` at the hard edge.

    ``delta`` must lie in ``(max(0, (1 - alpha)/2), 1/2)``; the default is
    the midpoint.
    """

    alpha: float
    delta: float | None = None

    def __post_init__(self):
        lo, hi = max(0.0, 0.5 * (1.0 - self.alpha)), 0.5
        d = 0.5 * (lo + hi) if self.delta is None else float(self.delta)
        if not lo < d < hi:
            raise ValueError(f"delta must lie in ({lo}, {hi}), got {d}")
        object.__setattr__(self, "delta", d)

    def g(self, x):
        x = np.asarray(x, dtype=float)
        return x**self.delta, x ** -self.delta


def _finite(M):
    if not np.all(np.isfinite(M)):
        raise SingularEntryError("kernel is not finite on the grid")
    return M


def _det(M, log: bool):
    sign, logdet = np.linalg.slogdet(np.eye(len(M)) - M)
    if log:
        return float(sign), float(logdet)
    if logdet > 700:
        raise OverflowError("determinant out of range; use log=True")
    return float(sign * math.exp(logdet))


def det_scalar(kernel, grid: NystromGrid, log: bool = False):
    """``det(I - K)`` on ``grid.(a, b)``.

    Parameters
    ----------
    kernel : callable
        ``kernel(x, y)`` vectorized over broadcast arrays.
    log : bool
        Return ``(sign, log|det|)`` instead.
    """
    x, wt = grid.nodes, grid.weights
    sw = np.sqrt(wt)
    K = np.asarray(kernel(x[:, None], x[None, :]), dtype=float)
    return _det(_finite(sw[:, None] * K * sw[None, :]), log)


def det_block2(kernel, grid: NystromGrid, weighting: DeltaWeighting | None = None,
               jump: float = 0.0, log: bool = False):
    """``det(I - K)`` for a 2x2 matrix kernel.

    Parameters
    ----------
    kernel : callable
        ``kernel(x, y)`` returning shape ``shape + (2, 2)``.
    weighting : DeltaWeighting, optional
        Conjugate by ``g``.  The determinant is unchanged up to round-off;
        this only rebalances the blocks.
    jump : float
        Coefficient ``c`` of a ``c sgn(x - y)`` term contained in the (2,1)
        entry; it is integrated exactly rather than sampled.
    """
    x, wt = grid.nodes, grid.weights
    N = len(x)
    X, Y = x[:, None], x[None, :]
    K = np.asarray(kernel(X * np.ones_like(Y), Y * np.ones_like(X)), dtype=float)
    M = np.empty((2 * N, 2 * N))
    for i in range(2):
        for j in range(2):
            M[i * N:(i + 1) * N, j * N:(j + 1) * N] = K[..., i, j] * wt[None, :]
    if jump:
        M[N:, :N] -= jump * np.sign(X - Y) * wt[None, :]
        M[N:, :N] += jump * grid.sgn_matrix()
    _finite(M)
    if weighting is not None:
        g1, g2 = weighting.g(x)
        gd = np.concatenate([g1, g2])
        M = gd[:, None] * M / gd[None, :]
    return _det(M, log)


# ---------------------------------------------------------------- sources

@dataclass
class LimitSource:
    """Limiting kernels at a fixed ``alpha``."""

    alpha: float = 0.0

    def scalar(self, regime: str):
        return lambda s, t: limits.limit_scalar_kernel(regime, s, t, self.alpha)

    def matrix(self, regime: str, beta: int):
        return lambda s, t: limits.limit_matrix_kernel(regime, beta, s, t, self.alpha)


@dataclass
class FiniteSource:
    """Rescaled finite-``n`` kernels of one weight.

    ``beta = 2`` uses the Christoffel-Darboux kernel and works for any
    ``alpha >= 0``; ``beta = 1, 4`` need the Widom system (even ``n``,
    ``alpha > 0``), built on first use.
    """

    w: Weight
    n: int
    t: op.RecurrenceTable | None = None
    eq: EquilibriumData | None = None
    system: object = None
    x_bulk: float | None = None

    def __post_init__(self):
        if self.t is None:
            self.t = op.compute_recurrence(self.w, self.n + self.w.m + 2)
        if self.eq is None:
            self.eq = equilibrium(self.w, self.n)

    @property
    def alpha(self) -> float:
        return self.w.alpha

    def scalings(self, x_bulk: float | None = None) -> limits.ScalingConstants:
        return limits.scalings(self.eq, x_bulk if x_bulk is not None else self.x_bulk)

    def scalar(self, regime: str, x_bulk: float | None = None):
        sc = self.scalings(x_bulk)
        return lambda s, u: limits.finite_scalar_kernel(self.t, self.w, self.eq, sc, regime, s, u)

    def matrix(self, regime: str, beta: int, x_bulk: float | None = None):
        if self.system is None:
            from .widom import build
            self.system = build(self.w, self.n, t=self.t, eq=self.eq)
        sc = self.scalings(x_bulk)
        return lambda s, u: limits.finite_matrix_kernel(self.system, sc, regime, beta, s, u)


def _source_kernel(source, regime, beta, x_bulk=None):
    if isinstance(source, FiniteSource):
        return source.scalar(regime, x_bulk) if beta == 2 else source.matrix(regime, beta, x_bulk)
    return source.scalar(regime) if beta == 2 else source.matrix(regime, beta)


def _sqrt_det(d):
    if d < -NEG_TOL:
        raise NegativeDeterminantError(f"det = {d:.3e} < 0; refine the grid")
    return math.sqrt(max(d, 0.0))


def gap_probability(beta: int, source, regime: str, interval: tuple,
                    order: int = DEFAULT_ORDER, x_bulk: float | None = None,
                    weighting: DeltaWeighting | None = None, graded: bool | None = None) -> float:
    """Probability of no (rescaled) eigenvalue in ``interval``.

    ``det`` for ``beta = 2``; ``sqrt(det)`` for ``beta = 1, 4``.  The grid
    is graded towards the left end by default at the hard edge.
    """
    if beta not in (1, 2, 4):
        raise ValueError("beta must be 1, 2 or 4")
    a, b = interval
    if b <= a:
        return 1.0
    if graded is None:
        graded = regime == "hard"
    grid = NystromGrid(a, b, order, graded)
    K = _source_kernel(source, regime, beta, x_bulk)
    if beta == 2:
        return det_scalar(K, grid)
    return _sqrt_det(det_block2(K, grid, weighting=weighting, jump=-0.5 if beta == 1 else 0.0))


def _hard_weighting(beta, source):
    # the admissible delta interval is empty at alpha = 0, where the plain
    # kernel is already bounded on (0, s)
    return DeltaWeighting(source.alpha) if beta != 2 and source.alpha > 0 else None


def smallest_eig_cdf(beta: int, source, s: float, order: int = DEFAULT_ORDER) -> float:
    """``P(rescaled smallest eigenvalue <= s)`` from the hard-edge kernel on ``(0, s)``."""
    if s <= 0:
        raise ValueError("s must be positive")
    return 1.0 - gap_probability(beta, source, "hard", (0.0, s), order,
                                 weighting=_hard_weighting(beta, source))


def largest_eig_cdf(beta: int, source, s: float, order: int = DEFAULT_ORDER,
                    right: float = SOFT_RIGHT) -> float:
    """``P(rescaled largest eigenvalue <= s)`` from the soft-edge kernel on ``(s, right)``."""
    return gap_probability(beta, source, "soft", (s, max(right, s)), order)


def bulk_gap(beta: int, source, xi: float, order: int = DEFAULT_ORDER,
             x_bulk: float | None = None) -> float:
    """Probability that ``(-xi/2, xi/2)`` (bulk scaling) holds no eigenvalue."""
    if xi < 0:
        raise ValueError("xi must be non-negative")
    return gap_probability(beta, source, "bulk", (-0.5 * xi, 0.5 * xi), order, x_bulk=x_bulk)


def self_convergence(fn, order: int = DEFAULT_ORDER) -> tuple:
    """``(fn(order), |fn(order) - fn(2 order)|)``."""
    v1 = fn(order)
    return v1, abs(v1 - fn(2 * order))


def correlation_beta2(t: op.RecurrenceTable, w: Weight, n: int, points) -> float:
    """``l``-point correlation ``det[K_n(x_i, x_j)]`` of the unitary ensemble."""
    x = np.asarray(points, dtype=float).ravel()
    K = np.asarray(op.cd_kernel(t, w, n, x[:, None], x[None, :]))
    return float(np.linalg.det(K))


def exact_smallest_cdf_laguerre(n: int, t: float) -> float:
    """``P(lambda_min <= t) = 1 - exp(-n t)`` for weight ``e^(-x)``, ``alpha = 0``."""
    return 1.0 - math.exp(-n * t)
