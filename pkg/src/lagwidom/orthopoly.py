"""Orthonormal polynomials for a Laguerre-type weight.

The recurrence coefficients are produced once, in extended precision, by the
discretized Stieltjes procedure.  Everything downstream runs in double
precision on the functions ``phi_k = p_k sqrt(w)``:

    x phi_k = b_k phi_{k+1} + a_k phi_k + b_{k-1} phi_{k-1}.

Values are propagated with a running logarithmic scale so that neither
``p_k`` nor ``sqrt(w)`` over- or underflows on its own.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from . import equilibrium as eqm
from .quadrature import PanelGrid, local_rules, mp_gauss_jacobi_left
from .weights import Weight, eval_V, eval_V_prime

KAPPA = 1.0 / 12.0


class PrecisionExhausted(ArithmeticError):
    """Raised when the Stieltjes stage runs out of significant bits."""


def default_bits() -> int:
    env = os.environ.get("RMT_PRECISION_BITS")
    if env:
        bits = int(env)
        if bits < 53:
            raise ValueError("RMT_PRECISION_BITS must be >= 53")
        return bits
    return 256


@dataclass(frozen=True)
class PrecisionContext:
    """Settings for the extended-precision recurrence stage.

    ``panel_count = 0`` lets :func:`compute_recurrence` pick the panel count
    from ``n_max``.
    """

    mantissa_bits: int = field(default_factory=default_bits)
    panel_count: int = 0
    nodes_per_panel: int = 40

    def __post_init__(self):
        if self.mantissa_bits < 53:
            raise ValueError("mantissa_bits must be >= 53")
        if self.nodes_per_panel < 2:
            raise ValueError("nodes_per_panel must be >= 2")

    @property
    def digits(self) -> int:
        return int(self.mantissa_bits * math.log10(2))


@dataclass
class RecurrenceTable:
    """Three-term recurrence data of the orthonormal polynomials.

    Attributes
    ----------
    a, b : ndarray
        ``a_0..a_{n_max}`` and ``b_0..b_{n_max}``.
    gamma : ndarray
        Leading coefficients ``gamma_k`` of ``p_k``.
    p_at_zero : ndarray
        ``p_k(0)``.
    exact : dict
        Decimal strings of the extended-precision values.
    """

    a: np.ndarray
    b: np.ndarray
    gamma: np.ndarray
    p_at_zero: np.ndarray
    n_max: int
    exact: dict
    mantissa_bits: int
    x_max: float
    bits_lost: float
    weight: str

    def to_json(self) -> str:
        return json.dumps({
            "n_max": self.n_max, "mantissa_bits": self.mantissa_bits,
            "x_max": self.x_max, "bits_lost": self.bits_lost, "weight": self.weight,
            **{k: v for k, v in self.exact.items()},
        })

    @classmethod
    def from_json(cls, text: str) -> "RecurrenceTable":
        d = json.loads(text)
        exact = {k: d[k] for k in ("a", "b", "gamma", "p_at_zero")}
        arr = {k: np.array([float(mp.mpf(s)) for s in v]) for k, v in exact.items()}
        return cls(arr["a"], arr["b"], arr["gamma"], arr["p_at_zero"], d["n_max"], exact,
                   d["mantissa_bits"], d["x_max"], d["bits_lost"], d["weight"])


# -- extended-precision stage -------------------------------------------------

def _mp_nodes(w: Weight, X, panels, p, prec):
    """Composite rule for ``w(x) dx`` on ``[0, X]``: nodes and weights (mpf lists).

    The first panel carries ``x**alpha`` in a Gauss-Jacobi rule.
    """
    alpha = mp.mpf(w.alpha)
    q = [mp.mpf(c) for c in w.v_coeffs]
    brk = [mp.mpf(X) * (mp.mpf(j) / panels) ** 2 for j in range(panels + 1)]
    yj, wj = mp_gauss_jacobi_left(p, alpha, prec)
    yl, wl = mp_gauss_jacobi_left(p, 0, prec)

    def V(x):
        s = mp.mpf(0)
        for c in reversed(q):
            s = s * x + c
        return s

    xs, ws = [], []
    h = brk[1]
    for y, wy in zip(yj, wj):
        x = h * (1 + y) / 2
        xs.append(x)
        ws.append(wy * (h / 2) ** (alpha + 1) * mp.exp(-V(x)))
    for j in range(1, panels):
        a, b = brk[j], brk[j + 1]
        for y, wy in zip(yl, wl):
            x = (b - a) * y / 2 + (a + b) / 2
            xs.append(x)
            ws.append(wy * (b - a) / 2 * x**alpha * mp.exp(-V(x)))
    return xs, ws


def _stieltjes(xs, ws, kmax, prec):
    """Discretized Stieltjes on the monic polynomials, ``k = 0..kmax``.

    Returns lists ``a, b2, norms, pi0``.
    """
    with mp.workprec(prec):
        xs = [+x for x in xs]
        ws = [+v for v in ws]
        M = len(xs)
        prev = [mp.mpf(0)] * M
        cur = [mp.mpf(1)] * M
        a, b2, norms, pi0 = [], [], [], []
        z_prev, z_cur = mp.mpf(0), mp.mpf(1)
        nk = mp.fsum(ws)
        for k in range(kmax + 1):
            if not nk > 0:
                raise PrecisionExhausted(f"norm of pi_{k} lost all significant digits")
            ak = mp.fdot(ws, [x * c * c for x, c in zip(xs, cur)]) / nk
            norms.append(nk)
            a.append(ak)
            pi0.append(z_cur)
            bk2 = b2[-1] if b2 else mp.mpf(0)
            nxt = [(x - ak) * c - bk2 * pv for x, c, pv in zip(xs, cur, prev)]
            z_prev, z_cur = z_cur, -ak * z_cur - bk2 * z_prev
            nn = mp.fdot(ws, [v * v for v in nxt])
            b2.append(nn / nk)
            prev, cur, nk = cur, nxt, nn
    return a, b2, norms, pi0


def _x_max(w: Weight, n_max: int, digits: int) -> float:
    """Right end of the extended-precision grid.

    Lower bound from the soft-edge scale, then extended until the equilibrium
    decay exponent ``n int_1^y sqrt((s-1)/s) h_n`` beats the tail target.
    """
    eq = eqm.equilibrium(w, n_max + 1)
    base = eq.beta_n * (1.0 + 2.0 * (n_max + 1) ** (KAPPA - 2.0 / 3.0))
    target = 2.0 * digits * math.log(10.0) + 20.0
    y = 1.0 + 2.0 * (n_max + 1) ** (KAPPA - 2.0 / 3.0)
    while (n_max + 1) * eqm.exterior_integral(eq.h_coeffs, y) < target:
        y *= 1.1
    return max(base, y * eq.beta_n)


def compute_recurrence(w: Weight, n_max: int, ctx: PrecisionContext | None = None,
                       x_max: float | None = None) -> RecurrenceTable:
    """Recurrence coefficients ``a_k, b_k`` for ``k <= n_max``.

    The Stieltjes procedure is run twice: at ``ctx.mantissa_bits`` and at
    roughly half that.  The discrepancy between the two runs measures how
    many bits the recurrence destroys; if that exceeds the headroom above
    double precision, :class:`PrecisionExhausted` is raised.

    Raises
    ------
    PrecisionExhausted
        If ``b_k**2`` loses its significant digits.
    """
    ctx = ctx or PrecisionContext()
    if n_max < w.m + 2:
        raise ValueError("n_max must be at least m + 2")
    prec = ctx.mantissa_bits
    p = ctx.nodes_per_panel
    X = x_max or _x_max(w, n_max, ctx.digits)
    beta = eqm.mrs_number(w, n_max + 1)
    panels = ctx.panel_count or max(
        8, math.ceil(4.0 * (n_max + 8) * math.sqrt(X / beta) / p),
        math.ceil(4 * n_max / p))
    if panels * p < 4 * n_max:
        raise ValueError("panel_count * nodes_per_panel must be >= 4 n_max")
    with mp.workprec(prec + 10):
        xs, ws = _mp_nodes(w, X, panels, p, prec + 10)
    a, b2, norms, pi0 = _stieltjes(xs, ws, n_max + 1, prec)
    if any(not v > 0 for v in b2):
        raise PrecisionExhausted("b_k^2 lost all significant digits")
    low = max(53, prec // 2)
    if low < prec:
        a_lo, b2_lo, _, _ = _stieltjes(xs, ws, n_max + 1, low)
        if any(not v > 0 for v in b2_lo):
            err = mp.mpf(1)
        else:
            err = max(max(abs(u - v) / (abs(u) + 1) for u, v in zip(a, a_lo)),
                      max(abs(u - v) / u for u, v in zip(b2, b2_lo)))
        lost = float(mp.log(err, 2)) + low if err > 0 else 0.0
        lost = max(lost, 0.0)
        if lost > prec - 53:
            raise PrecisionExhausted(
                f"recurrence loses ~{lost:.0f} bits; raise mantissa_bits above {prec}")
    else:
        lost = float("nan")
    with mp.workprec(prec):
        b = [mp.sqrt(v) for v in b2]
        gam = [1 / mp.sqrt(v) for v in norms]
        pz = [z * g for z, g in zip(pi0, gam)]
    k = n_max + 1
    exact = {
        "a": [mp.nstr(v, ctx.digits) for v in a[:k]],
        "b": [mp.nstr(v, ctx.digits) for v in b[:k]],
        "gamma": [mp.nstr(v, ctx.digits) for v in gam[:k]],
        "p_at_zero": [mp.nstr(v, ctx.digits) for v in pz[:k]],
    }
    return RecurrenceTable(
        a=np.array([float(v) for v in a[:k]]),
        b=np.array([float(v) for v in b[:k]]),
        gamma=np.array([float(v) for v in gam[:k]]),
        p_at_zero=np.array([float(v) for v in pz[:k]]),
        n_max=n_max, exact=exact, mantissa_bits=prec, x_max=float(X),
        bits_lost=lost, weight=w.to_json())


# -- double-precision evaluation ---------------------------------------------

_BIG = 1e120


def _recur(t: RecurrenceTable, x, kmax: int, deriv: bool = False):
    """Scaled values of ``p_k`` (and ``p_k'``) at ``x`` for ``k <= kmax``.

    Returns ``(P, D, L)`` with ``p_k(x) = P[k] exp(L[k])`` and likewise ``D``.
    """
    if kmax > t.n_max:
        raise IndexError(f"k = {kmax} exceeds n_max = {t.n_max}")
    x = np.asarray(x, dtype=float)
    shape = x.shape
    x = x.ravel()
    N = x.size
    P = np.empty((kmax + 1, N))
    L = np.empty((kmax + 1, N))
    D = np.empty((kmax + 1, N)) if deriv else None
    a, b = t.a, t.b
    prev = np.zeros(N)
    cur = np.full(N, t.gamma[0])
    dprev = np.zeros(N)
    dcur = np.zeros(N)
    log = np.zeros(N)
    for k in range(kmax + 1):
        P[k] = cur
        L[k] = log
        if deriv:
            D[k] = dcur
        if k == kmax:
            break
        bm = b[k - 1] if k > 0 else 0.0
        nxt = ((x - a[k]) * cur - bm * prev) / b[k]
        if deriv:
            dnxt = ((x - a[k]) * dcur + cur - bm * dprev) / b[k]
            dprev, dcur = dcur, dnxt
        prev, cur = cur, nxt
        big = np.abs(cur) > _BIG
        if np.any(big):
            s = np.where(big, np.abs(cur), 1.0)
            cur = cur / s
            prev = prev / s
            if deriv:
                dcur = dcur / s
                dprev = dprev / s
            log = log + np.log(s)
    P = P.reshape((kmax + 1,) + shape)
    L = L.reshape((kmax + 1,) + shape)
    if deriv:
        D = D.reshape((kmax + 1,) + shape)
    return P, D, L


def _log_sqrt_w(w: Weight, x):
    with np.errstate(divide="ignore"):
        lx = np.log(x)
    if w.alpha == 0.0:
        lx = np.zeros_like(lx)
    return 0.5 * w.alpha * lx - 0.5 * eval_V(w, x)


def poly_times(t: RecurrenceTable, w: Weight, x, kmax: int, log_factor):
    """``p_k(x) * exp(log_factor(x))`` for ``k <= kmax`` without overflow."""
    P, _, L = _recur(t, x, kmax)
    return P * np.exp(L + log_factor)


def phi_matrix(t: RecurrenceTable, w: Weight, x, kmax: int) -> np.ndarray:
    """Rows ``phi_0(x), ..., phi_kmax(x)``; shape ``(kmax+1,) + x.shape``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be >= 0")
    P, _, L = _recur(t, x, kmax)
    return P * np.exp(L + _log_sqrt_w(w, x))


def phi_and_deriv(t: RecurrenceTable, w: Weight, x, kmax: int):
    """``(phi, phi')`` rows for ``k <= kmax`` at ``x > 0``.

    ``phi_k' = (p_k' + (alpha/(2x) - V'/2) p_k) sqrt(w)``, with ``p_k'`` from
    the differentiated recurrence
    ``p_k + x p_k' = b_k p_{k+1}' + a_k p_k' + b_{k-1} p_{k-1}'``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("derivative needs x > 0")
    P, D, L = _recur(t, x, kmax, deriv=True)
    s = np.exp(L + _log_sqrt_w(w, x))
    logd = 0.5 * w.alpha / x - 0.5 * eval_V_prime(w, x)
    return P * s, (D + logd * P) * s


def eval_phi(t: RecurrenceTable, w: Weight, k: int, x):
    """``phi_k(x) = p_k(x) sqrt(w(x))``."""
    if not 0 <= k <= t.n_max:
        raise IndexError(f"k = {k} outside 0..{t.n_max}")
    out = phi_matrix(t, w, x, k)[k]
    return out if np.ndim(out) else float(out)


def eval_phi_deriv(t: RecurrenceTable, w: Weight, k: int, x):
    """``phi_k'(x)`` for ``x > 0``."""
    if not 0 <= k <= t.n_max:
        raise IndexError(f"k = {k} outside 0..{t.n_max}")
    out = phi_and_deriv(t, w, x, k)[1][k]
    return out if np.ndim(out) else float(out)


def cd_kernel(t: RecurrenceTable, w: Weight, n: int, x, y):
    """``K_n(x, y) = sum_{k<n} phi_k(x) phi_k(y)`` by direct summation."""
    if not 1 <= n <= t.n_max + 1:
        raise IndexError("n outside 1..n_max+1")
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    fx = phi_matrix(t, w, x, n - 1)
    fy = phi_matrix(t, w, y, n - 1)
    out = np.sum(fx * fy, axis=0)
    return out if np.ndim(out) else float(out)


def cd_kernel_ratio(t: RecurrenceTable, w: Weight, n: int, x, y):
    """Two-term Christoffel-Darboux form, for cross-checks off the diagonal."""
    fx = phi_matrix(t, w, x, n)
    fy = phi_matrix(t, w, y, n)
    return t.b[n - 1] * (fx[n] * fy[n - 1] - fx[n - 1] * fy[n]) / (np.asarray(x) - np.asarray(y))


def eval_range(w: Weight, kmax: int, tol_log: float = 80.0) -> float:
    """Point past which ``phi_k**2 < exp(-tol_log)`` for all ``k <= kmax``."""
    eq = eqm.equilibrium(w, kmax + 1)
    y = 1.0 + 2.0 * (kmax + 1) ** (KAPPA - 2.0 / 3.0)
    while (kmax + 1) * eqm.exterior_integral(eq.h_coeffs, y) < tol_log:
        y *= 1.05
    return y * eq.beta_n


def default_grid(t: RecurrenceTable, w: Weight, kmax: int, order: int = 24,
                 refine: int = 1) -> PanelGrid:
    """Double-precision panel grid resolving ``phi_0..phi_kmax``."""
    X = min(eval_range(w, kmax), t.x_max)
    panels = refine * max(40, kmax + 8)
    return PanelGrid(X, panels, order)


def inner_product(f, g, grid: PanelGrid, e: float = 0.0) -> float:
    """``int_0^X f g dx`` on a panel grid.

    ``f`` and ``g`` are callables or arrays sampled at ``grid.rule(e)[0]``;
    ``e`` is the exponent of the product's algebraic behaviour at 0.
    """
    x, wq = grid.rule(e)
    fv = f(x) if callable(f) else np.asarray(f)
    gv = g(x) if callable(g) else np.asarray(g)
    if fv.shape[-1] != x.size or gv.shape[-1] != x.size:
        raise ValueError("integrand samples do not match the quadrature grid")
    return np.sum(fv * gv * wq, axis=-1)


def gram_matrix(t: RecurrenceTable, w: Weight, kmax: int, grid: PanelGrid | None = None):
    grid = grid or default_grid(t, w, kmax)
    x, wq = grid.rule(w.alpha)
    F = phi_matrix(t, w, x, kmax)
    return (F * wq) @ F.T


def cauchy_at_zero(t: RecurrenceTable, w: Weight, j, grid: PanelGrid | None = None):
    """``int_0^inf p_j(y) w(y) / y dy`` for one index or a sequence of indices.

    The first panel uses a Gauss-Jacobi rule with weight ``y**(alpha-1)``.
    """
    if w.alpha <= 0:
        raise ValueError("cauchy_at_zero needs alpha > 0")
    js = np.atleast_1d(j)
    kmax = int(js.max())
    grid = grid or default_grid(t, w, kmax)
    x, wq = grid.rule(w.alpha - 1.0)
    vals = poly_times(t, w, x, kmax, w.alpha * np.log(x) - eval_V(w, x) - np.log(x))
    out = (vals[js] * wq).sum(axis=1)
    if not np.all(np.isfinite(out)):
        raise ArithmeticError("quadrature for the Cauchy transform did not converge")
    return out if np.ndim(j) else float(out[0])


class Antiderivative:
    """Cumulative integrals ``F(x) = int_0^x f`` for a family of functions.

    Parameters
    ----------
    func : callable
        ``func(x)`` returns an array of shape ``(K, len(x))``.
    exponents : array_like
        ``exponents[i] = a`` means ``f_i = x**a * smooth`` near 0.
    grid : PanelGrid
    """

    def __init__(self, func, exponents, grid: PanelGrid):
        self.func = func
        self.exponents = np.asarray(exponents, dtype=float)
        self.grid = grid
        self.K = len(self.exponents)
        p = grid.order
        brk = grid.breaks
        panel_int = np.zeros((self.K, grid.panels))
        x, wq = local_rules(p, 0.0, brk[1:-1], brk[2:])
        vals = func(x.ravel()).reshape(self.K, grid.panels - 1, p)
        panel_int[:, 1:] = np.sum(vals * wq, axis=2)
        for e in np.unique(self.exponents):
            idx = np.nonzero(self.exponents == e)[0]
            x0, w0 = local_rules(p, e, [0.0], [brk[1]])
            panel_int[idx, 0] = (func(x0.ravel())[idx] * w0.ravel()).sum(axis=1)
        self.cum = np.concatenate([np.zeros((self.K, 1)), np.cumsum(panel_int, axis=1)], axis=1)
        # tails summed from the right keep relative accuracy far out
        self.rcum = np.concatenate(
            [np.cumsum(panel_int[:, ::-1], axis=1)[:, ::-1], np.zeros((self.K, 1))], axis=1)
        self.total = self.cum[:, -1]

    def __call__(self, x) -> np.ndarray:
        """``F_i(x)`` for all family members, shape ``(K, len(x))``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        g = self.grid
        xc = np.minimum(x, g.X)
        j = g.locate(xc)
        start = g.breaks[j]
        out = self.cum[:, j].copy()
        p = g.order
        inner = j > 0
        if np.any(inner):
            xs, ws = local_rules(p, 0.0, start[inner], xc[inner])
            v = self.func(xs.ravel()).reshape(self.K, -1, p)
            out[:, inner] += np.sum(v * ws, axis=2)
        first = ~inner
        if np.any(first):
            for e in np.unique(self.exponents):
                idx = np.nonzero(self.exponents == e)[0]
                xs, ws = local_rules(p, e, np.zeros(first.sum()), xc[first])
                v = self.func(xs.ravel())[idx].reshape(len(idx), -1, p)
                out[np.ix_(idx, np.nonzero(first)[0])] += np.sum(v * ws, axis=2)
        return out

    def tail(self, x) -> np.ndarray:
        """``int_x^inf f_i`` (the range is truncated at ``grid.X``)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        g = self.grid
        xc = np.minimum(x, g.X)
        j = g.locate(xc)
        end = g.breaks[j + 1]
        out = self.rcum[:, j + 1].copy()
        p = g.order
        inner = j > 0
        if np.any(inner):
            xs, ws = local_rules(p, 0.0, xc[inner], end[inner])
            v = self.func(xs.ravel()).reshape(self.K, -1, p)
            out[:, inner] += np.sum(v * ws, axis=2)
        if np.any(~inner):
            out[:, ~inner] += self.cum[:, [1]] - self(xc[~inner])
        return out

    def eps(self, x) -> np.ndarray:
        """``eps f_i(x) = F_i(x) - (1/2) int_0^inf f_i``."""
        return self(x) - 0.5 * self.total[:, None]


def antiderivative_table(t: RecurrenceTable, w: Weight, kmax: int,
                         grid: PanelGrid | None = None) -> Antiderivative:
    """Cumulative integrals of ``phi_0..phi_kmax``."""
    grid = grid or default_grid(t, w, kmax)
    return Antiderivative(lambda x: phi_matrix(t, w, x, kmax),
                          np.full(kmax + 1, 0.5 * w.alpha), grid)
