"""Leading-order asymptotics of the rescaled functions on the positive axis.

Functions are rescaled to the MRS interval,

    phi_hat(x) = sqrt(beta_n) phi_n(beta_n x),
    psi_hat_r(x) = sqrt(beta_n) psi_r(beta_n x),

and ``(0, inf)`` is split into a Bessel region near the hard edge, a bulk
region, an Airy region around the soft edge and an exponential region
beyond it.  Each evaluator returns the leading term only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equilibrium import (EquilibriumData, density_primitive, density_tail, equilibrium,
                          exterior_integral, phase_F, phase_G)
from .limits import special_airy, special_bessel
from .weights import Weight

REGIONS = ("bessel", "bulk", "airy", "exponential")


class RegionError(ValueError):
    """A point was passed to the evaluator of a region it does not lie in."""


@dataclass(frozen=True)
class RegionConfig:
    """Region boundaries for a given ``n``; the Airy half-width is ``n**(kappa - 2/3)``."""

    n: float
    kappa: float = 1.0 / 12.0

    @property
    def airy_halfwidth(self) -> float:
        return self.n ** (self.kappa - 2.0 / 3.0)

    @property
    def boundaries(self) -> tuple:
        d = self.airy_halfwidth
        return (0.0, 1.0 / self.n, 1.0 - d, 1.0 + d, math.inf)

    def interval(self, region: str) -> tuple:
        k = REGIONS.index(region)
        b = self.boundaries
        return b[k], b[k + 1]

    def interior(self, region: str, margin: float = 0.2, upper: float | None = None) -> tuple:
        """Inner part of a region, ``margin`` of its length trimmed at each end.

        The exponential region is unbounded; ``upper`` (default: lower end
        plus three Airy half-widths) closes it.
        """
        a, b = self.interval(region)
        if math.isinf(b):
            b = upper if upper is not None else a + 3.0 * self.airy_halfwidth
        d = margin * (b - a)
        return a + d, b - d


def region_of(n: float, x: float, kappa: float = 1.0 / 12.0) -> str:
    """Name of the region containing ``x`` (points on a boundary go left)."""
    if x <= 0:
        raise ValueError("x must be positive")
    b = RegionConfig(n, kappa).boundaries
    for k, name in enumerate(REGIONS):
        if x <= b[k + 1]:
            return name
    return REGIONS[-1]


def _check_region(region, n, x):
    if region not in REGIONS:
        raise ValueError(f"unknown region {region!r}")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa <= 0):
        raise ValueError("x must be positive")
    a, b = RegionConfig(n).interval(region)
    # boundary points belong to the left region but the closed interval is accepted
    tol = 1e-12
    if np.any((xa < a - tol) | (xa > b + tol)):
        raise RegionError(f"x outside the {region} region [{a:.4g}, {b:.4g}]")
    return xa


def _out(v, x):
    return float(v[0]) if np.ndim(x) == 0 else v


def f_tilde(eq: EquilibriumData, x):
    """Hard-edge map: ``-f~_n(x) = ((n/4) int_0^x sqrt((1-s)/s) h_n)**2`` on ``(0, 1]``."""
    xa = np.asarray(x, dtype=float)
    if np.any((xa < 0) | (xa > 1)):
        raise ValueError("f_tilde is defined on [0, 1]")
    return -(0.25 * eq.n * np.asarray(density_primitive(eq.h_coeffs, xa))) ** 2


def f_soft(eq: EquilibriumData, x):
    """Soft-edge map ``f_n``, negative on ``(0, 1)`` and positive beyond 1."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa <= 0):
        raise ValueError("f_n is defined for x > 0")
    out = np.zeros_like(xa)
    lo, hi = xa < 1, xa > 1
    if lo.any():
        out[lo] = -(0.75 * eq.n * density_tail(eq.h_coeffs, xa[lo])) ** (2.0 / 3.0)
    if hi.any():
        out[hi] = (0.75 * eq.n * exterior_integral(eq.h_coeffs, xa[hi])) ** (2.0 / 3.0)
    return _out(out, x)


def f_maps(eq: EquilibriumData, x) -> tuple:
    """``(f~_n(x), f_n(x))``; the first entry is ``nan`` for ``x > 1``."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    ft = np.full_like(xa, np.nan)
    inside = xa <= 1
    ft[inside] = f_tilde(eq, xa[inside])
    return _out(ft, x), f_soft(eq, x)


def _eta_pair(alpha, shift, x):
    """``cos eta`` and ``sin eta / sqrt(1 - x)`` on both sides of ``x = 1``.

    ``eta = (alpha + shift)/2 * arccos(2x - 1)``; for ``x > 1`` the analytic
    continuation through the conformal map is used.
    """
    a = 0.5 * (alpha + shift)
    c = np.empty_like(x)
    s = np.empty_like(x)
    lo = x < 1
    th = np.arccos(np.clip(2 * x[lo] - 1, -1, 1))
    c[lo] = np.cos(a * th)
    r = np.sqrt(1 - x[lo])
    with np.errstate(divide="ignore", invalid="ignore"):
        s[lo] = np.where(r > 0, np.sin(a * th) / np.where(r > 0, r, 1), 2 * a)
    hi = ~lo
    t = np.arccosh(np.maximum(2 * x[hi] - 1, 1.0))  # log phi(x)
    c[hi] = np.cosh(a * t)
    r = np.sqrt(x[hi] - 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        s[hi] = np.where(r > 0, np.sinh(a * t) / np.where(r > 0, r, 1), 2 * a)
    return c, s


def _airy_ratio(eq, x, f):
    """``|f_n(x)/(x - 1)|``, with its limit ``c_n n^(2/3)`` at ``x = 1``."""
    d = x - 1
    safe = np.abs(d) > 1e-14
    return np.where(safe, np.abs(f / np.where(safe, d, 1)), eq.c_n * eq.n ** (2.0 / 3.0))


def _conformal_log(x):
    return np.arccosh(np.maximum(2 * x - 1, 1.0))


def phi_hat_leading(region: str, w: Weight, eq: EquilibriumData, n: int, x):
    """Leading term of ``phi_hat`` in ``region``.

    All ``1 + O(1/n)`` factors are set to 1.

    Raises
    ------
    RegionError
        If ``x`` lies outside ``region``.
    """
    xa = _check_region(region, n, x)
    a = w.alpha
    if region == "bessel":
        u = np.sqrt(-np.asarray(f_tilde(eq, xa)))
        th = np.arccos(np.clip(2 * xa - 1, -1, 1))
        zeta = 0.5 * (a + 1) * th - 0.5 * math.pi * a
        J, dJ = special_bessel(a, 2 * u)
        v = ((-1) ** n * math.sqrt(2) * np.sqrt(u) / (xa * (1 - xa)) ** 0.25
             * (np.sin(zeta) * J + np.cos(zeta) * dJ))
    elif region == "bulk":
        v = math.sqrt(2 / math.pi) * np.cos(phase_F(eq, 1, xa)) / (xa * (1 - xa)) ** 0.25
    elif region == "airy":
        f = np.atleast_1d(f_soft(eq, xa))
        q = _airy_ratio(eq, xa, f)
        c, s = _eta_pair(a, 1.0, xa)
        Ai, dAi = special_airy(f)
        v = math.sqrt(2) / xa ** 0.25 * (c * q ** 0.25 * Ai - s * q ** -0.25 * dAi)
    else:
        expo = 0.5 * eq.n * exterior_integral(eq.h_coeffs, xa)
        v = (np.exp(0.5 * (a + 1) * _conformal_log(xa) - expo)
             / (math.sqrt(2 * math.pi) * (xa * (xa - 1)) ** 0.25))
    return _out(np.asarray(v, dtype=float), x)


def phi_hat_airy_simple(eq: EquilibriumData, n: int, x):
    """``sqrt(2) c_n^(1/4) n^(1/6) Ai(c_n n^(2/3) (x - 1))``."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    Ai, _ = special_airy(eq.c_n * n ** (2.0 / 3.0) * (xa - 1))
    return _out(math.sqrt(2) * eq.c_n ** 0.25 * n ** (1.0 / 6.0) * Ai, x)


def _psi_combine(w, eq, n, v1, v2):
    """Map the pair ``(v1, v2)`` of region functions to ``(psi_hat_1, psi_hat_2)``."""
    a = w.alpha
    s = (eq.tilde_c_n * n * n) ** 0.25
    w1 = ((1 - a) * v1 - 1j * (a + 1) * v2) / s
    w2 = (v1 + 1j * v2) * s
    return (-0.25 * a * w1 + 0.5 * w2).real, (0.25 * a * w1 + 0.5 * w2).real


def _psi_full(w, eq, n, region, x):
    a = w.alpha
    sign = (-1) ** n
    if region == "bessel":
        u = np.sqrt(-np.asarray(f_tilde(eq, x)))
        th = np.arccos(np.clip(2 * x - 1, -1, 1))
        J, dJ = special_bessel(a, 2 * u)
        z1 = 0.5 * (a + 1) * th - 0.5 * math.pi * a
        z2 = 0.5 * (a - 1) * th - 0.5 * math.pi * a
        v1 = np.sin(z1) * J + np.cos(z1) * dJ
        v2 = -1j * (np.sin(z2) * J + np.cos(z2) * dJ)
        pref = np.sqrt(u) / (math.sqrt(n) * x ** 1.25 * (1 - x) ** 0.25)
    elif region == "bulk":
        v1 = np.cos(phase_F(eq, 1, x))
        v2 = -1j * np.cos(phase_F(eq, 2, x))
        pref = sign / (math.sqrt(math.pi * n) * x ** 1.25 * (1 - x) ** 0.25)
    else:
        # the Airy representation is used on both sides of the soft edge
        f = np.atleast_1d(f_soft(eq, x))
        q = _airy_ratio(eq, x, f)
        Ai, dAi = special_airy(f)
        c1, s1 = _eta_pair(a, 1.0, x)
        c2, s2 = _eta_pair(a, -1.0, x)
        v1 = c1 * q ** 0.25 * Ai - s1 * q ** -0.25 * dAi
        v2 = -1j * (c2 * q ** 0.25 * Ai - s2 * q ** -0.25 * dAi)
        pref = sign / (math.sqrt(n) * x ** 1.25)
    p1, p2 = _psi_combine(w, eq, n, v1, v2)
    return pref * p1, pref * p2


def psi_hat_leading(r: int, region: str, w: Weight, eq: EquilibriumData, n: int, x,
                    form: str = "full"):
    """Leading term of ``psi_hat_r`` in ``region``.

    Parameters
    ----------
    form : {"full", "one-term"}
        ``"full"`` keeps the region functions (Bessel functions of the hard-edge
        map, Airy functions of ``f_n`` and both phases) and drops only the
        ``I + O(.)`` correction matrix; beyond the soft edge the Airy-region
        representation is kept.  ``"one-term"`` further replaces them by
        their simplest one-term forms; in the exponential region that form is
        the decaying term obtained from the Airy representation, not 0.
    """
    if r not in (1, 2):
        raise ValueError("r must be 1 or 2")
    if n % 2:
        raise ValueError("n must be even")
    if form not in ("full", "one-term"):
        raise ValueError(f"unknown form {form!r}")
    xa = _check_region(region, n, x)
    if form == "full":
        return _out(_psi_full(w, eq, n, region, xa)[r - 1], x)
    a = w.alpha
    ct = eq.tilde_c_n
    if region == "bessel":
        z = 2 * math.sqrt(ct) * n * np.sqrt(xa)
        J1, _ = special_bessel(a + 1, z)
        v = -math.sqrt(ct * n) * J1 / np.sqrt(xa)
        if r == 2:
            J0, _ = special_bessel(a, z)
            v = v + a * J0 / (math.sqrt(n) * xa)
    elif region == "bulk":
        v = (-1) ** n * ct ** 0.25 * np.cos(phase_G(eq, xa)) / (math.sqrt(math.pi) * xa ** 0.75 * (1 - xa) ** 0.25)
    elif region == "airy":
        Ai, _ = special_airy(eq.c_n * n ** (2.0 / 3.0) * (xa - 1))
        v = (-1) ** n * (eq.c_n * ct) ** 0.25 * n ** (1.0 / 6.0) * Ai
    else:
        expo = 0.5 * eq.n * exterior_integral(eq.h_coeffs, xa)
        v = ((-1) ** n * ct ** 0.25 * np.exp(0.5 * a * _conformal_log(xa) - expo)
             / (2 * math.sqrt(math.pi) * xa ** 0.75 * (xa - 1) ** 0.25))
    return _out(np.asarray(v, dtype=float), x)


def comparison_table(w: Weight, ns, points: int = 21, form: str = "full") -> list:
    """Rows ``(function, region, n, x, exact, leading, rel_err)`` on region interiors.

    ``rel_err`` is the deviation divided by the largest exact value in the
    region interior, so that zeros of the oscillating functions do not blow
    it up.
    """
    from .orthopoly import compute_recurrence, eval_phi
    from .widom import build
    t = compute_recurrence(w, max(ns) + w.m + 2)
    rows = []
    for n in ns:
        eq = equilibrium(w, n)
        S = build(w, n, t=t, eq=eq)
        cfg = RegionConfig(n)
        rb = math.sqrt(eq.beta_n)
        for reg in REGIONS:
            lo, hi = cfg.interior(reg)
            x = np.linspace(lo, hi, points)
            funcs = [("phi", rb * eval_phi(t, w, n, eq.beta_n * x), phi_hat_leading(reg, w, eq, n, x))]
            for r, f in ((1, S.psi1), (2, S.psi2)):
                funcs.append((f"psi{r}", rb * f(eq.beta_n * x), psi_hat_leading(r, reg, w, eq, n, x, form=form)))
            for name, ex, ld in funcs:
                scale = np.abs(ex).max()
                for xi, e, l in zip(x, ex, ld):
                    rows.append([name, reg, n, xi, e, l, abs(e - l) / scale])
    return rows
