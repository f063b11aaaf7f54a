"""Laguerre-type weights ``w(x) = x**alpha * exp(-V(x))`` on the half line.

A weight is the pair ``(alpha, V)`` with ``V`` a real polynomial of degree
``m >= 1`` and positive leading coefficient.  The ensemble parameters
``(gamma, Q, beta)`` map onto a weight through :func:`from_ensemble`.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class Weight:
    """Weight ``x**alpha * exp(-V(x))``.

    Parameters
    ----------
    alpha : float
        Exponent at the hard edge.  ``alpha >= 0``; the Widom construction
        additionally needs ``alpha > 0``.
    v_coeffs : tuple of float
        Coefficients ``q_0, ..., q_m`` of ``V`` in ascending degree.
    """

    alpha: float
    v_coeffs: tuple
    m: int = field(init=False)

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.v_coeffs)
        nz = [j for j, c in enumerate(coeffs) if c != 0.0]
        if not nz or nz[-1] < 1:
            raise ValueError("V must have positive degree")
        m = nz[-1]
        coeffs = coeffs[: m + 1]
        if coeffs[m] <= 0:
            raise ValueError("leading coefficient of V must be positive")
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "v_coeffs", coeffs)
        object.__setattr__(self, "m", m)

    @property
    def q(self) -> np.ndarray:
        return np.asarray(self.v_coeffs, dtype=float)

    def to_json(self) -> str:
        return json.dumps({"alpha": self.alpha, "v_coeffs": list(self.v_coeffs)})

    @classmethod
    def from_json(cls, text: str) -> "Weight":
        d = json.loads(text)
        return cls(d["alpha"], tuple(d["v_coeffs"]))

    def describe(self) -> str:
        return f"alpha={self.alpha:g}, V={format_poly(self.v_coeffs)}"


def eval_V(w: Weight, x):
    """Evaluate ``V`` by Horner's rule (scalar or array)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for c in reversed(w.v_coeffs):
        out = out * x + c
    return out if out.ndim else float(out)


def eval_V_prime(w: Weight, x):
    """Evaluate the formal derivative ``V'``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for j in range(w.m, 0, -1):
        out = out * x + j * w.v_coeffs[j]
    return out if out.ndim else float(out)


def eval_weight(w: Weight, x):
    """Return ``x**alpha * exp(-V(x))``; zero at the origin when ``alpha > 0``.

    Raises
    ------
    ValueError
        If any ``x < 0``.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise ValueError("weight is defined on x >= 0 only")
    with np.errstate(divide="ignore"):
        if w.alpha == 0.0:
            out = np.exp(-eval_V(w, xa))
        else:
            out = np.where(xa > 0, xa ** w.alpha * np.exp(-eval_V(w, xa)), 0.0)
    return out if np.ndim(out) else float(out)


def from_ensemble(gamma: float, Q: Sequence[float], beta: int) -> Weight:
    """Map ensemble parameters to the weight used for the polynomials.

    ``beta = 2`` keeps ``(gamma, Q)``; ``beta = 1, 4`` use ``(2 gamma, 2 Q)``.
    """
    if beta not in (1, 2, 4):
        raise ValueError(f"beta must be 1, 2 or 4, got {beta}")
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    q = [float(c) for c in Q]
    if beta == 2:
        return Weight(gamma, tuple(q))
    return Weight(2.0 * gamma, tuple(2.0 * c for c in q))


_TERM = re.compile(r"^([+-]?)(\d*\.?\d*(?:e[+-]?\d+)?)\*?(x(?:\^(\d+))?)?$", re.I)


def parse_poly(text: str) -> tuple:
    """Parse the small polynomial grammar used on the command line.

    Examples: ``"x"``, ``"2x"``, ``"x^2+0.5x"``, ``"1+x^4"``.
    """
    s = text.replace(" ", "").replace("**", "^")
    if not s:
        raise ValueError("empty polynomial")
    terms = [t for t in re.split(r"(?<![eE])(?=[+-])", s) if t]
    coeffs: dict[int, float] = {}
    for t in terms:
        mt = _TERM.match(t)
        if mt is None:
            raise ValueError(f"cannot parse term {t!r} in {text!r}")
        sign, num, xpart, power = mt.groups()
        if not num and not xpart:
            raise ValueError(f"cannot parse term {t!r} in {text!r}")
        c = float(num) if num else 1.0
        if sign == "-":
            c = -c
        deg = 0 if not xpart else (int(power) if power else 1)
        coeffs[deg] = coeffs.get(deg, 0.0) + c
    out = [0.0] * (max(coeffs) + 1)
    for k, c in coeffs.items():
        out[k] = c
    return tuple(out)


def _num(c: float) -> str:
    r = repr(float(c))
    return r[:-2] if r.endswith(".0") else r


def format_poly(coeffs: Sequence[float]) -> str:
    """Inverse of :func:`parse_poly` (exact round trip)."""
    parts = []
    for j, c in enumerate(coeffs):
        if c == 0:
            continue
        mono = "" if j == 0 else ("x" if j == 1 else f"x^{j}")
        num = _num(c) if (c != 1 or j == 0) else ""
        parts.append(num + mono)
    return "+".join(parts).replace("+-", "-") or "0"
