"""Acceptance suite: one test per criterion, each recording a pass/fail line.

The lines are repeated in the ``acceptance criteria`` section of the pytest
terminal summary.
"""
import math

import numpy as np
import pytest

from lagwidom import fredholm as fr
from lagwidom import mc_oracle as mc
from lagwidom import tmtheory as tm
from lagwidom.asymptotics import comparison_table
from lagwidom.equilibrium import (check_theta_ode, equilibrium, h_limit, mrs_number,
                                  mrs_residual, normalization)
from lagwidom.limits import convergence_table
from lagwidom.orthopoly import compute_recurrence
from lagwidom.weights import Weight
from lagwidom.widom import IDENTITY_LIMITS, build, identity_residuals

IDENTITY_WEIGHTS = {1: Weight(1.0, [0, 1.0]), 2: Weight(2.0, [0, 0, 1.0]),
                    3: Weight(1.5, [0, 0.5, 0, 1.0])}


def _ratios(errs):
    errs = np.asarray(errs, dtype=float)
    return errs[:-1] / errs[1:]


def test_c01_classical_recurrence(accept):
    worst = 0.0
    for alpha in (0.0, 1.5):
        t = compute_recurrence(Weight(alpha, [0, 1.0]), 201)
        k = np.arange(201)
        ea = 2 * k + alpha + 1
        eb = np.sqrt((k + 1) * (k + 1 + alpha))
        worst = max(worst, np.abs(np.asarray(t.a[:201]) / ea - 1).max(),
                    np.abs(np.asarray(t.b[:201]) / eb - 1).max())
    ok = worst <= 1e-10
    accept(1, ok, f"laguerre recurrence k<=200 max rel err {worst:.2e} (tol 1e-10)")
    assert ok


def test_c02_mrs(accept):
    lin = 0.0
    for q0, q1 in ((0.0, 1.0), (0.3, 0.5), (-1.0, 3.0)):
        w = Weight(0.5, [q0, q1])
        for n in (1, 8, 33, 128):
            b = mrs_number(w, n)
            lin = max(lin, abs(b - 4 * n / q1) / (4 * n / q1))
    res = 0.0
    for w in (Weight(1.0, [0, 0, 1.0]), Weight(2.0, [0, 1.0, 0.5]),
              Weight(1.5, [0, 0.5, 0, 1.0]), Weight(0.0, [1.0, 0, 0.2, 0.1])):
        for n in range(8, 129):
            res = max(res, abs(mrs_residual(w, n, mrs_number(w, n))))
    ok = lin <= 1e-12 and res < 1e-10
    accept(2, ok, f"m=1 closed form rel err {lin:.1e}; m=2,3 residual {res:.1e}")
    assert ok


def test_c03_equilibrium(accept):
    norm = 0.0
    for w in list(IDENTITY_WEIGHTS.values()) + [Weight(0.0, [2.0, 0.3, 1.0])]:
        for n in (8, 16, 24, 32, 64, 128):
            norm = max(norm, abs(normalization(equilibrium(w, n).h_coeffs) / (2 * math.pi) - 1))
    # lower-order terms of V make h_n differ from its limit at finite n
    grid = np.linspace(0, 1, 201)
    devs = {}
    for m, w in ((1, Weight(1.0, [0.5, 2.0])), (2, Weight(2.0, [0, 1.0, 1.0])),
                 (3, Weight(1.5, [0, 0.5, 0, 1.0]))):
        devs[m] = [np.abs(np.polyval(equilibrium(w, n).h_coeffs[::-1], grid)
                          - np.polyval(h_limit(m)[::-1], grid)).max() for n in (16, 32, 64)]
    # h_n is identically 4 for m = 1
    dev_ok = max(devs[1]) < 1e-12 and all(bool(np.all(np.diff(devs[m]) < 0)) for m in (2, 3))
    ok = norm <= 1e-9 and dev_ok
    accept(3, ok, f"normalization rel err {norm:.1e}; max|h_n-h| m=2 "
                  + " ".join(f"{d:.2e}" for d in devs[2]) + "; m=3 " + " ".join(f"{d:.2e}" for d in devs[3]))
    assert ok


def test_c04_identity_suite(accept):
    worst = {k: 0.0 for k in IDENTITY_LIMITS}
    for m, w in IDENTITY_WEIGHTS.items():
        t = compute_recurrence(w, 24 + m + 2)
        for n in (8, 12, 16, 24):
            for k, v in identity_residuals(build(w, n, t=t)).items():
                worst[k] = max(worst[k], v)
    ok = all(worst[k] <= IDENTITY_LIMITS[k] for k in worst)
    accept(4, ok, "worst " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))
    assert ok


def test_c05_tm_theory(accept):
    fails = []
    min_det = min(abs(tm.verify_tm_invertible(m)[0]) for m in range(1, 33))
    if min_det <= 1e-8:
        fails.append("det")
    for m in range(2, 33):
        fails += [f"integral/{b.name}" for b in tm.verify_integral_bounds(m, qmax=200) if not b.ok]
    qh = 0.0
    for m in range(2, 65):
        fails += [f"qhat/{b.name}" for b in tm.verify_qhat_bounds(m) if not b.ok]
        lhs, rhs = tm.qhat_norm_identity(m)
        qh = max(qh, abs(lhs - rhs) / abs(rhs))
    if qh > 1e-12:
        fails.append("qhat")
    aya = max(abs(tm.aYa_identity(m) - m / 2) for m in range(1, 51))
    if aya > 1e-12:
        fails.append("aYa")
    ok = not fails
    accept(5, ok, f"min|det T_m| {min_det:.2e}, Qhat rel {qh:.1e}, aYa err {aya:.1e}"
                  + (f" failures {fails[:4]}" if fails else ""))
    assert ok


def test_c06_b12_asymptotics(accept):
    X = tm.build_tm(2).X
    w = Weight(2.0, [0, 0, 1.0])
    t = compute_recurrence(w, 48 + 4)
    errs = []
    for n in (24, 48):
        S = build(w, n, t=t)
        errs.append(np.abs(n / S.eq.beta_n * np.asarray(S.matrices()["B12"]) - X).max())
    r = errs[0] / errs[1]
    ok = r >= 1.4
    accept(6, ok, f"|(n/beta_n)B12 - X| {errs[0]:.3e} -> {errs[1]:.3e}, ratio {r:.2f} (>= 1.4)")
    assert ok


BETA2_CASES = [(1, 1.0), (2, 2.0)]


@pytest.mark.parametrize("number,regime,lo,hi", [
    (7, "hard", 1.5, 3.0), (8, "soft", 1.15, math.inf), (9, "bulk", 1.5, 3.0)])
def test_c07_c09_beta2_universality(number, regime, lo, hi, accept):
    parts, ok = [], True
    for m, alpha in BETA2_CASES:
        E = convergence_table(Weight(alpha, [0] * m + [1.0]), regime, 2, [20, 40, 80])[:, 0]
        r = _ratios(E)
        ok &= bool(np.all((r >= lo) & (r <= hi)))
        parts.append(f"(m,a)=({m},{alpha:g}) ratios {r[0]:.2f},{r[1]:.2f}")
    accept(number, ok, f"{regime}: " + "; ".join(parts))
    assert ok


def test_c10_matrix_kernels(accept):
    ok, parts = True, []
    worst_eps = 0.0
    for w in (Weight(2.0, [0, 0, 2.0]), Weight(1.0, [0, 1.0])):
        for beta in (1, 4):
            for regime in ("hard", "soft", "bulk"):
                E = convergence_table(w, regime, beta, [16, 32, 64])
                dec = bool(np.all(E[1:] < E[:-1]))
                ok &= dec
                if not dec:
                    parts.append(f"{w.describe()} beta={beta} {regime} not monotone")
        t = compute_recurrence(w, 64 + w.m + 2)
        for n in (16, 32, 64):
            S = build(w, n, t=t)
            y = S.eq.beta_n * np.linspace(0.01, 1.2, 25)
            worst_eps = max(worst_eps, float(np.abs(S.epsS1(y, y)).max()))
    ok &= worst_eps <= 1e-8
    accept(10, ok, f"12 entry sequences per weight monotone={not parts}; max|epsS1(y,y)| {worst_eps:.1e}"
                   + ("; " + "; ".join(parts) if parts else ""))
    assert ok


def test_c11_fredholm_hard_edge(accept):
    src = fr.LimitSource(0.0)
    err, conv = 0.0, 0.0
    for s in (1.0, 4.0, 8.0):
        v, c = fr.self_convergence(
            lambda N: fr.gap_probability(2, src, "hard", (0.0, s), N), order=40)
        err = max(err, abs(v - math.exp(-s / 4)))
        conv = max(conv, c)
    # the other reported determinants
    for beta in (1, 4):
        for s in (1.0, 4.0):
            conv = max(conv, fr.self_convergence(lambda N: fr.smallest_eig_cdf(beta, fr.LimitSource(2.0), s, N))[1])
    for beta in (1, 2, 4):
        conv = max(conv, fr.self_convergence(lambda N: fr.largest_eig_cdf(beta, src, -2.0, N))[1])
        conv = max(conv, fr.self_convergence(lambda N: fr.bulk_gap(beta, src, 1.0, N))[1])
    ok = err < 1e-8 and conv < 1e-7
    accept(11, ok, f"|det - e^(-s/4)| {err:.1e} (tol 1e-8); max self-convergence {conv:.1e} (tol 1e-7)")
    assert ok


def test_c12_cross_oracle(accept):
    n = 16
    F = fr.FiniteSource(Weight(0.0, [0, 1.0]), n)
    xis = np.array([0.32, 1.28, 2.56, 5.12, 9.6])
    xs = np.array([F.scalings().hard(x) for x in xis])
    fred = np.array([fr.smallest_eig_cdf(2, F, x) for x in xis])
    exact = 1 - np.exp(-n * xs)
    err = np.abs(fred - exact).max()
    cfg = mc.SamplerConfig(n, 2, 0.0, seed=20240611, n_samples=10_000)
    p, se = mc.empirical_extreme_cdf(cfg, "smallest", xs)
    z = np.abs(p - fred) / se
    ok = err < 1e-6 and bool(np.all(z < 3))
    accept(12, ok, f"|Fredholm - (1-e^(-ns))| {err:.1e} (tol 1e-6); MC |z| max {z.max():.2f} (< 3)")
    assert ok


def test_c13_asymptotic_evaluators(accept):
    ns = [16, 32, 64]
    ok, parts = True, []
    for m, alpha in ((1, 1.0), (2, 2.5)):
        rows = comparison_table(Weight(alpha, [0] * m + [1.0]), ns, points=41)
        for fn in ("phi", "psi1", "psi2"):
            for reg in ("bessel", "bulk", "airy", "exponential"):
                e = [max(r[6] for r in rows if r[0] == fn and r[1] == reg and r[2] == n) for n in ns]
                if not (e[1] < e[0] and e[2] < e[1]):
                    ok = False
                    parts.append(f"m={m} {fn} {reg} {e}")
    accept(13, ok, "24 (m, function, region) sequences decreasing" if ok else "; ".join(parts))
    assert ok


def test_c14_theta_ode(accept):
    grid = np.linspace(0, 1, 202)[1:-1]
    res = max(check_theta_ode(m, grid) for m in (1, 2, 3))
    ok = res < 1e-8
    accept(14, ok, f"max residual {res:.1e} on 200 interior points (tol 1e-8)")
    assert ok
