"""Command-line drivers.

Every subcommand writes a CSV (to ``--out`` or stdout) whose first line is
``# manifest-sha256: <hash>`` followed by a header row.  With ``--out`` the
full manifest is also written as JSON next to it, and ``--plot`` writes an
SVG of the main error column against ``n`` on log-log axes.

Exit codes: 0 success, 1 usage error, 2 failed verification.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .weights import Weight, parse_poly

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# ------------------------------------------------------------------ parsing

def parse_list(text: str, kind=float) -> list:
    """``"16,32,64"`` or an integer range ``"1..32"``."""
    text = text.strip()
    if ".." in text and kind is int:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    try:
        return [kind(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse list {text!r}") from exc


def _weight(args) -> Weight:
    try:
        return Weight(args.alpha, parse_poly(args.V))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# ------------------------------------------------------------------ output

def manifest_of(args) -> dict:
    d = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "plot", "manifest")}
    d["version"] = __version__
    return d


def manifest_hash(manifest: dict) -> str:
    return hashlib.sha256(json.dumps(manifest, sort_keys=True, default=str).encode()).hexdigest()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return str(v)


def write_csv(args, header: list, rows: list) -> str:
    man = manifest_of(args)
    buf = io.StringIO()
    buf.write(f"# manifest-sha256: {manifest_hash(man)}\n")
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow([_fmt(v) for v in r])
    text = buf.getvalue()
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
        mpath = args.manifest or str(Path(args.out).with_suffix(".manifest.json"))
        Path(mpath).write_text(json.dumps(man, sort_keys=True, indent=2, default=str) + "\n")
    else:
        sys.stdout.write(text)
    return text


def write_plot(path: str, series: dict, xlabel: str = "n", ylabel: str = "error"):
    """Log-log line plot of ``{label: (x, y)}`` as SVG."""
    try:
        import matplotlib
    except ImportError as exc:
        raise UsageError("--plot needs matplotlib (pip install lagwidom[plot])") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    plt.rcParams["svg.hashsalt"] = "lagwidom"
    fig, ax = plt.subplots(figsize=(5, 4))
    for label, (x, y) in series.items():
        ax.loglog(x, y, marker="o", label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


# ------------------------------------------------------------------ commands

def cmd_recurrence(args) -> int:
    from .orthopoly import compute_recurrence
    w = _weight(args)
    t = compute_recurrence(w, args.kmax)
    rows, ok = [], True
    for k in range(args.kmax + 1):
        row = [k, t.a[k], t.b[k], t.p_at_zero[k]]
        if args.verify:
            if w.v_coeffs != (0.0, 1.0):
                raise UsageError("--verify needs V = x")
            ea = 2 * k + w.alpha + 1
            eb = math.sqrt((k + 1) * (k + 1 + w.alpha))
            err = max(abs(t.a[k] - ea) / ea, abs(t.b[k] - eb) / eb)
            ok &= err <= 1e-10
            row.append(err)
        rows.append(row)
    header = ["k", "a_k", "b_k", "p_k(0)"] + (["rel_err"] if args.verify else [])
    write_csv(args, header, rows)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_equilibrium(args) -> int:
    from .equilibrium import equilibrium, mrs_residual, normalization
    w = _weight(args)
    rows = []
    for n in parse_list(args.n, int):
        eq = equilibrium(w, n)
        rows.append([n, eq.beta_n, eq.c_n, eq.tilde_c_n, mrs_residual(w, n, eq.beta_n),
                     abs(normalization(eq.h_coeffs) / (2 * math.pi) - 1),
                     " ".join(repr(float(c)) for c in eq.h_coeffs)])
    write_csv(args, ["n", "beta_n", "c_n", "tilde_c_n", "mrs_residual", "norm_err", "h_coeffs"], rows)
    return EXIT_OK


def cmd_widom(args) -> int:
    from .widom import IDENTITY_LIMITS, build, identity_residuals
    w = _weight(args)
    rows, ok, dumps = [], True, {}
    for n in parse_list(args.n, int):
        s = build(w, n, check=False)
        res = identity_residuals(s)
        good = all(res[k] <= IDENTITY_LIMITS[k] for k in res)
        ok &= good
        rows.append([n] + [res[k] for k in IDENTITY_LIMITS] + [good])
        if args.dump_widom:
            dumps[str(n)] = {"meta": s.metadata(),
                             **{k: np.asarray(v).tolist() for k, v in s.matrices().items()}}
    write_csv(args, ["n"] + list(IDENTITY_LIMITS) + ["ok"], rows)
    if args.dump_widom:
        Path(args.dump_widom).write_text(json.dumps(dumps, indent=1, default=float) + "\n")
    return EXIT_OK if (ok or not args.verify) else EXIT_FAIL


def cmd_kernel(args) -> int:
    from . import limits
    w = _weight(args)
    xi = np.array(parse_list(args.xi))
    eta = np.array(parse_list(args.eta))
    X, Y = np.meshgrid(xi, eta, indexing="ij")
    X, Y = X.ravel(), Y.ravel()
    n = args.n
    K = np.asarray(limits.finite_kernel(w, n, args.regime, args.beta, args.x_bulk)(X, Y))
    if args.beta == 2:
        L = np.asarray(limits.limit_scalar_kernel(args.regime, X, Y, w.alpha))
        rows = [[x, y, k, l] for x, y, k, l in zip(X, Y, K, L)]
        header = ["xi", "eta", "finite", "limit"]
    else:
        L = np.asarray(limits.limit_matrix_kernel(args.regime, args.beta, X, Y, w.alpha))
        rows = [[x, y, *K[i].ravel(), *L[i].ravel()] for i, (x, y) in enumerate(zip(X, Y))]
        header = ["xi", "eta"] + [f"finite_{e}" for e in ("11", "12", "21", "22")] \
            + [f"limit_{e}" for e in ("11", "12", "21", "22")]
    write_csv(args, header, rows)
    return EXIT_OK


def cmd_converge(args) -> int:
    w = _weight(args)
    ns = parse_list(args.n, int)
    xb = parse_list(args.x_bulk) if args.x_bulk else None
    from .limits import convergence_table
    E = convergence_table(w, args.regime, args.beta, ns, xb)
    cols = ["err"] if args.beta == 2 else ["err11", "err12", "err21", "err22"]
    rows = [[n, *E[i]] for i, n in enumerate(ns)]
    ratios = E[:-1] / E[1:]
    write_csv(args, ["n"] + cols, rows)
    if args.plot:
        write_plot(args.plot, {c: (ns, E[:, j]) for j, c in enumerate(cols)})
    ok = bool(np.all(ratios > 1.0))
    return EXIT_OK if (ok or not args.verify) else EXIT_FAIL


def _source(args):
    from .fredholm import FiniteSource, LimitSource
    if args.limit:
        return LimitSource(args.alpha)
    if args.n is None:
        raise UsageError("give --n or --limit")
    return FiniteSource(_weight(args), int(args.n))


def cmd_gap(args) -> int:
    from . import fredholm as fr
    src = _source(args)
    rows = []
    for s in parse_list(args.s):
        if args.regime == "hard":
            f = lambda N: fr.gap_probability(args.beta, src, "hard", (0.0, s), N,
                                             weighting=fr._hard_weighting(args.beta, src))
        elif args.regime == "soft":
            f = lambda N: fr.gap_probability(args.beta, src, "soft", (s, max(s, fr.SOFT_RIGHT)), N)
        else:
            f = lambda N: fr.bulk_gap(args.beta, src, s, N, x_bulk=args.x_bulk)
        E, err = fr.self_convergence(f, args.order)
        rows.append([s, 1.0 - E, E, args.order, err])
    write_csv(args, ["s", "probability", "gap", "N", "self_conv_err"], rows)
    return EXIT_OK


def cmd_extreme_cdf(args) -> int:
    from . import fredholm as fr
    src = _source(args)
    fn = fr.smallest_eig_cdf if args.which == "smallest" else fr.largest_eig_cdf
    rows = []
    for s in parse_list(args.s):
        v, err = fr.self_convergence(lambda N: fn(args.beta, src, s, N), args.order)
        rows.append([s, v, args.order, err])
    write_csv(args, ["s", "probability", "N", "self_conv_err"], rows)
    return EXIT_OK


def cmd_tm_verify(args) -> int:
    from . import tmtheory as tm
    rows, ok = [], True
    for m in parse_list(args.m, int):
        det, cond = tm.verify_tm_invertible(m)
        checks = [("det_T", abs(det), 1e-8, abs(det) > 1e-8)]
        if m >= 2:
            if m <= 32:
                checks += [(b.name, b.value, b.bound, b.ok) for b in tm.verify_integral_bounds(m)]
            checks += [(b.name, b.value, b.bound, b.ok) for b in tm.verify_qhat_bounds(m)]
        if m <= 50:
            e = abs(tm.aYa_identity(m) - m / 2) / (m / 2)
            checks.append(("aYa", e, 1e-12, e <= 1e-12))
        for name, val, bound, good in checks:
            ok &= bool(good)
            rows.append([m, name, val, bound, good])
    write_csv(args, ["m", "check", "value", "bound", "ok"], rows)
    print(f"tm-verify: {'all pass' if ok else 'FAILURES'}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_asympt_compare(args) -> int:
    w = _weight(args)
    ns = parse_list(args.n, int)
    from .asymptotics import comparison_table
    rows = comparison_table(w, ns, args.points, args.form)
    write_csv(args, ["function", "region", "n", "x", "exact", "leading", "rel_err"], rows)
    if args.plot:
        series = {}
        for fn in ("phi", "psi1", "psi2"):
            for reg in ("bessel", "bulk", "airy", "exponential"):
                e = [max(r[6] for r in rows if r[0] == fn and r[1] == reg and r[2] == n) for n in ns]
                series[f"{fn} {reg}"] = (ns, e)
        write_plot(args.plot, series)
    return EXIT_OK


def cmd_sample(args) -> int:
    from . import mc_oracle as mc
    cfg = mc.config_for(args.gamma, args.q, args.beta, args.n, args.seed, args.samples)
    lam = mc.sample_batches(cfg)
    if args.what == "density":
        edges = np.linspace(0.0, float(lam.max()), args.bins + 1)
        d = mc.empirical_density(cfg, edges, samples=lam)
        rows = [[edges[i], edges[i + 1], d[i]] for i in range(args.bins)]
        header = ["left", "right", "density"]
    else:
        rows = [[i, lam[i, 0], lam[i, -1]] for i in range(len(lam))]
        header = ["sample", "smallest", "largest"]
    write_csv(args, header, rows)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def _weight_args(p, alpha_default=1.0):
    p.add_argument("--alpha", type=float, default=alpha_default, help="exponent of x in the weight")
    p.add_argument("--V", default="x", help='potential, e.g. "x", "2x^2", "x^2+0.5x"')


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lagwidom", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help_):
        q = sub.add_parser(name, help=help_)
        q.set_defaults(func=func)
        q.add_argument("--out", help="CSV path (default: stdout)")
        q.add_argument("--manifest", help="manifest JSON path (default: next to --out)")
        return q

    q = add("recurrence", cmd_recurrence, "recurrence coefficients")
    _weight_args(q, 0.0)
    q.add_argument("--kmax", type=int, default=50)
    q.add_argument("--verify", action="store_true", help="compare with the classical Laguerre values")

    q = add("equilibrium", cmd_equilibrium, "MRS numbers and equilibrium data")
    _weight_args(q)
    q.add_argument("--n", default="16,32,64")

    q = add("widom", cmd_widom, "Widom system and identity suite")
    _weight_args(q)
    q.add_argument("--n", default="8,12,16,24")
    q.add_argument("--dump-widom", help="write the matrices as JSON")
    q.add_argument("--verify", action="store_true")

    for name, func, h in (("kernel", cmd_kernel, "finite-n and limit kernels on a grid"),
                          ("converge", cmd_converge, "finite-n to limit convergence table")):
        q = add(name, func, h)
        _weight_args(q)
        q.add_argument("--regime", choices=["hard", "soft", "bulk"], required=True)
        q.add_argument("--beta", type=int, choices=[1, 2, 4], default=2)
        if name == "kernel":
            q.add_argument("--n", type=int, default=32)
            q.add_argument("--xi", default="1,2,4")
            q.add_argument("--eta", default="1,2,4")
            q.add_argument("--x-bulk", type=float, default=0.5)
        else:
            q.add_argument("--n", default="16,32,64")
            q.add_argument("--x-bulk", default=None, help="bulk points (default 0.3,0.5,0.7)")
            q.add_argument("--plot", help="SVG path")
            q.add_argument("--verify", action="store_true", help="fail unless errors strictly decrease")

    for name, func, h in (("gap", cmd_gap, "gap probabilities"),
                          ("extreme-cdf", cmd_extreme_cdf, "smallest/largest eigenvalue CDF")):
        q = add(name, func, h)
        _weight_args(q, 0.0)
        q.add_argument("--beta", type=int, choices=[1, 2, 4], default=2)
        q.add_argument("--n", type=int, default=None)
        q.add_argument("--limit", action="store_true", help="use the limiting kernels")
        q.add_argument("--s", default="1,4,8", help="comma list; use --s=-2,0 for negatives")
        q.add_argument("--order", type=int, default=40)
        if name == "gap":
            q.add_argument("--regime", choices=["hard", "soft", "bulk"], required=True)
            q.add_argument("--x-bulk", type=float, default=0.5)
        else:
            q.add_argument("--which", choices=["smallest", "largest"], default="smallest")

    q = add("tm-verify", cmd_tm_verify, "invertibility of T_m and the supporting bounds")
    q.add_argument("--m", default="1..32")

    q = add("asympt-compare", cmd_asympt_compare, "leading-order asymptotics against exact values")
    _weight_args(q)
    q.add_argument("--n", default="16,32,64")
    q.add_argument("--points", type=int, default=21)
    q.add_argument("--form", choices=["full", "one-term"], default="full")
    q.add_argument("--plot", help="SVG path")

    q = add("sample", cmd_sample, "Monte Carlo eigenvalues of the linear-V ensemble")
    q.add_argument("--beta", type=int, choices=[1, 2, 4], default=2)
    q.add_argument("--gamma", type=float, default=0.0)
    q.add_argument("--q", type=float, default=1.0, help="Q(x) = q x")
    q.add_argument("--n", type=int, default=16)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--samples", type=int, default=10_000)
    q.add_argument("--what", choices=["extremes", "density"], default="extremes")
    q.add_argument("--bins", type=int, default=50)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"lagwidom: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
