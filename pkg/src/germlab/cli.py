"""``germlab`` command line.

Exit codes: 0 pass or complete, 2 fail verdict, 3 inconclusive, 1 error,
64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import AmbiguousDimension, GermlabError, NotConverged, UnstableScale
from .germs import CATALOG_DESCRIPTIONS, catalog_germ, catalog_names, default_variables, load_germ, nominal_dim
from .report import EXIT_CODES, RunManifest, VerdictReport, write_outputs

EXIT_ERROR = 1
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


# --------------------------------------------------------------------------
# argument helpers

def parse_radii(text, default_count):
    """``a:b`` or ``a:b:k`` -> k log-spaced radii from a to b."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise UsageError(f"--radii expects a:b or a:b:k, got {text!r}")
    try:
        a, b = float(parts[0]), float(parts[1])
        k = int(parts[2]) if len(parts) == 3 else default_count
    except ValueError as exc:
        raise UsageError(f"bad --radii {text!r}: {exc}") from None
    if not 0 < a < b or k < 2:
        raise UsageError("--radii needs 0 < a < b and at least two radii")
    return [float(r) for r in np.geomspace(a, b, k)]


def parse_floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _germ(args, pos_attr="germ", required=True):
    src = getattr(args, "germ_file", None) or getattr(args, "germ_opt", None) or getattr(args, pos_attr, None)
    if src is None:
        if required:
            raise UsageError("a germ is required (positional name, --germ or --germ-file)")
        return None
    return load_germ(src)


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output directory for JSON/CSV files")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--quiet", action="store_true", help="write files only")


def _add_germ(p, positional=True, default=None):
    if positional:
        p.add_argument("germ", nargs="?", default=default)
    p.add_argument("--germ", dest="germ_opt", default=None if positional else default)
    p.add_argument("--germ-file", dest="germ_file", default=None)


def radial_power_map(n, p):
    """Coordinates of ``x |x|^p`` in R^n as expression strings."""
    names = default_variables(n, "x")
    norm = f"norm({', '.join(names)})"
    return [f"{v}*{norm}^({p!r})" for v in names]


def _map_exprs(text, n=None):
    exprs = [e.strip() for e in text.split(";") if e.strip()]
    if n is not None and len(exprs) != n:
        raise UsageError(f"--map needs {n} expressions separated by ';', got {len(exprs)}")
    return exprs


def _log_cloud(germ, N, seed, lo=1e-4, hi=1e-1):
    """``N`` germ points spread evenly over log-radius in [lo, hi], plus the origin."""
    from .sampling import derive_seed, sample_band

    rng = np.random.default_rng(derive_seed(seed, 41))
    edges = np.geomspace(lo, hi, 13)
    counts = np.bincount(rng.integers(0, 12, size=max(N - 1, 1)), minlength=12)
    parts = [np.zeros((1, germ.ambient_dim))]
    for j, c in enumerate(counts):
        if c:
            parts.append(sample_band(germ, edges[j], edges[j + 1], int(c), derive_seed(seed, 42, j)))
    return np.vstack(parts)


# --------------------------------------------------------------------------
# commands; each returns (report, series dict, germs used)

def cmd_catalog(args):
    rows = [[n, CATALOG_DESCRIPTIONS.get(n, "")] for n in catalog_names()]
    rep = VerdictReport("catalog", {}, {"germs": [{"name": a, "description": b} for a, b in rows]})
    if not args.quiet and args.out is None:
        for a, b in rows:
            print(f"{a:16s} {b}")
        return rep, {}, [], True
    return rep, {"catalog": (["name", "description"], rows)}, [], False


def cmd_validate(args):
    from .germs import validate_germ

    g = _germ(args)
    problems = validate_germ(g, seed=args.seed)
    rep = VerdictReport("validate", {"germ": g.name}, {"problems": problems},
                        verdict="pass" if not problems else "fail")
    return rep, {}, [g], False


def cmd_lne(args):
    from .metric import INCONCLUSIVE, lne_scan

    g = _germ(args)
    radii = parse_radii(args.radii, 5)
    r = lne_scan(g, radii, pairs_per_shell=args.pairs, seed=args.seed, points_per_shell=args.points)
    verdict = "inconclusive" if r.verdict == INCONCLUSIVE else "complete"
    rep = VerdictReport("def_lne", {"germ": g.name, "radii": radii, "pairs": args.pairs, "points": args.points},
                        r.to_dict(), r.thresholds, verdict)
    series = {"pairs": (["shell_r", "d_out", "d_in"], r.pairs.tolist())}
    return rep, series, [g], False


def cmd_dim_cone(args):
    from .seatangle import estimate_cone_dim

    g = _germ(args)
    radii = parse_radii(args.radii, 7)
    inputs = {"germ": g.name, "d": args.d, "C": args.C, "radii": radii, "trials": args.trials}
    try:
        est = estimate_cone_dim(g, args.d, args.C, radii, args.trials, args.seed, N=args.points)
        return VerdictReport("lem_vol.inverse", inputs, est.to_dict(), {"ambiguity_band": 0.35},
                             "complete"), {}, [g], False
    except AmbiguousDimension as exc:
        return VerdictReport("lem_vol.inverse", inputs, exc.estimate.to_dict(), {"ambiguity_band": 0.35},
                             "inconclusive"), {}, [g], False


def cmd_st_volume(args):
    from .seatangle import STParams, volume_series

    g = _germ(args)
    radii = parse_radii(args.radii, 7)
    samples = volume_series(g, STParams(args.d, args.C), radii, args.trials, args.seed, N=args.points)
    rep = VerdictReport("lem_vol", {"germ": g.name, "d": args.d, "C": args.C, "radii": radii,
                                    "trials": args.trials}, {"samples": [s.to_dict() for s in samples]})
    series = {"volume": (["r", "estimate", "stderr"], [[s.r, s.estimate, s.stderr] for s in samples])}
    return rep, series, [g], False


def cmd_tangent_cone(args):
    from .cone import tangent_cone_estimate

    g = _germ(args)
    inputs = {"germ": g.name, "r_start": args.r_start, "decades": args.decades, "points": args.points}
    try:
        trace, cone = tangent_cone_estimate(g, args.r_start, args.decades, N=args.points, seed=args.seed)
    except NotConverged as exc:
        return VerdictReport("tangent_cone", inputs, exc.trace.to_dict(), verdict="inconclusive"), {}, [g], False
    measured = {"trace": trace.to_dict(), "cone": cone.to_dict()}
    series = {"hausdorff": (["r", "hausdorff"], [[a, b] for a, b in zip(trace.radii[1:], trace.hausdorff)])}
    return VerdictReport("tangent_cone", inputs, measured, {"tol": trace.tol}), series, [g], False


def _cone_if_requested(g, args):
    if not getattr(args, "cone", False):
        return g
    from .cone import tangent_cone_estimate

    return tangent_cone_estimate(g, seed=args.seed)[1]


def cmd_link_topology(args):
    from .seatangle import STParams
    from .topology import link_betti, st_link_betti

    g = _cone_if_requested(_germ(args), args)
    inputs = {"germ": g.name, "r": args.r, "points": args.points, "st": args.st}
    try:
        if args.st:
            inputs.update(d=args.d, C=args.C)
            rep = st_link_betti(g, STParams(args.d, args.C), args.r, seed=args.seed)
            lemma = "lem_homotopy"
        else:
            rep = link_betti(g, args.r, args.points, seed=args.seed)
            lemma = "link_topology"
    except UnstableScale as exc:
        return VerdictReport("link_topology", inputs, {"error": str(exc)}, verdict="inconclusive",
                             necessary_condition_only=True), {}, [g], False
    return VerdictReport(lemma, inputs, rep.to_dict(), necessary_condition_only=True), {}, [g], False


def cmd_compare_links(args):
    from .topology import compare_links

    a, b = load_germ(args.germ_a), load_germ(args.germ_b)
    a, b = _cone_if_requested(a, args), _cone_if_requested(b, args)
    res = compare_links(a, b, args.r, args.points, args.seed)
    rep = VerdictReport("link_topology.compare", {"A": a.name, "B": b.name, "r": args.r}, res,
                        verdict="pass" if res["equal"] else "fail", necessary_condition_only=True)
    return rep, {}, [a, b], False


def _read_pairs_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise GermlabError(f"{path}: empty file")
    head = rows[0]
    xs = [i for i, h in enumerate(head) if h.strip().startswith("x")]
    ys = [i for i, h in enumerate(head) if h.strip().startswith("y")]
    if not xs or not ys:
        raise GermlabError(f"{path}: header needs x_1..x_n and y_1..y_m columns")
    data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    return data[:, xs], data[:, ys]


def cmd_extend(args):
    from .seatangle import as_map
    from .sampling import derive_seed
    from .transport import (SampledMap, build_phi, build_psi, extend_map, graph_transport_check,
                            holder_constant_sweep, random_pairs, round_trip_error)

    alpha = args.alpha
    germs = []
    if Path(args.map).suffix == ".csv" and Path(args.map).exists():
        X, Y = _read_pairs_csv(args.map)
        source = {"pairs_csv": str(args.map), "rows": int(len(X))}
        bases = [(X[0::2], Y[0::2]), (X[1::2], Y[1::2])]  # independent halves for Psi
        full = (X, Y)
    else:
        g = _germ(args, required=False) or catalog_germ("line")
        germs.append(g)
        f = as_map(_map_exprs(args.map, g.ambient_dim), g.ambient_dim)

        def draw(seed):
            P = _log_cloud(g, args.points, seed)
            Q = f(P)
            ok = np.isfinite(Q).all(axis=1)
            return P[ok], Q[ok]

        source = {"germ": g.name, "map": args.map, "points": args.points}
        bases = [draw(derive_seed(args.seed, 1)), draw(derive_seed(args.seed, 2))]
        full = bases[0]
    sm = SampledMap.build(*full, alpha)
    h, k = extend_map(sm)
    phi = build_phi(h, k)
    inputs = {**source, "alpha": alpha, "check": args.check}
    measured = {"C_sample": sm.C, "H_sample": sm.H, "L_h": h.constants, "L_k": k.constants}
    n = phi.n
    pad = lambda A: np.hstack([A, np.zeros((len(A), n - A.shape[1]))]) if A.shape[1] < n else A
    verdict, thresholds = "complete", {}
    if args.check == "roundtrip":
        sm2 = SampledMap.build(*bases[1], alpha)
        psi = build_psi(*extend_map(sm2))
        tests = pad(full[0])
        measured["round_trip"] = round_trip_error(phi, psi, np.hstack([tests, np.zeros_like(tests)]))
        measured["round_trip_same_base"] = round_trip_error(phi, build_psi(h, k),
                                                            np.hstack([tests, np.zeros_like(tests)]))
    elif args.check == "graph":
        measured["graph"] = graph_transport_check(phi, full[0], full[1])
        thresholds = {"first_block_max": 1e-12}
        verdict = "pass" if measured["graph"]["first_block_max"] <= 1e-12 else "fail"
    else:
        P = pad(full[0])
        P = np.hstack([P, np.zeros_like(P)])
        scale = float(np.max(np.linalg.norm(P, axis=1)))
        pairs = random_pairs(P, args.pairs, (1e-3 * scale, 1e-1 * scale), args.seed)
        betas = sorted({round(alpha ** 2, 12), alpha, 1.0})
        sweep = holder_constant_sweep(phi, betas, pairs, args.seed)
        measured["constants"] = sweep
        thresholds = {"bounded_growth": 1.5}
        verdict = "pass" if sweep[f"{round(alpha ** 2, 12):g}"]["bounded"] else "fail"
    return VerdictReport(f"lem_extension.{args.check}", inputs, measured, thresholds, verdict), {}, germs, False


def cmd_holder_fit(args):
    from .metric import holder_modulus_fit

    g = _germ(args, required=False) or catalog_germ("line")
    X = _log_cloud(g, args.points, args.seed)
    fit = holder_modulus_fit(_map_exprs(args.map, g.ambient_dim), X, seed=args.seed)
    alphas = parse_floats(args.alpha_grid)
    verdicts = [fit.verdict(a) for a in alphas]
    measured = {"fit": fit.to_dict(), "verdicts": verdicts}
    rep = VerdictReport("def_holder", {"germ": g.name, "map": args.map, "points": args.points, "alphas": alphas},
                        measured, {"growth_limit": 2.0})
    s, up, lo = fit.required_constants(alphas[-1])
    series = {"constants": (["s", "upper_constant", "lower_constant"], np.c_[s, up, lo].tolist())}
    return rep, series, [g], False


# verify-lemma ---------------------------------------------------------------

def _verify_vol(args, g):
    from .seatangle import STParams, volume_scaling_fit

    radii = parse_radii(args.radii or f"{10 ** -2.5!r}:0.1:7", 7)
    a = args.dim if args.dim is not None else nominal_dim(g)
    n = g.ambient_dim
    expected = n + (args.d - 1) * (n - a)
    fit, samples = volume_scaling_fit(g, STParams(args.d, args.C), radii, args.trials, args.seed,
                                      N=args.points, return_samples=True)
    ok = abs(fit.slope - expected) <= args.tol
    measured = {"e_hat": fit.slope, "expected": expected, "a": a, "fit": fit.to_dict()}
    series = {"volume": (["r", "estimate", "stderr"], [[s.r, s.estimate, s.stderr] for s in samples])}
    return VerdictReport("lem_vol", {"germ": g.name, "d": args.d, "C": args.C, "radii": radii,
                                     "trials": args.trials}, measured, {"tolerance": args.tol},
                         "pass" if ok else "fail"), series


def _default_maps(args, n):
    alpha = args.alpha if args.alpha is not None else 1 / 1.1
    if args.map:
        phi = _map_exprs(args.map, n)
        if not args.inverse:
            raise UsageError("--map needs --inverse")
        inv = _map_exprs(args.inverse, n)
    else:
        phi, inv = radial_power_map(n, 1 / alpha - 1), radial_power_map(n, alpha - 1)
    return alpha, phi, inv


def _verify_4(args, g):
    from .seatangle import STParams, holder_inclusion_check

    alpha, phi, inv = _default_maps(args, g.ambient_dim)
    st = STParams(args.d, args.C)
    fwd = holder_inclusion_check(phi, inv, g, st, alpha, seed=args.seed, tol=args.tol)
    back = holder_inclusion_check(inv, phi, g, st, alpha, seed=args.seed, tol=args.tol)
    ok = fwd["pass"] and back["pass"]
    return VerdictReport("lem_4", {"germ": g.name, "d": args.d, "C": args.C, "alpha": alpha, "map": phi,
                                   "inverse": inv}, {"phi": fwd, "phi_inverse": back},
                         {"tolerance": args.tol}, "pass" if ok else "fail"), {}


def _verify_3(args, g):
    from .seatangle import volume_distortion_check

    alpha, phi, inv = _default_maps(args, g.ambient_dim)
    r = volume_distortion_check(phi, inv, g, alpha, trials=args.trials, seed=args.seed, tol=args.tol)
    series = {"volumes": (["r", "vol_X", "vol_h_of_X_cap_B", "ratio"],
                          [[x["r"], x["vol_X"], x["vol_h_of_X_cap_B"], x["ratio"]] for x in r["rows"]])}
    return VerdictReport("lem_3", {"germ": g.name, "alpha": alpha, "map": phi, "inverse": inv}, r,
                         {"tolerance": args.tol}, "pass" if r["pass"] else "fail"), series


def _verify_shell(args, g):
    from .errors import BoxCountingUnstable
    from .seatangle import shell_volume_ratio_check

    k = args.dim if args.dim is not None else nominal_dim(g)
    inputs = {"germ": g.name, "k": k, "r": args.r, "rho": args.rho}
    try:
        r = shell_volume_ratio_check(g, k, args.r, args.rho, seed=args.seed)
    except BoxCountingUnstable as exc:
        return VerdictReport("lem_compare_volumes_r_rho", inputs, {"error": str(exc)},
                             verdict="inconclusive"), {}
    return VerdictReport("lem_compare_volumes_r_rho", inputs, r, {"K_stability_factor": 2.0},
                         "pass" if r["pass"] else "fail"), {}


def _verify_st_equiv(args, g):
    from .seatangle import st_equivalence_check

    if args.germ_b is None:
        raise UsageError("st-equiv needs --germ-b")
    b = load_germ(args.germ_b)
    r = st_equivalence_check(g, b, seed=args.seed)
    return VerdictReport("def_st_equivalence", {"A": g.name, "B": b.name}, r, {"inclusion_fraction": 0.99},
                         "pass" if r["equivalent"] else "fail"), {}


def _verify_properties(args):
    from .properties import run_all

    results = run_all(seed=args.seed)
    ok = all(r.passed for r in results)
    return VerdictReport("all_properties", {"seed": args.seed}, {"suites": [r.to_dict() for r in results]},
                         verdict="pass" if ok else "fail"), {}


def cmd_verify(args):
    if args.lemma == "all-properties":
        rep, series = _verify_properties(args)
        return rep, series, [], False
    default = {"vol": "line", "4": "line", "3": "full_plane", "shell-ratio": "line", "st-equiv": None}[args.lemma]
    src = args.germ_file or args.germ_opt or default
    if src is None:
        raise UsageError(f"verify-lemma {args.lemma} needs --germ")
    g = load_germ(src)
    fn = {"vol": _verify_vol, "4": _verify_4, "3": _verify_3, "shell-ratio": _verify_shell,
          "st-equiv": _verify_st_equiv}[args.lemma]
    rep, series = fn(args, g)
    return rep, series, [g] + ([load_germ(args.germ_b)] if args.lemma == "st-equiv" else []), False


# --------------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="germlab", description="Numerical experiments on set germs at the origin.")
    p.add_argument("--version", action="version", version=f"germlab {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("catalog", help="list built-in germs")
    _add_common(s)
    s.set_defaults(fn=cmd_catalog)

    s = sub.add_parser("validate", help="check a germ description")
    _add_germ(s)
    _add_common(s)
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("lne", help="inner vs outer distance scan")
    _add_germ(s)
    s.add_argument("--radii", default="1e-3:1e-1:5")
    s.add_argument("--pairs", type=int, default=40)
    s.add_argument("--points", type=int, default=1000)
    _add_common(s)
    s.set_defaults(fn=cmd_lne)

    for name, fn, help_ in (("dim-cone", cmd_dim_cone, "tangent-cone dimension from sea-tangle volumes"),
                            ("st-volume", cmd_st_volume, "sea-tangle volume series")):
        s = sub.add_parser(name, help=help_)
        _add_germ(s)
        s.add_argument("--d", type=float, default=1.25 if name == "dim-cone" else 1.5)
        s.add_argument("--C", type=float, default=1.0)
        s.add_argument("--radii", default="1e-3:1e-1:7")
        s.add_argument("--trials", type=int, default=200000)
        s.add_argument("--points", type=int, default=2000, help="oracle points per shell")
        _add_common(s)
        s.set_defaults(fn=fn)

    s = sub.add_parser("tangent-cone", help="estimate the tangent cone")
    _add_germ(s)
    s.add_argument("--r-start", type=float, default=0.1)
    s.add_argument("--decades", type=float, default=4.0)
    s.add_argument("--points", type=int, default=400)
    _add_common(s)
    s.set_defaults(fn=cmd_tangent_cone)

    s = sub.add_parser("link-topology", help="Betti numbers of the link")
    _add_germ(s)
    s.add_argument("--r", type=float, default=0.1)
    s.add_argument("--points", type=int, default=400)
    s.add_argument("--cone", action="store_true", help="use the estimated tangent cone")
    s.add_argument("--st", action="store_true", help="link of the sea-tangle neighbourhood instead")
    s.add_argument("--d", type=float, default=1.5)
    s.add_argument("--C", type=float, default=1.0)
    _add_common(s)
    s.set_defaults(fn=cmd_link_topology)

    s = sub.add_parser("compare-links", help="compare link Betti numbers of two germs")
    s.add_argument("germ_a")
    s.add_argument("germ_b")
    s.add_argument("--r", type=float, default=0.1)
    s.add_argument("--points", type=int, default=400)
    s.add_argument("--cone", action="store_true")
    _add_common(s)
    s.set_defaults(fn=cmd_compare_links)

    s = sub.add_parser("extend", help="Holder extension and the ambient maps Phi, Psi")
    s.add_argument("--map", required=True, help="pairs.csv or ';'-separated coordinate expressions")
    s.add_argument("--alpha", type=float, default=0.9)
    s.add_argument("--check", choices=("roundtrip", "graph", "constants"), default="roundtrip")
    s.add_argument("--points", type=int, default=1000)
    s.add_argument("--pairs", type=int, default=20000)
    _add_germ(s, positional=False)
    _add_common(s)
    s.set_defaults(fn=cmd_extend)

    s = sub.add_parser("holder-fit", help="upper/lower Holder envelopes of a map on a germ")
    s.add_argument("--map", required=True, help="';'-separated coordinate expressions")
    s.add_argument("--alpha-grid", default="0.5,0.7,0.9,1")
    s.add_argument("--points", type=int, default=1000)
    _add_germ(s, positional=False)
    _add_common(s)
    s.set_defaults(fn=cmd_holder_fit)

    s = sub.add_parser("verify-lemma", help="run one lemma check or the property suites")
    s.add_argument("lemma", choices=("vol", "4", "3", "shell-ratio", "st-equiv", "all-properties"))
    _add_germ(s, positional=False)
    s.add_argument("--germ-b", default=None)
    s.add_argument("--d", type=float, default=None)
    s.add_argument("--C", type=float, default=1.0)
    s.add_argument("--alpha", type=float, default=None)
    s.add_argument("--map", default=None)
    s.add_argument("--inverse", default=None)
    s.add_argument("--dim", type=int, default=None, help="dimension a (vol) or k (shell-ratio)")
    s.add_argument("--radii", default=None)
    s.add_argument("--trials", type=int, default=None)
    s.add_argument("--points", type=int, default=2000)
    s.add_argument("--r", type=float, default=0.01)
    s.add_argument("--rho", type=float, default=0.02)
    s.add_argument("--tol", type=float, default=None)
    _add_common(s)
    s.set_defaults(fn=cmd_verify)
    return p


_VERIFY_DEFAULTS = {
    "vol": {"d": 1.5, "tol": 0.15, "trials": 200000},
    "4": {"d": 1.3, "tol": 0.05},
    "3": {"tol": 0.05, "trials": 100000},
}


def _fill_verify_defaults(args):
    for key, val in _VERIFY_DEFAULTS.get(args.lemma, {}).items():
        if getattr(args, key) is None:
            setattr(args, key, val)
    args.d = 1.5 if args.d is None else args.d
    args.tol = 0.05 if args.tol is None else args.tol
    args.trials = 100000 if args.trials is None else args.trials


def _params(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("fn", "out", "quiet", "format")}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        if args.command == "verify-lemma":
            _fill_verify_defaults(args)
        t0 = time.perf_counter()
        report, series, germs, printed = args.fn(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except (GermlabError, ValueError, OSError) as exc:
        print(f"germlab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    manifest = RunManifest(args.command if args.command != "verify-lemma" else f"verify-lemma {args.lemma}",
                           _params(args), args.seed, {g.name: g.fingerprint() for g in germs},
                           wall_time=time.perf_counter() - t0)
    if not printed or args.out is not None:
        write_outputs(args.out, manifest, report, series, args.format, args.quiet)
    return EXIT_CODES[report.verdict]


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
