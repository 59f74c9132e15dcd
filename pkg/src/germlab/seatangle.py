"""Sea-tangle neighborhoods, Monte Carlo volumes and the Holder distortion checks."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from math import gamma, pi

import numpy as np
from scipy.spatial import cKDTree

from .errors import AmbiguousDimension, BoxCountingUnstable, DegenerateWindow, OutOfCoverage
from .expr import evaluate_columns, parse_expression
from .fitting import ScalingFit, fit_power_law
from .germs import GermSpec, GraphGerm, ZeroSetGerm, default_variables
from .oracle import DistanceOracle, build_oracle, default_width
from .sampling import derive_seed, pmap, sample_ball, unit_sphere

SHARD = 50000


@dataclass(frozen=True)
class STParams:
    d: float
    C: float

    def __post_init__(self):
        if not self.d > 1:
            raise ValueError("sea-tangle degree d must exceed 1")
        if not self.C > 0:
            raise ValueError("sea-tangle width C must be positive")


@dataclass(frozen=True)
class VolumeSample:
    r: float
    hits: int
    trials: int
    estimate: float
    stderr: float
    fringe: int = 0
    extrapolated: int = 0

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class DimensionEstimate:
    e_hat: float
    a_real: float
    a_rounded: int
    ci: tuple
    fit: ScalingFit
    d: float
    n: int

    @property
    def ambiguity(self):
        return abs(self.a_real - self.a_rounded)

    def to_dict(self):
        return {
            "e_hat": self.e_hat,
            "a_real": self.a_real,
            "a_rounded": self.a_rounded,
            "ambiguity": self.ambiguity,
            "ci": list(self.ci),
            "d": self.d,
            "n": self.n,
            "fit": self.fit.to_dict(),
        }


def ball_volume(n, r):
    return pi ** (n / 2) / gamma(n / 2 + 1) * r ** n


def uniform_ball(rng, count, n, r):
    dirs = unit_sphere(rng, count, n)
    rad = r * rng.random(count) ** (1.0 / n)
    return dirs * rad[:, None]


# --------------------------------------------------------------------------
# membership

def st_members(oracle: DistanceOracle, P, st: STParams, check=True):
    """Membership mask plus a mask of fringe points whose verdict is within the oracle error."""
    P = np.atleast_2d(P)
    thr = st.C * np.linalg.norm(P, axis=1) ** st.d
    err = oracle.shell_gap(np.linalg.norm(P, axis=1))
    d, err = oracle.query_bounded(P, thr + err, check=check)
    inside = d <= thr
    fringe = (~inside) & (d - err <= thr)
    return inside, fringe


def st_membership(oracle: DistanceOracle, p, st: STParams) -> bool:
    inside, _ = st_members(oracle, np.asarray(p, dtype=float)[None, :], st)
    return bool(inside[0])


def volume_oracle(germ, r_lo, r_hi, seed, N=2000, per_decade=4):
    return build_oracle(germ, r_lo, min(1.0, r_hi), per_decade, N, seed)


def mc_volume(germ: GermSpec, st: STParams, r: float, trials: int, seed: int,
              oracle: DistanceOracle | None = None) -> VolumeSample:
    """Fraction of uniform points of B(0, r) inside ST_d(germ, C), times vol_n(B(0, r)).

    Points below the oracle's smallest shell are pushed radially out to it
    and classified there.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if oracle is None:
        oracle = volume_oracle(germ, r * 1e-3, r, derive_seed(seed, 0))
    lo_cov, hi_cov = oracle.coverage
    if r > hi_cov:
        raise OutOfCoverage(f"r = {r:.3g} exceeds oracle coverage {hi_cov:.3g}")
    floor = oracle.r_min
    n = germ.ambient_dim

    def shard(k):
        m = min(SHARD, trials - k * SHARD)
        rng = np.random.default_rng(derive_seed(seed, 1, k))
        P = uniform_ball(rng, m, n, r)
        nr = np.linalg.norm(P, axis=1)
        low = nr < floor
        Q = P.copy()
        if np.any(low):
            # the origin itself is on every germ and counts as a hit
            scale = np.where(nr[low] > 0, floor / np.maximum(nr[low], 1e-300), 0.0)
            Q[low] = P[low] * scale[:, None]
        zero = np.linalg.norm(Q, axis=1) == 0
        inside = np.zeros(m, dtype=bool)
        fringe = np.zeros(m, dtype=bool)
        if np.any(~zero):
            a, b = st_members(oracle, Q[~zero], st)
            inside[~zero], fringe[~zero] = a, b
        inside[zero] = True
        return int(inside.sum()), int(fringe.sum()), int(low.sum())

    shards = (trials + SHARD - 1) // SHARD
    parts = pmap(shard, range(shards))
    hits = sum(p[0] for p in parts)
    fr = sum(p[1] for p in parts)
    ex = sum(p[2] for p in parts)
    vb = ball_volume(n, r)
    phat = hits / trials
    return VolumeSample(float(r), hits, int(trials), phat * vb,
                        float(np.sqrt(phat * (1 - phat) / trials) * vb), fr, ex)


def volume_series(germ, st, radii, trials, seed, oracle=None, N=2000):
    radii = sorted(float(r) for r in radii)
    if oracle is None:
        oracle = volume_oracle(germ, radii[0] * 1e-3, radii[-1], derive_seed(seed, 0), N)
    return [mc_volume(germ, st, r, trials, derive_seed(seed, 2, j), oracle) for j, r in enumerate(radii)]


def volume_scaling_fit(germ, st, radii, trials, seed, oracle=None, N=2000, return_samples=False):
    radii = sorted(float(r) for r in radii)
    if np.log10(radii[-1] / radii[0]) < 1.5 - 1e-9:
        raise DegenerateWindow("volume ladder must span at least 1.5 decades")
    samples = volume_series(germ, st, radii, trials, seed, oracle, N)
    if any(s.hits == 0 for s in samples):
        raise DegenerateWindow("a radius recorded no sea-tangle hits")
    fit = fit_power_law([(s.r, s.estimate) for s in samples], min_decades=1.5, min_count=3)
    return (fit, samples) if return_samples else fit


def estimate_cone_dim(germ, d=1.25, C=1.0, radii=None, trials=200000, seed=0, N=2000,
                      band=0.35) -> DimensionEstimate:
    """Invert the volume law ``vol ~ r^(n + (d-1)(n-a))`` for ``a``."""
    radii = list(np.geomspace(1e-3, 1e-1, 7)) if radii is None else list(radii)
    st = STParams(d, C)
    fit = volume_scaling_fit(germ, st, radii, trials, seed, N=N)
    n = germ.ambient_dim
    a_real = n - (fit.slope - n) / (d - 1)
    half = 2.0 * fit.slope_stderr / (d - 1)
    est = DimensionEstimate(fit.slope, float(a_real), int(round(a_real)), (a_real - half, a_real + half),
                            fit, float(d), n)
    if est.ambiguity > band:
        raise AmbiguousDimension(est)
    return est


# --------------------------------------------------------------------------
# ST-equivalence

def _window_oracle(germ, radii, N, seed):
    return build_oracle(germ, min(radii), max(radii), 4, N, seed)


def _shell_points(oracle, radii):
    lo, hi = min(radii), max(radii)
    pts = oracle.points
    nr = np.linalg.norm(pts, axis=1)
    return pts[(nr >= lo) & (nr <= hi)]


def st_equivalence_check(germA, germB, d_grid=(1.1, 1.25, 1.5), C_grid=(0.5, 1.0), radii=None,
                         N=2000, seed=0, threshold=0.99):
    radii = list(np.geomspace(1e-3, 1e-1, 9)) if radii is None else list(radii)
    oA = _window_oracle(germA, radii, N, seed)
    oB = _window_oracle(germB, radii, N, seed)
    PA, PB = _shell_points(oA, radii), _shell_points(oB, radii)
    grid = []
    best = None
    for d in sorted(d_grid):
        for C in sorted(C_grid):
            st = STParams(d, C)
            b_in_a = float(np.mean(st_members(oA, PB, st, check=False)[0]))
            a_in_b = float(np.mean(st_members(oB, PA, st, check=False)[0]))
            ok = b_in_a >= threshold and a_in_b >= threshold
            grid.append({"d": d, "C": C, "B_in_ST_A": b_in_a, "A_in_ST_B": a_in_b, "pass": ok})
            if ok:
                best = d if best is None else max(best, d)
    return {
        "germ_A": germA.name,
        "germ_B": germB.name,
        "window": [min(radii), max(radii)],
        "threshold": threshold,
        "grid": grid,
        "largest_d": best,
        "equivalent": best is not None,
    }


# --------------------------------------------------------------------------
# maps given as coordinate expressions or callables

def as_map(h, n):
    if h is None:
        return None
    if callable(h):
        return h
    names = default_variables(n, "x")
    exprs = [parse_expression(e, names) if isinstance(e, str) else e for e in h]
    if len(exprs) != n:
        raise ValueError("map needs one expression per ambient coordinate")

    def f(X):
        X = np.atleast_2d(X)
        Y, ok = evaluate_columns(exprs, names, X, strict=False)
        # every map here fixes the origin; expressions like x*log|x| are undefined there
        at0 = np.linalg.norm(X, axis=1) == 0
        Y[at0] = 0.0
        Y[~ok & ~at0] = np.nan
        return Y

    return f


def _near_set_sample(rng, base, st, count):
    """Points ``q + v`` with q on the cloud and |v| uniform-in-ball up to ``C |q|^d``."""
    q = base[rng.integers(0, len(base), size=count)]
    rad = st.C * np.linalg.norm(q, axis=1) ** st.d
    return q + uniform_ball(rng, count, base.shape[1], 1.0) * rad[:, None]


def _envelope_fit(norms, dists, radii):
    """Per-shell worst distance against the shell's norm, fitted in log-log."""
    edges = np.sqrt(np.array(radii[:-1]) * np.array(radii[1:]))
    lo = radii[0] / np.sqrt(radii[1] / radii[0])
    hi = radii[-1] * np.sqrt(radii[-1] / radii[-2])
    bounds = np.r_[lo, edges, hi]
    rows = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        m = (norms >= a) & (norms < b) & (dists > 0)
        if np.count_nonzero(m) >= 5:
            k = np.flatnonzero(m)[np.argmax(dists[m] / norms[m])]
            rows.append((norms[k], dists[k]))
    if len(rows) < 3:
        raise DegenerateWindow("too few populated shells for the envelope fit")
    return fit_power_law(rows, min_decades=1.0, min_count=3)


def holder_inclusion_check(phi, phi_inv, germX, st: STParams, alpha, radii=None, N=2000, seed=0,
                           tol=0.05, samples=4000):
    """Empirical form of ``ST_{d/a^2}(phi X) in phi(ST_d X) in ST_{d a^2}(phi X)``.

    Right inclusion: points of ST_d(X, C) are mapped by phi and the exponent
    of dist(phi(p), phi(X)) against |phi(p)| must reach d a^2.  Left
    inclusion: points of ST_{d/a^2}(phi X, C) are pulled back by phi^-1 and
    the exponent of dist(phi^-1(q), X) against |phi^-1(q)| must reach d.
    """
    n = germX.ambient_dim
    f, g = as_map(phi, n), as_map(phi_inv, n)
    radii = list(np.geomspace(1e-3, 1e-1, 9)) if radii is None else sorted(radii)
    rng = np.random.default_rng(derive_seed(seed, 7))
    w = default_width(4)
    oX = build_oracle(germX, radii[0] * (1 - w) ** 2, min(1.0, radii[-1]), 4, N, derive_seed(seed, 8))
    cloudX = oX.points
    img = f(cloudX)
    img = img[np.isfinite(img).all(axis=1)]
    tree_img = cKDTree(img, balanced_tree=False)

    # right inclusion
    P = _near_set_sample(rng, cloudX[np.linalg.norm(cloudX, axis=1) >= radii[0]], st, samples)
    inside, _ = st_members(oX, P, st, check=False)
    P = P[inside]
    FP = f(P)
    okf = np.isfinite(FP).all(axis=1)
    FP = FP[okf]
    d_img, _ = tree_img.query(FP)
    im_radii = np.linalg.norm(f(np.array([[r] + [0.0] * (n - 1) for r in radii])), axis=1)
    fit_right = _envelope_fit(np.linalg.norm(FP, axis=1), d_img, list(np.sort(im_radii)))
    need_right = st.d * alpha ** 2

    # left inclusion
    st_left = STParams(st.d / alpha ** 2, st.C)
    img_r = np.linalg.norm(img, axis=1)
    base = img[(img_r >= im_radii.min()) & (img_r <= im_radii.max())]
    Q = _near_set_sample(rng, base, st_left, samples)
    dq, _ = tree_img.query(Q)
    Q = Q[dq <= st_left.C * np.linalg.norm(Q, axis=1) ** st_left.d]
    GQ = g(Q)
    okg = np.isfinite(GQ).all(axis=1)
    GQ = GQ[okg]
    dX, _ = oX.tree.query(GQ)
    fit_left = _envelope_fit(np.linalg.norm(GQ, axis=1), dX, radii)
    need_left = st.d
    right_ok = fit_right.slope >= need_right - tol
    left_ok = fit_left.slope >= need_left - tol
    return {
        "germ": germX.name,
        "d": st.d,
        "C": st.C,
        "alpha": alpha,
        "tolerance": tol,
        "right": {"exponent": fit_right.slope, "required": need_right, "pass": bool(right_ok),
                  "fit": fit_right.to_dict(), "samples": int(len(FP))},
        "left": {"exponent": fit_left.slope, "required": need_left, "pass": bool(left_ok),
                 "fit": fit_left.to_dict(), "samples": int(len(GQ))},
        "pass": bool(right_ok and left_ok),
    }


# --------------------------------------------------------------------------
# volume distortion

def full_dim_contains(germ, P):
    """Membership for full-dimensional germs (R^n itself or sign-condition regions)."""
    if isinstance(germ, GraphGerm) and germ.param_dim == germ.ambient_dim:
        return np.ones(len(P), dtype=bool)
    if isinstance(germ, ZeroSetGerm) and not germ.exprs:
        if not germ.inequalities:
            return np.ones(len(P), dtype=bool)
        vals, ok = evaluate_columns(germ.inequalities, germ.variables, P, strict=False)
        return ok & np.all(vals >= 0, axis=1)
    raise ValueError(f"{germ.name} is not a full-dimensional germ with a membership test")


def volume_distortion_check(h, h_inv, germX, alpha, radii=None, trials=100000, seed=0, tol=0.05):
    """Compare vol(h(X cap B_r)) with vol(X cap B_r) across r against the Holder volume bound."""
    n = germX.ambient_dim
    f, g = as_map(h, n), as_map(h_inv, n)
    radii = list(np.geomspace(1e-3, 1e-1, 5)) if radii is None else sorted(radii)
    rows = []
    for j, r in enumerate(radii):
        rng = np.random.default_rng(derive_seed(seed, 3, j))
        P = uniform_ball(rng, trials, n, r)
        vX = float(np.mean(full_dim_contains(germX, P))) * ball_volume(n, r)
        # radius of h(B_r): largest image norm over a dense sample of the ball boundary
        S = unit_sphere(rng, 4096, n) * r
        R = 1.05 * float(np.nanmax(np.linalg.norm(f(np.vstack([S, P[:4096]])), axis=1)))
        Q = uniform_ball(rng, trials, n, R)
        back = g(Q)
        okb = np.isfinite(back).all(axis=1)
        hit = np.zeros(trials, dtype=bool)
        hit[okb] = (np.linalg.norm(back[okb], axis=1) <= r) & full_dim_contains(germX, back[okb])
        vhX = float(np.mean(hit)) * ball_volume(n, R)
        Q2 = uniform_ball(rng, trials, n, r)
        back2 = g(Q2)
        ok2 = np.isfinite(back2).all(axis=1)
        hit2 = np.zeros(trials, dtype=bool)
        hit2[ok2] = full_dim_contains(germX, back2[ok2])
        vhXr = float(np.mean(hit2)) * ball_volume(n, r)
        rows.append({"r": r, "vol_X": vX, "vol_h_of_X_cap_B": vhX, "vol_hX_cap_B": vhXr,
                     "ratio": vhX / vX if vX > 0 else float("nan")})
    ratios = np.array([x["ratio"] for x in rows])
    if not np.all(ratios > 0):
        raise DegenerateWindow("volume ratio vanished on the window")
    fit = fit_power_law(np.c_[radii, ratios], min_decades=1.0, min_count=3)
    bound_exp = (1.0 / alpha + 1.0) * (alpha - 1.0) * n
    K = float(np.max(ratios / np.array(radii) ** bound_exp))
    return {
        "germ": germX.name,
        "alpha": alpha,
        "n": n,
        "rows": rows,
        "ratio_exponent": fit.slope,
        "bound_exponent": bound_exp,
        "slack_constant": K,
        "tolerance": tol,
        "fit": fit.to_dict(),
        "pass": bool(fit.slope >= bound_exp - tol),
    }


# --------------------------------------------------------------------------
# shell volume ratio by box counting

def box_volume(points, delta, k):
    keys = np.floor(points / delta).astype(np.int64)
    return len(np.unique(keys, axis=0)) * delta ** k


def extrapolated_volume(points, deltas, k):
    deltas = np.asarray(sorted(deltas), dtype=float)
    vols = np.array([box_volume(points, dl, k) for dl in deltas])
    A = np.vstack([np.ones_like(deltas), deltas]).T
    (a, b), *_ = np.linalg.lstsq(A, vols, rcond=None)
    if a <= 0 or abs(b) * deltas.max() > 0.5 * a:
        raise BoxCountingUnstable(f"box counts {vols.tolist()} do not settle as delta shrinks")
    return float(a), vols


def shell_volume_ratio_check(germ, k, r, rho, deltas=None, N=None, seed=0, decades=1):
    """Fit ``K`` in ``vol_k(X cap B_rho) <= K (rho/r)^k vol_k(X cap B_r)`` and test its stability."""
    if not 0 < r < rho:
        raise ValueError("need 0 < r < rho")
    N = 20000 * k * k if N is None else N
    rel = np.array(deltas) if deltas is not None else (
        np.array([0.02, 0.014, 0.01]) if k == 1 else np.array([0.08, 0.06, 0.045]))
    rows = []
    for j in range(decades + 1):
        s = 10.0 ** (-j)
        rj, pj = r * s, rho * s
        pts = sample_ball(germ, pj, N, derive_seed(seed, 4, j))
        small = pts[np.linalg.norm(pts, axis=1) <= rj]
        big_v, big_counts = extrapolated_volume(pts, rel * rj, k)
        small_v, small_counts = extrapolated_volume(small, rel * rj, k)
        K = big_v / ((pj / rj) ** k * small_v)
        rows.append({"r": rj, "rho": pj, "vol_rho": big_v, "vol_r": small_v, "K": K})
    Ks = np.array([x["K"] for x in rows])
    stable = bool(Ks.max() / Ks.min() <= 2.0)
    return {
        "germ": germ.name,
        "k": k,
        "rows": rows,
        "K": float(Ks.max()),
        "stable": stable,
        "pass": stable,
    }
