"""Shell sampling and exact-radius link tracks for every germ kind."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import EmptyShell, ProjectionDiverged
from .expr import evaluate_columns
from .germs import (
    ConeGerm,
    GermSpec,
    GraphGerm,
    ParametricGerm,
    ProductGerm,
    UnionGerm,
    ZeroSetGerm,
)

MAX_ROUNDS = 60
NEWTON_ITERS = 50
NEWTON_TOL = 1e-12
BISECT_ITERS = 110


@dataclass(frozen=True)
class ShellCloud:
    germ_name: str
    r: float
    w: float
    points: np.ndarray
    seed: int

    @property
    def norms(self):
        return np.linalg.norm(self.points, axis=1)


def derive_seed(seed, *keys) -> int:
    """Child seed for ``(seed, keys...)``; stable across platforms and runs."""
    return int(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, *[int(k) for k in keys]]).generate_state(1)[0])


def thread_count():
    try:
        return max(1, int(os.environ.get("GERMLAB_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items):
    """Ordered map, threaded when GERMLAB_THREADS > 1.  Output order never depends on scheduling."""
    items = list(items)
    k = thread_count()
    if k == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=k) as ex:
        return list(ex.map(fn, items))


def unit_sphere(rng, count, dim):
    if dim == 1:
        return rng.choice([-1.0, 1.0], size=(count, 1))
    v = rng.standard_normal((count, dim))
    nv = np.linalg.norm(v, axis=1, keepdims=True)
    nv[nv == 0] = 1.0
    return v / nv


# --------------------------------------------------------------------------
# parametrized germs (graphs and parametric images)

def _param_map(germ, T, strict=False):
    if isinstance(germ, GraphGerm):
        if not germ.exprs:
            return T.copy(), np.ones(len(T), dtype=bool)
        vals, ok = evaluate_columns(germ.exprs, germ.variables, T, strict=False)
        return np.hstack([T, vals]), ok
    vals, ok = evaluate_columns(germ.exprs, germ.variables, T, strict=False)
    return vals, ok


def _tmax(germ, dirs):
    if isinstance(germ, GraphGerm):
        return np.ones(len(dirs))
    lo = np.array([iv[0] for iv in germ.param_domain])
    hi = np.array([iv[1] for iv in germ.param_domain])
    with np.errstate(divide="ignore", invalid="ignore"):
        lim = np.where(dirs > 0, hi / dirs, np.where(dirs < 0, lo / dirs, np.inf))
    return np.min(lim, axis=1)


def _profile(germ, dirs, t):
    pts, ok = _param_map(germ, dirs * t[:, None])
    nr = np.linalg.norm(pts, axis=1)
    nr[~ok] = np.inf
    return nr


def _invert_profile(germ, dirs, tmax, target):
    """Smallest-bracket bisection for ``|F(t dir)| = target`` on ``[0, tmax]``.

    Returns ``t`` and a mask of directions whose profile reaches ``target``.
    """
    top = _profile(germ, dirs, tmax)
    reach = np.isfinite(top) & (top >= target)
    lo = np.zeros(len(dirs))
    hi = tmax.copy()
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        big = _profile(germ, dirs, mid) >= target
        hi = np.where(big, mid, hi)
        lo = np.where(big, lo, mid)
    return hi, reach


def _band_param(germ, lo, hi, count, rng):
    p = germ.param_dim
    if p == 0:
        return np.zeros((1, germ.ambient_dim)) if lo <= 0 else np.zeros((0, germ.ambient_dim))
    dirs = unit_sphere(rng, count, p)
    tmax = _tmax(germ, dirs)
    if lo > 0:
        ta, reach = _invert_profile(germ, dirs, tmax, lo)
    else:
        ta, reach = np.zeros(count), np.ones(count, dtype=bool)
    tb, reach_hi = _invert_profile(germ, dirs, tmax, hi)
    tb = np.where(reach_hi, tb, tmax)
    mass = np.where(reach, tb ** p - ta ** p, 0.0)
    if not np.any(mass > 0):
        return np.zeros((0, germ.ambient_dim))
    # directions competing for the band are accepted in proportion to their parameter volume
    keep = rng.random(count) * mass.max() <= mass
    keep &= mass > 0
    u = rng.random(count)
    t = (ta ** p + u * (tb ** p - ta ** p)) ** (1.0 / p)
    pts, ok = _param_map(germ, dirs[keep] * t[keep, None])
    return pts[ok]


def _stratified_1d(germ, lo, hi, N, rng):
    """Jittered-stratified band sample for one-parameter germs, or None if a profile is not monotone.

    Stratification keeps the largest gap within a small factor of the mean
    spacing, which matters for graph geodesics between nearby branches.
    """
    dirs = np.array([[1.0], [-1.0]])
    tmax = _tmax(germ, dirs)
    if lo > 0:
        ta, reach = _invert_profile(germ, dirs, tmax, lo)
    else:
        ta, reach = np.zeros(2), np.ones(2, dtype=bool)
    tb, reach_hi = _invert_profile(germ, dirs, tmax, hi)
    tb = np.where(reach_hi, tb, tmax)
    mass = np.where(reach, tb - ta, 0.0)
    if mass.sum() <= 0:
        return np.zeros((0, germ.ambient_dim))
    n_plus = int(round(N * mass[0] / mass.sum()))
    counts = [n_plus, N - n_plus]
    out = []
    for k in range(2):
        c = counts[k]
        if c == 0:
            continue
        u = (np.arange(c) + rng.random(c)) / c
        t = ta[k] + (tb[k] - ta[k]) * u
        pts, ok = _param_map(germ, dirs[k] * t[:, None])
        nr = np.linalg.norm(pts, axis=1)
        if not np.all(ok & (nr >= lo) & (nr <= hi)):
            return None
        out.append(pts)
    return np.vstack(out)


def _tracks_param(germ, rho, count, seed):
    rng = np.random.default_rng(seed)
    p = germ.param_dim
    if p == 0:
        return np.zeros((0, germ.ambient_dim)), np.zeros(0, dtype=bool)
    dirs = unit_sphere(rng, count, p)
    tmax = _tmax(germ, dirs)
    t, reach = _invert_profile(germ, dirs, tmax, rho)
    pts, ok = _param_map(germ, dirs * t[:, None])
    ok &= reach
    nr = np.linalg.norm(pts, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        pts = pts * (rho / nr)[:, None]
    ok &= np.isfinite(pts).all(axis=1)
    return pts, ok


# --------------------------------------------------------------------------
# zero sets

def _residual(germ, X):
    if not germ.exprs:
        return np.zeros((len(X), 0)), np.ones(len(X), dtype=bool)
    return evaluate_columns(germ.exprs, germ.variables, X, strict=False)


def _jacobian(fun, X, m):
    n = X.shape[1]
    scale = np.maximum(np.linalg.norm(X, axis=1), 1e-300)
    h = 1e-6 * scale
    J = np.empty((len(X), m, n))
    for i in range(n):
        E = np.zeros_like(X)
        E[:, i] = h
        fp, _ = fun(X + E)
        fm, _ = fun(X - E)
        J[:, :, i] = (fp - fm) / (2 * h[:, None])
    return J


def _min_norm_step(J, F):
    """``-J^+ F`` per row; closed form for one equation, normal equations otherwise."""
    if J.shape[1] == 1:
        g = J[:, 0, :]
        return -g * (F[:, 0] / np.sum(g * g, axis=1))[:, None]
    JJt = np.einsum("kij,klj->kil", J, J)
    try:
        y = np.linalg.solve(JJt, F[:, :, None])[:, :, 0]
    except np.linalg.LinAlgError:
        return -np.einsum("kij,kj->ki", np.linalg.pinv(J), F)
    return -np.einsum("kji,kj->ki", J, y)


def newton_project(fun, X, m):
    """Minimum-norm Gauss-Newton projection of each row of X onto ``fun = 0``.

    ``fun`` maps (M, n) to ((M, m) residuals, validity mask).  Returns the
    projected points and a convergence mask.
    """
    X = X.copy()
    alive = np.ones(len(X), dtype=bool)
    done = np.zeros(len(X), dtype=bool)
    scale = np.linalg.norm(X, axis=1)
    for _ in range(NEWTON_ITERS):
        idx = np.flatnonzero(alive & ~done)
        if idx.size == 0:
            break
        Xa = X[idx]
        F, ok = fun(Xa)
        J = _jacobian(fun, Xa, m)
        with np.errstate(all="ignore"):
            step = _min_norm_step(J, F)
        ok &= np.isfinite(step).all(axis=1)
        alive[idx[~ok]] = False
        Xa = Xa + np.where(ok[:, None], step, 0.0)
        X[idx] = Xa
        small = np.linalg.norm(step, axis=1) <= NEWTON_TOL * np.maximum(scale[idx], 1e-300)
        done[idx[ok & small]] = True
    F, ok = fun(X)
    nx = np.linalg.norm(X, axis=1)
    fine = ok & np.isfinite(X).all(axis=1)
    if F.shape[1]:
        fine &= np.max(np.abs(F), axis=1) <= 1e-10 * (1 + nx)
    return X, alive & fine


def _ineq_ok(germ, X):
    if not germ.inequalities:
        return np.ones(len(X), dtype=bool)
    vals, ok = evaluate_columns(germ.inequalities, germ.variables, X, strict=False)
    return ok & np.all(vals >= 0, axis=1)


def _ambient_band(rng, count, n, lo, hi):
    dirs = unit_sphere(rng, count, n)
    u = rng.random(count)
    rad = (lo ** n + u * (hi ** n - lo ** n)) ** (1.0 / n)
    return dirs * rad[:, None]


def _band_zero(germ, lo, hi, count, rng, stats):
    X0 = _ambient_band(rng, count, germ.ambient_dim, lo, hi)
    m = len(germ.exprs)
    if m:
        X, conv = newton_project(lambda Z: _residual(germ, Z), X0, m)
        stats["proposed"] += count
        stats["converged"] += int(conv.sum())
        X = X[conv]
    else:
        X = X0
    return X[_ineq_ok(germ, X)]


def _tracks_zero(germ, rho, count, seed, start=None):
    n = germ.ambient_dim
    if start is None:
        rng = np.random.default_rng(seed)
        start = unit_sphere(rng, count, n)
    X0 = rho * np.asarray(start, dtype=float)
    m = len(germ.exprs)

    def fun(Z):
        F, ok = _residual(germ, Z)
        sph = (np.sum(Z * Z, axis=1) - rho * rho) / (2 * rho)
        return np.hstack([F, sph[:, None]]), ok

    X, conv = newton_project(fun, X0, m + 1)
    conv &= _ineq_ok(germ, X)
    return X, conv


# --------------------------------------------------------------------------
# dispatch

def _band(germ: GermSpec, lo, hi, count, rng, stats):
    if isinstance(germ, (GraphGerm, ParametricGerm)):
        return _band_param(germ, lo, hi, count, rng)
    if isinstance(germ, ZeroSetGerm):
        return _band_zero(germ, lo, hi, count, rng, stats)
    if isinstance(germ, ConeGerm):
        k = rng.integers(0, len(germ.link_points), size=count)
        t = lo + (hi - lo) * rng.random(count)
        return germ.link_points[k] * t[:, None]
    if isinstance(germ, ProductGerm):
        inner = _band(germ.inner, lo, hi, count, rng, stats)
        return np.hstack([inner, np.zeros((len(inner), germ.zero_pad))])
    raise TypeError(f"cannot sample {type(germ).__name__}")


def _collect(germ, lo, hi, N, rng):
    out = []
    have = 0
    stats = {"proposed": 0, "converged": 0}
    batch = max(2 * N, 64)
    for _ in range(MAX_ROUNDS):
        P = _band(germ, lo, hi, batch, rng, stats)
        if len(P):
            nr = np.linalg.norm(P, axis=1)
            P = P[(nr >= lo) & (nr <= hi)]
        if len(P):
            out.append(P)
            have += len(P)
        if have >= N:
            break
        if stats["proposed"] >= batch and stats["converged"] == 0:
            raise ProjectionDiverged(f"{germ.name}: Newton projection failed on every proposal")
    if have < N:
        raise EmptyShell(f"{germ.name}: only {have} of {N} points found in band [{lo:.3g}, {hi:.3g}]")
    return np.vstack(out)[:N]


def _sample_union(germ: UnionGerm, lo, hi, N, rng):
    # every part that meets the band gets an equal share (so at least 10% for up to ten parts)
    clouds = []
    live = []
    for part in germ.parts:
        try:
            clouds.append(_sample_any(part, lo, hi, 1, rng))
            live.append(part)
        except EmptyShell:
            pass
    if not live:
        raise EmptyShell(f"{germ.name}: no part meets band [{lo:.3g}, {hi:.3g}]")
    shares = [N // len(live) + (1 if i < N % len(live) else 0) for i in range(len(live))]
    out = [_sample_any(p, lo, hi, s, rng) for p, s in zip(live, shares) if s > 0]
    return np.vstack(out)


def _sample_any(germ, lo, hi, N, rng):
    if isinstance(germ, UnionGerm):
        return _sample_union(germ, lo, hi, N, rng)
    if isinstance(germ, ProductGerm) and isinstance(germ.inner, UnionGerm):
        inner = _sample_union(germ.inner, lo, hi, N, rng)
        return np.hstack([inner, np.zeros((len(inner), germ.zero_pad))])
    if isinstance(germ, GraphGerm) and germ.param_dim == 0:
        if lo > 0:
            raise EmptyShell(f"{germ.name}: the germ is the origin")
        return np.zeros((N, germ.ambient_dim))
    if isinstance(germ, (GraphGerm, ParametricGerm)) and germ.param_dim == 1:
        P = _stratified_1d(germ, lo, hi, N, rng)
        if P is not None:
            if len(P) == 0:
                raise EmptyShell(f"{germ.name}: band [{lo:.3g}, {hi:.3g}] is not reached")
            return P
    return _collect(germ, lo, hi, N, rng)


def sample_band(germ: GermSpec, lo: float, hi: float, N: int, seed) -> np.ndarray:
    """N points of the germ with norm in ``[lo, hi]``."""
    if N < 1:
        raise ValueError("N must be positive")
    if not 0 <= lo < hi:
        raise ValueError("need 0 <= lo < hi")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return _sample_any(germ, float(lo), float(hi), int(N), rng)


def sample_shell(germ: GermSpec, r: float, N: int, w: float, seed: int) -> ShellCloud:
    if not 0 < r <= 1:
        raise ValueError("r must lie in (0, 1]")
    if not 0 < w < 1:
        raise ValueError("w must lie in (0, 1)")
    pts = sample_band(germ, r * (1 - w), r * (1 + w), N, seed)
    pts.setflags(write=False)
    return ShellCloud(germ.name, float(r), float(w), pts, int(seed))


def sample_ball(germ: GermSpec, R: float, N: int, seed) -> np.ndarray:
    return sample_band(germ, 0.0, R, N, seed)


def link_tracks(germ: GermSpec, rho: float, M: int, seed: int, start=None):
    """Points of ``germ`` on the sphere of radius ``rho`` (norm exact to rounding).

    Track ``i`` is the same parameter direction (or ambient start direction)
    for every ``rho``, so the rows can be followed down a radius ladder.
    Returns ``(points, valid)``; invalid rows mark tracks missing the sphere.
    """
    if isinstance(germ, ConeGerm):
        K = len(germ.link_points)
        idx = np.arange(max(M, K)) % K
        return rho * germ.link_points[idx], np.ones(len(idx), dtype=bool)
    if isinstance(germ, (GraphGerm, ParametricGerm)):
        return _tracks_param(germ, rho, M, seed)
    if isinstance(germ, ZeroSetGerm):
        return _tracks_zero(germ, rho, M, seed, start)
    if isinstance(germ, ProductGerm):
        P, ok = link_tracks(germ.inner, rho, M, seed, None if start is None else start[:, : germ.inner.ambient_dim])
        return np.hstack([P, np.zeros((len(P), germ.zero_pad))]), ok
    if isinstance(germ, UnionGerm):
        K = len(germ.parts)
        pts, oks = [], []
        offset = 0
        for i, part in enumerate(germ.parts):
            m = M // K + (1 if i < M % K else 0)
            size = _track_count(part, m)
            sub = None if start is None else start[offset: offset + size]
            P, ok = link_tracks(part, rho, m, derive_seed(seed, i), sub)
            pts.append(P)
            oks.append(ok)
            offset += size
        return np.vstack(pts), np.concatenate(oks)
    raise TypeError(f"cannot sample {type(germ).__name__}")


def _track_count(germ, M):
    if isinstance(germ, ConeGerm):
        return max(M, len(germ.link_points))
    if isinstance(germ, ProductGerm):
        return _track_count(germ.inner, M)
    if isinstance(germ, UnionGerm):
        K = len(germ.parts)
        return sum(_track_count(p, M // K + (1 if i < M % K else 0)) for i, p in enumerate(germ.parts))
    if isinstance(germ, GraphGerm) and germ.param_dim == 0:
        return 0
    return M
