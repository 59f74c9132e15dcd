"""Tangent cones by radial rescaling and direction-set convergence."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import EmptySet, EmptyShell, NotConverged
from .germs import ConeGerm, GermSpec, ZeroSetGerm
from .sampling import link_tracks, sample_shell

KAPPAS = (0.25, 0.5, 0.75, 1.0, 1.5, 2.0)
TOL_FLOOR = 0.01


@dataclass(frozen=True)
class DirectionCloud:
    r: float
    vectors: np.ndarray


@dataclass
class ConvergenceTrace:
    radii: list
    hausdorff: list
    tol: float
    gap: float
    converged: bool
    limit: np.ndarray
    model: str = "constant"
    spread: float = 0.0
    raw_converged: bool = False
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "radii": [float(r) for r in self.radii],
            "hausdorff": [float(h) for h in self.hausdorff],
            "tol": self.tol,
            "gap": self.gap,
            "converged": self.converged,
            "raw_converged": self.raw_converged,
            "model": self.model,
            "spread": self.spread,
            "limit": self.limit.tolist(),
            "notes": list(self.notes),
        }


def hausdorff_distance(A, B) -> float:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.size == 0 or B.size == 0 or len(A) == 0 or len(B) == 0:
        raise EmptySet("Hausdorff distance needs two non-empty sets")
    dab, _ = cKDTree(B).query(A)
    dba, _ = cKDTree(A).query(B)
    return float(max(dab.max(), dba.max()))


def sample_directions(germ: GermSpec, r: float, N: int, seed: int, w: float = 0.05) -> DirectionCloud:
    cloud = sample_shell(germ, r, N, w, seed)
    P = cloud.points
    return DirectionCloud(float(r), P / np.linalg.norm(P, axis=1, keepdims=True))


def link_sample(germ: GermSpec, r: float, N: int, seed: int) -> np.ndarray:
    """Points of the germ on the sphere S(0, r)."""
    P, ok = link_tracks(germ, r, N, seed)
    P = P[ok]
    if len(P) == 0:
        raise EmptyShell(f"{germ.name}: no points on the sphere of radius {r:.3g}")
    return P * (r / np.linalg.norm(P, axis=1))[:, None]


def farthest_point_subsample(points, k, merge_tol=0.0, start=0):
    """Greedy farthest-point traversal; stops at k points or when the next point is within merge_tol."""
    P = np.asarray(points, dtype=float)
    if len(P) == 0:
        return P
    chosen = [start]
    dist = np.linalg.norm(P - P[start], axis=1)
    while len(chosen) < min(k, len(P)):
        j = int(np.argmax(dist))
        if dist[j] <= merge_tol:
            break
        chosen.append(j)
        dist = np.minimum(dist, np.linalg.norm(P - P[j], axis=1))
    return P[chosen]


def _cloud_gap(D):
    """Sampling gap of a direction cloud; 0 for finite direction sets (tracks that coincide)."""
    u = np.unique(np.round(D, 12), axis=0)
    if len(u) < max(2, len(D) // 2):
        return 0.0
    d, _ = cKDTree(u).query(u, k=2)
    return float(np.quantile(d[:, 1], 0.99))


def _fit_limits(radii, series):
    """Extrapolate each track to rho -> 0 with one model shared by all tracks.

    ``series`` has shape (steps, tracks, n).  Candidates: constant,
    ``c + b rho^k`` over a small grid of k, and ``c + b s + e s^2`` with
    ``s = 1/|log rho|`` (the slow approach of log-type germs).  The model
    with the lowest BIC wins.
    """
    rho = np.asarray(radii, dtype=float)
    T, M, n = series.shape
    Y = series.reshape(T, M * n)
    dev = np.abs(Y - Y.mean(axis=0)).max()
    if T < 3 or dev <= 1e-12:
        return Y.mean(axis=0).reshape(M, n), "constant", 0.0
    cands = [("constant", np.ones((T, 1)))]
    for k in KAPPAS:
        cands.append((f"power(k={k:g})", np.c_[np.ones(T), rho ** k]))
    s = 1.0 / np.abs(np.log(rho))
    cands.append(("log-poly", np.c_[np.ones(T), s, s * s]))
    N = Y.size
    best = None
    for name, A in cands:
        if A.shape[1] >= T:
            continue
        coef, *_ = np.linalg.lstsq(A, Y, rcond=None)
        rss = float(np.sum((A @ coef - Y) ** 2))
        bic = N * np.log(max(rss / N, 1e-300)) + A.shape[1] * M * n * np.log(N)
        if best is None or bic < best[0]:
            best = (bic, name, coef[0], A)
    _, name, c, A = best
    # stability of the intercept when only the finer half of the ladder is used
    h = T // 2
    spread = 0.0
    if name != "constant" and T - h >= A.shape[1] + 1:
        coef2, *_ = np.linalg.lstsq(A[h:], Y[h:], rcond=None)
        spread = float(np.max(np.linalg.norm((coef2[0] - c).reshape(M, n), axis=1)))
    return c.reshape(M, n), name, spread


def _normalize(V):
    nv = np.linalg.norm(V, axis=1, keepdims=True)
    return V / np.where(nv > 0, nv, 1.0)


def _merge_clusters(P, tol):
    """Replace groups of points closer than ``tol`` (single linkage) by their normalized mean."""
    if len(P) <= 1 or tol <= 0:
        return P
    pairs = cKDTree(P).query_pairs(tol, output_type="ndarray")
    parent = np.arange(len(P))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = np.array([find(i) for i in range(len(P))])
    out = [P[roots == r].mean(axis=0) for r in np.unique(roots)]
    return _normalize(np.array(out))


def tangent_cone_estimate(germ: GermSpec, r_start: float = 0.1, decades: float = 4, steps_per_decade: int = 2,
                          N: int = 400, tol="auto", seed: int = 0, target: int = 200):
    """Follow link directions down a radius ladder and extract the limit cone.

    Returns ``(trace, cone_germ)`` and raises NotConverged otherwise.
    Convergence holds when the last two consecutive Hausdorff distances are
    within ``tol`` or when the extrapolated per-track limit is stable within
    ``tol``; the trace records which.
    """
    if decades < 2:
        raise ValueError("the ladder must descend at least two decades")
    steps = int(round(decades * steps_per_decade))
    radii = [r_start * 10.0 ** (-j / steps_per_decade) for j in range(steps + 1)]
    clouds, oks = [], []
    start = None
    for rho in radii:
        P, ok = link_tracks(germ, rho, N, seed, start)
        clouds.append(_normalize(P))
        oks.append(ok)
        if isinstance(germ, ZeroSetGerm):
            start = np.where(ok[:, None], _normalize(P), start if start is not None else _normalize(P))
    if not any(o.any() for o in oks):
        raise EmptyShell(f"{germ.name}: the ladder never meets the germ")
    dsets = [c[o] for c, o in zip(clouds, oks)]
    if any(len(d) == 0 for d in dsets):
        raise EmptyShell(f"{germ.name}: some ladder radius has an empty link")
    H = [hausdorff_distance(a, b) for a, b in zip(dsets[:-1], dsets[1:])]
    gap = max(_cloud_gap(d) for d in dsets[-3:])
    tol_v = max(3.0 * gap, TOL_FLOOR) if tol == "auto" else float(tol)
    raw = len(H) >= 2 and H[-1] <= tol_v and H[-2] <= tol_v

    common = np.logical_and.reduce(oks)
    model, spread = "constant", 0.0
    if common.any():
        series = np.stack([c[common] for c in clouds])
        limits, model, spread = _fit_limits(radii, series)
    converged = raw or (common.any() and spread <= tol_v)
    if model == "constant":
        # nothing to extrapolate: the last cloud is the limit
        uniq = np.unique(np.round(dsets[-1], 12), axis=0)
        sub = farthest_point_subsample(uniq, target, 0.0)
    else:
        # limits closer than the tolerance plus twice their own instability are not distinguishable
        merge = tol_v + 2.0 * spread
        uniq = np.unique(np.round(_normalize(limits), 12), axis=0)
        sub = farthest_point_subsample(_merge_clusters(uniq, merge), target, merge)
    notes = []
    if not raw and converged:
        notes.append("raw Hausdorff steps exceed tol; convergence certified by a stable extrapolated limit")
    trace = ConvergenceTrace(radii, H, float(tol_v), float(gap), bool(converged), sub, model, float(spread),
                             bool(raw), notes)
    if not converged:
        raise NotConverged(trace)
    cone = ConeGerm(f"C0({germ.name})", germ.ambient_dim, link_points=_normalize(sub))
    return trace, cone
