"""Approximate distance-to-germ queries backed by a ladder of shell clouds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import OutOfCoverage
from .expr import evaluate_columns
from .germs import ConeGerm, GermSpec, GraphGerm, ProductGerm, UnionGerm, ZeroSetGerm
from .sampling import ShellCloud, derive_seed, pmap, sample_shell

GAP_SAFETY = 2.0


def ladder(r_min, r_max, per_decade):
    """Radii ``r_min * 10^(j/per_decade)`` up to and including ``r_max`` (within rounding)."""
    span = np.log10(r_max / r_min) * per_decade
    J = int(np.floor(span + 1e-9))
    return [float(r_min * 10.0 ** (j / per_decade)) for j in range(J + 1)]


def default_width(per_decade):
    q = 10.0 ** (1.0 / per_decade)
    return min(0.9, 1.1 * (q - 1) / (q + 1))


def max_nn_gap(points):
    if len(points) < 2:
        return 0.0
    d, _ = cKDTree(points, balanced_tree=False).query(points, k=2)
    return float(np.max(d[:, 1]))


def cone_distance(germ: ConeGerm, P):
    """Exact distance from points to a cone over finitely many unit vectors."""
    V = germ.link_points
    t = np.maximum(P @ V.T, 0.0)
    best = np.full(len(P), np.inf)
    for k in range(len(V)):
        best = np.minimum(best, np.linalg.norm(P - t[:, k:k + 1] * V[k], axis=1))
    return best


def exact_upper_bound(germ: GermSpec, P):
    """Distance to some explicit germ point, or inf where none is at hand.

    Graphs use the vertical residual |y - g(u)|, cones are exact, and a
    region without equations or inequalities is all of R^n.
    """
    P = np.atleast_2d(P)
    if isinstance(germ, ConeGerm):
        return cone_distance(germ, P)
    if isinstance(germ, GraphGerm):
        k = germ.base_dim
        if not germ.exprs:
            return np.zeros(len(P))
        U = P[:, :k]
        G, ok = evaluate_columns(germ.exprs, germ.variables, U, strict=False)
        out = np.full(len(P), np.inf)
        ok &= np.linalg.norm(U, axis=1) <= 1.0
        out[ok] = np.linalg.norm(P[ok, k:] - G[ok], axis=1)
        return out
    if isinstance(germ, ZeroSetGerm) and not germ.exprs and not germ.inequalities:
        return np.zeros(len(P))
    if isinstance(germ, UnionGerm):
        return np.min([exact_upper_bound(q, P) for q in germ.parts], axis=0)
    if isinstance(germ, ProductGerm):
        m = germ.inner.ambient_dim
        return np.hypot(exact_upper_bound(germ.inner, P[:, :m]), np.linalg.norm(P[:, m:], axis=1))
    return np.full(len(P), np.inf)


@dataclass
class DistanceOracle:
    germ: GermSpec
    shells: list
    gaps: np.ndarray
    r_min: float
    r_max: float
    tree: cKDTree
    points: np.ndarray

    @property
    def radii(self):
        return np.array([s.r for s in self.shells])

    @property
    def coverage(self):
        return 0.5 * self.r_min, 2.0 * self.r_max

    def covered(self, P):
        nr = np.linalg.norm(np.atleast_2d(P), axis=1)
        lo, hi = self.coverage
        return (nr >= lo) & (nr <= hi)

    def shell_gap(self, norms):
        """Error bound per query norm.

        The smallest gap among shells whose band contains the norm, times
        GAP_SAFETY (the max nearest-neighbour gap is not a fill distance).
        Norms outside every band add their radial distance to the nearest band.
        """
        norms = np.atleast_1d(np.asarray(norms, dtype=float))
        R = self.radii
        W = np.array([s.w for s in self.shells])
        lo, hi = R * (1 - W), R * (1 + W)
        x = norms[:, None]
        inside = (x >= lo[None, :]) & (x <= hi[None, :])
        G = np.where(inside, self.gaps[None, :], np.inf).min(axis=1)
        out = ~np.isfinite(G)
        if out.any():
            radial = np.maximum(lo[None, :] - x[out], x[out] - hi[None, :])
            G[out] = np.min(self.gaps[None, :] * GAP_SAFETY + radial, axis=1) / GAP_SAFETY
        return GAP_SAFETY * G

    def query(self, P, check=True):
        P = np.atleast_2d(np.asarray(P, dtype=float))
        if check and not np.all(self.covered(P)):
            bad = P[~self.covered(P)][0]
            raise OutOfCoverage(
                f"|p| = {np.linalg.norm(bad):.3g} outside oracle coverage "
                f"[{self.coverage[0]:.3g}, {self.coverage[1]:.3g}]"
            )
        d, _ = self.tree.query(P)
        return np.minimum(d, exact_upper_bound(self.germ, P)), self.shell_gap(np.linalg.norm(P, axis=1))

    def query_bounded(self, P, bound, check=True, groups=24):
        """Like ``query`` but distances above ``bound`` (per point) come back as inf.

        Points are grouped by bound so each group runs one pruned tree search;
        far points are then rejected quickly.
        """
        P = np.atleast_2d(np.asarray(P, dtype=float))
        if check and not np.all(self.covered(P)):
            raise OutOfCoverage("query outside oracle coverage")
        bound = np.broadcast_to(np.asarray(bound, dtype=float), (len(P),))
        d = np.full(len(P), np.inf)
        if len(P):
            order = np.argsort(bound)
            for chunk in np.array_split(order, min(groups, len(P))):
                if chunk.size == 0:
                    continue
                ub = float(bound[chunk].max())
                dc, _ = self.tree.query(P[chunk], distance_upper_bound=ub * (1 + 1e-12))
                d[chunk] = dc
            d = np.minimum(d, exact_upper_bound(self.germ, P))
            d[d > bound] = np.inf
        return d, self.shell_gap(np.linalg.norm(P, axis=1))

    def dist(self, p):
        d, e = self.query(p)
        return float(d[0]), float(e[0])


def build_oracle(germ: GermSpec, r_min: float, r_max: float, shells_per_decade: int = 4,
                 N_per_shell: int = 2000, seed: int = 0, w: float | None = None) -> DistanceOracle:
    if not 0 < r_min < r_max <= 1:
        raise ValueError("need 0 < r_min < r_max <= 1")
    w = default_width(shells_per_decade) if w is None else w
    radii = ladder(r_min, r_max, shells_per_decade)

    def one(j):
        return sample_shell(germ, radii[j], N_per_shell, w, derive_seed(seed, j))

    shells: list[ShellCloud] = pmap(one, range(len(radii)))
    gaps = np.array([max_nn_gap(s.points) for s in shells])
    pts = np.vstack([s.points for s in shells])
    return DistanceOracle(germ, shells, gaps, float(r_min), float(r_max), cKDTree(pts, balanced_tree=False), pts)


def distance_to_germ(oracle: DistanceOracle, p) -> tuple[float, float]:
    return oracle.dist(p)
