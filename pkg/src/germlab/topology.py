"""Betti numbers b0, b1 over Z/2 of sampled links via Rips 2-complexes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .cone import farthest_point_subsample, link_sample
from .errors import EmptyLink, UnstableScale
from .germs import ConeGerm, GermSpec
from .oracle import build_oracle, cone_distance
from .sampling import derive_seed, unit_sphere

MAX_VERTICES = 500
EPS_FACTORS = (2.0, 3.0, 4.0)


@dataclass
class RipsComplex:
    vertices: np.ndarray
    eps: float
    edges: list
    triangles: list

    @property
    def counts(self):
        return len(self.vertices), len(self.edges), len(self.triangles)


@dataclass
class BettiReport:
    b0: int
    b1: int
    eps: float
    vertices: int
    edges: int
    triangles: int
    stable: bool
    necessary_condition_only: bool = True
    notes: list = field(default_factory=list)

    @property
    def betti(self):
        return (self.b0, self.b1)

    def to_dict(self):
        return {
            "b0": self.b0,
            "b1": self.b1,
            "eps": self.eps,
            "vertices": self.vertices,
            "edges": self.edges,
            "triangles": self.triangles,
            "stable": self.stable,
            "necessary_condition_only": self.necessary_condition_only,
            "notes": list(self.notes),
        }


def build_rips(points, eps: float) -> RipsComplex:
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if len(P) == 0 or P.size == 0:
        return RipsComplex(np.zeros((0, P.shape[1] if P.ndim == 2 else 1)), float(eps), [], [])
    pairs = cKDTree(P).query_pairs(eps, output_type="ndarray") if eps > 0 else np.zeros((0, 2), int)
    edges = sorted((int(min(a, b)), int(max(a, b))) for a, b in pairs)
    nbr = [set() for _ in range(len(P))]
    for a, b in edges:
        nbr[a].add(b)
        nbr[b].add(a)
    tris = []
    for a, b in edges:
        for c in nbr[a] & nbr[b]:
            if c > b:
                tris.append((a, b, c))
    tris.sort()
    return RipsComplex(P, float(eps), edges, tris)


def complex_from(vertex_count, edges, triangles=()):
    """Abstract 2-complex on ``range(vertex_count)``; triangles must have their edges listed."""
    E = sorted({(min(a, b), max(a, b)) for a, b in edges})
    T = sorted({tuple(sorted(t)) for t in triangles})
    return RipsComplex(np.zeros((vertex_count, 0)), 0.0, E, T)


def betti0(c: RipsComplex) -> int:
    V = len(c.vertices)
    parent = list(range(V))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    comps = V
    for a, b in c.edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
            comps -= 1
    return comps


def rank_z2(columns) -> int:
    """Rank over Z/2 of a matrix given as a list of integer bitsets (one per column)."""
    pivots = {}
    rank = 0
    for col in columns:
        while col:
            low = col.bit_length() - 1
            if low in pivots:
                col ^= pivots[low]
            else:
                pivots[low] = col
                rank += 1
                break
    return rank


def boundary1_columns(c: RipsComplex):
    return [(1 << a) | (1 << b) for a, b in c.edges]


def boundary2_columns(c: RipsComplex):
    index = {e: i for i, e in enumerate(c.edges)}
    return [(1 << index[(a, b)]) | (1 << index[(a, t)]) | (1 << index[(b, t)]) for a, b, t in c.triangles]


def betti0_by_rank(c: RipsComplex) -> int:
    return len(c.vertices) - rank_z2(boundary1_columns(c))


def betti1(c: RipsComplex) -> int:
    return len(c.edges) - len(c.vertices) + betti0(c) - rank_z2(boundary2_columns(c))


def _gap(P):
    u = np.unique(np.round(P, 12), axis=0)
    if len(u) < 2:
        return 0.0, u
    d, _ = cKDTree(u).query(u, k=2)
    return float(d[:, 1].max()), u


def _prepare(P, limit=MAX_VERTICES):
    u = np.unique(np.round(np.asarray(P, dtype=float), 12), axis=0)
    if len(u) > limit:
        u = farthest_point_subsample(u, limit)
    return u


def betti_at_auto_scale(P, finite_set=False, eps=None) -> BettiReport:
    """Smallest eps in {2,3,4} x gap whose (b0, b1) agrees with 1.5 eps."""
    if len(P) == 0:
        raise EmptyLink("empty link sample")
    gap, u = _gap(P)
    if eps is not None:
        cands = [float(eps)]
    elif finite_set or gap == 0.0:
        # isolated directions: any scale below their separation is faithful
        scale = float(np.max(np.linalg.norm(P, axis=1))) or 1.0
        cands = [1e-9 * scale]
    else:
        cands = [f * gap for f in EPS_FACTORS]
    for e in cands:
        c1, c2 = build_rips(P, e), build_rips(P, 1.5 * e)
        b = (betti0(c1), betti1(c1))
        if b == (betti0(c2), betti1(c2)) or eps is not None:
            V, E, T = c1.counts
            return BettiReport(b[0], b[1], float(e), V, E, T, b == (betti0(c2), betti1(c2)))
    raise UnstableScale(f"no stable scale among eps = {[round(c, 6) for c in cands]}")


def _is_finite_sample(raw, unique):
    return len(unique) < max(2, len(raw) // 2)


def link_betti(germ: GermSpec, r: float = 0.1, N: int = 400, eps_policy="auto", seed: int = 0) -> BettiReport:
    raw = link_sample(germ, r, N, seed)
    P = _prepare(raw)
    eps = None if eps_policy == "auto" else float(eps_policy)
    return betti_at_auto_scale(P, _is_finite_sample(raw, np.unique(np.round(raw, 12), axis=0)), eps)


def st_link_betti(germ: GermSpec, st, r: float = 0.05, N: int = 4000, seed: int = 0,
                  eps_policy="auto") -> BettiReport:
    """Betti numbers of ``S(0, r) cap ST_d(germ, C)`` from a uniform sphere sample."""
    rng = np.random.default_rng(derive_seed(seed, 11))
    S = unit_sphere(rng, N, germ.ambient_dim) * r
    thr = st.C * r ** st.d
    if isinstance(germ, ConeGerm):
        keep = cone_distance(germ, S) <= thr
    else:
        oracle = build_oracle(germ, r / 2, min(1.0, 2 * r), 8, 4000, derive_seed(seed, 12))
        d, _ = oracle.query(S)
        keep = d <= thr
    P = S[keep]
    if len(P) == 0:
        raise EmptyLink(f"no sphere point of radius {r:.3g} lies in the sea-tangle neighborhood")
    eps = None if eps_policy == "auto" else float(eps_policy)
    rep = betti_at_auto_scale(_prepare(P), False, eps)
    if st.C * r ** (st.d - 1) >= 2.0:
        rep.notes.append("degenerate width: the band covers the whole sphere")
    return rep


def compare_links(germA, germB, r=0.1, N=400, seed=0):
    a = link_betti(germA, r, N, seed=seed)
    b = link_betti(germB, r, N, seed=seed)
    return {
        "A": {"germ": germA.name, "betti": [a.b0, a.b1], "report": a.to_dict()},
        "B": {"germ": germB.name, "betti": [b.b0, b.b1], "report": b.to_dict()},
        "equal": a.betti == b.betti,
        "necessary_condition_only": True,
    }
