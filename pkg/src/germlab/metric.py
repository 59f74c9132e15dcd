"""Inner versus outer distance, LNE scans and Holder modulus fits."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, dijkstra
from scipy.spatial import cKDTree

from .errors import DegenerateWindow, DisconnectedWarning, InsufficientPairs, Unreachable
from .fitting import ScalingFit, fit_power_law
from .germs import GermSpec
from .oracle import ladder, max_nn_gap
from .sampling import ShellCloud, derive_seed, pmap, sample_shell

LNE_CONSISTENT = "LNE-consistent"
NOT_LNE_POLY = "not-LNE (polynomial)"
NOT_LNE_SLOW = "not-LNE (slow divergence)"
INCONCLUSIVE = "inconclusive"


@dataclass
class NeighborhoodGraph:
    vertices: np.ndarray
    eps: float
    adjacency: object  # scipy sparse csr, symmetric
    origin: int | None = None
    relative: bool = False

    @property
    def edge_count(self):
        return int(self.adjacency.nnz // 2)

    def components(self):
        return connected_components(self.adjacency, directed=False)


def _as_points(clouds):
    parts = []
    for c in clouds:
        parts.append(c.points if isinstance(c, ShellCloud) else np.atleast_2d(np.asarray(c, dtype=float)))
    return np.vstack(parts) if parts else np.zeros((0, 1))


def build_neighborhood_graph(clouds, eps: float, include_origin: bool = True, relative: bool = False,
                             hub_radius: float | None = None, gap: float | None = None) -> NeighborhoodGraph:
    """Edges join points at distance <= eps, weighted by that distance.

    With ``relative=True`` the threshold between p and q is
    ``eps * max(|p|, |q|)``, which keeps multi-scale clouds connected without
    shortcuts near the origin.  ``hub_radius`` joins the origin vertex to every
    point of norm below it, closing paths that would otherwise have to cross
    unsampled scales.
    """
    P = _as_points(clouds)
    n = P.shape[1]
    if include_origin:
        P = np.vstack([P, np.zeros((1, n))])
    V = len(P)
    if gap is not None and not relative and eps <= 2 * gap:
        warnings.warn(f"eps={eps:.3g} is not above twice the sampling gap {gap:.3g}", DisconnectedWarning)
    rows, cols = [], []
    if eps > 0 and V > 1:
        tree = cKDTree(P, balanced_tree=False)
        if relative:
            nr = np.linalg.norm(P, axis=1)
            hits = tree.query_ball_point(P, eps * nr)
            for i, js in enumerate(hits):
                if js:
                    rows.extend([i] * len(js))
                    cols.extend(js)
        else:
            pairs = tree.query_pairs(eps, output_type="ndarray")
            if len(pairs):
                rows.extend(pairs[:, 0].tolist())
                cols.extend(pairs[:, 1].tolist())
    if include_origin and hub_radius:
        nr = np.linalg.norm(P[:-1], axis=1)
        hub = np.flatnonzero(nr <= hub_radius)
        rows.extend(hub.tolist())
        cols.extend([V - 1] * len(hub))
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    keep = rows != cols
    rows, cols = rows[keep], cols[keep]
    r2 = np.concatenate([rows, cols])
    c2 = np.concatenate([cols, rows])
    w = np.linalg.norm(P[r2] - P[c2], axis=1) if len(r2) else np.zeros(0)
    A = coo_matrix((w, (r2, c2)), shape=(V, V)).tocsr()
    # duplicates from the symmetric insertion are collapsed to a single weight
    A.sum_duplicates()
    if len(r2):
        A.data = np.linalg.norm(P[A.indices] - P[np.repeat(np.arange(V), np.diff(A.indptr))], axis=1)
    g = NeighborhoodGraph(P, float(eps), A, V - 1 if include_origin else None, relative)
    _check_connected(g)
    return g


def _check_connected(g):
    V = len(g.vertices)
    if V <= 1:
        return
    _, labels = g.components()
    ref = labels[g.origin] if g.origin is not None else np.bincount(labels).argmax()
    missing = float(np.mean(labels != ref))
    if missing > 0.01:
        warnings.warn(
            f"{100 * missing:.1f}% of vertices are disconnected from the reference component",
            DisconnectedWarning,
        )


def inner_distance(g: NeighborhoodGraph, p: int, q: int) -> float:
    if p == q:
        return 0.0
    d = dijkstra(g.adjacency, directed=False, indices=p)
    if not np.isfinite(d[q]):
        raise Unreachable(f"vertices {p} and {q} lie in different components")
    return float(max(d[q], np.linalg.norm(g.vertices[p] - g.vertices[q])))


def inner_distances_from(g: NeighborhoodGraph, sources) -> np.ndarray:
    return dijkstra(g.adjacency, directed=False, indices=np.asarray(sources))


# --------------------------------------------------------------------------
# LNE scan

@dataclass
class LNEReport:
    germ: str
    pairs: np.ndarray  # columns shell_r, d_out, d_in
    fit: ScalingFit
    ratio_by_shell: list
    verdict: str
    growth: float
    model: str
    thresholds: dict
    eps_rel: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def beta(self):
        return self.fit.slope

    def to_dict(self):
        return {
            "germ": self.germ,
            "verdict": self.verdict,
            "beta": self.fit.slope,
            "fit": self.fit.to_dict(),
            "ratio_by_shell": [[float(r), float(q)] for r, q in self.ratio_by_shell],
            "ratio_growth": self.growth,
            "ratio_model": self.model,
            "thresholds": self.thresholds,
            "eps_rel": self.eps_rel,
            "pair_count": int(len(self.pairs)),
            "diagnostics": self.diagnostics,
        }


DEFAULT_LNE_THRESHOLDS = {"beta_lne": 0.95, "beta_poly": 0.9, "growth": 2.0}


def _model_sse(r, q):
    """Compare ``q = a + b |log r|`` against ``q = c r^e`` in log-ratio space."""
    x = np.abs(np.log(r))
    y = np.log(q)
    A = np.vstack([np.ones_like(x), x]).T
    coef, *_ = np.linalg.lstsq(A, q, rcond=None)
    pred = A @ coef
    if np.any(pred <= 0):
        sse_log = np.inf
    else:
        sse_log = float(np.sum((np.log(pred) - y) ** 2))
    B = np.vstack([np.ones_like(x), np.log(r)]).T
    c2, *_ = np.linalg.lstsq(B, y, rcond=None)
    sse_pow = float(np.sum((B @ c2 - y) ** 2))
    return sse_log, sse_pow


def classify_lne(beta, radii, ratios, thresholds=None):
    th = dict(DEFAULT_LNE_THRESHOLDS, **(thresholds or {}))
    radii = np.asarray(radii, float)
    ratios = np.asarray(ratios, float)
    order = np.argsort(radii)
    radii, ratios = radii[order], ratios[order]
    growth = float(ratios[0] / ratios[-1])
    sse_log, sse_pow = _model_sse(radii, ratios) if len(radii) >= 3 else (np.inf, np.inf)
    model = "log" if sse_log <= sse_pow else "power"
    if growth < th["growth"] and beta >= th["beta_lne"]:
        return LNE_CONSISTENT, growth, model
    if growth >= th["growth"]:
        if model == "log":
            return NOT_LNE_SLOW, growth, model
        if beta <= th["beta_poly"]:
            return NOT_LNE_POLY, growth, model
        return INCONCLUSIVE, growth, model
    if beta <= th["beta_poly"]:
        return NOT_LNE_POLY, growth, model
    return INCONCLUSIVE, growth, model


def multiscale_cloud(germ, r_lo, r_hi, per_decade, N, seed, w=None):
    from .oracle import default_width

    w = default_width(per_decade) if w is None else w
    radii = ladder(r_lo, r_hi, per_decade)
    shells = pmap(lambda j: sample_shell(germ, radii[j], N, w, derive_seed(seed, j)), range(len(radii)))
    return shells, w


def lne_scan(germ: GermSpec, radii, pairs_per_shell: int = 40, eps_policy="auto", seed: int = 0,
             points_per_shell: int = 1000, depth_decades: float = 3.0, per_decade: int = 4,
             thresholds=None) -> LNEReport:
    """Sample same-shell pairs, compare graph-geodesic and Euclidean distances.

    ``radii`` are the scan shells.  The vertex cloud is a multi-scale ladder
    from ``min(radii) * 10^-depth_decades`` up to ``1.5 * max(radii)`` plus the
    origin, so pairs on branches that meet only at 0 are routed through it.
    For each random source the partner with the worst ratio within the same
    shell is recorded.
    """
    radii = sorted(float(r) for r in radii)
    if len(radii) < 2:
        raise InsufficientPairs("need at least two scan radii")
    r_lo = radii[0] * 10.0 ** (-depth_decades)
    r_hi = min(1.0, 1.5 * radii[-1])
    shells, w = multiscale_cloud(germ, r_lo, r_hi, per_decade, points_per_shell, derive_seed(seed, 1))
    P = np.vstack([s.points for s in shells])
    rel_gap = max(max_nn_gap(s.points) / s.r for s in shells)
    eps_rel = 2.5 * rel_gap if eps_policy == "auto" else float(eps_policy)
    hub = shells[0].r * (1 + w)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DisconnectedWarning)
        g = build_neighborhood_graph([P], eps_rel, include_origin=True, relative=True, hub_radius=hub)
    for c in caught:
        warnings.warn(c.message, c.category)

    nr = np.linalg.norm(g.vertices, axis=1)
    rng = np.random.default_rng(derive_seed(seed, 2))
    rows = []
    ratio_by_shell = []
    for r in radii:
        members = np.flatnonzero((nr >= r * (1 - w)) & (nr <= r * (1 + w)))
        if len(members) < 2:
            continue
        src = rng.choice(members, size=min(pairs_per_shell, len(members)), replace=False)
        D = inner_distances_from(g, src)
        worst = 0.0
        for k, s in enumerate(src):
            others = members[members != s]
            dout = np.linalg.norm(g.vertices[others] - g.vertices[s], axis=1)
            din = D[k, others]
            ok = np.isfinite(din) & (dout > 0)
            if not np.any(ok):
                continue
            din = np.maximum(din[ok], dout[ok])
            ratio = din / dout[ok]
            j = int(np.argmax(ratio))
            rows.append((r, float(dout[ok][j]), float(din[j])))
            worst = max(worst, float(ratio[j]))
        if worst > 0:
            ratio_by_shell.append((r, worst))
    if len(rows) < 10 or len(ratio_by_shell) < 2:
        raise InsufficientPairs(f"only {len(rows)} connected pairs on {len(ratio_by_shell)} shells")
    pairs = np.array(rows)
    fit = fit_power_law(pairs[:, 1:3], min_decades=0.0)
    rr = [q[0] for q in ratio_by_shell]
    qq = [q[1] for q in ratio_by_shell]
    verdict, growth, model = classify_lne(fit.slope, rr, qq, thresholds)
    th = dict(DEFAULT_LNE_THRESHOLDS, **(thresholds or {}))
    return LNEReport(germ.name, pairs, fit, ratio_by_shell, verdict, growth, model, th, eps_rel,
                     {"vertices": int(len(g.vertices)), "edges": g.edge_count})


# --------------------------------------------------------------------------
# Holder modulus

@dataclass
class HolderFit:
    alpha_upper: float
    L_upper: float
    alpha_lower: float
    L_lower: float
    upper_fit: ScalingFit
    lower_fit: ScalingFit
    window: tuple
    bins: list
    worst_upper_pair: tuple
    worst_lower_pair: tuple
    pair_count: int

    def required_constants(self, alpha):
        """Per-bin constants needed for the upper and lower bounds at exponent ``alpha``."""
        s = np.array([b["s"] for b in self.bins])
        up = np.array([b["max_image"] / b["s_max"] ** alpha for b in self.bins])
        lo = np.array([b["s_min"] ** (1.0 / alpha) / b["min_image"] for b in self.bins])
        return s, up, lo

    def growth(self, alpha):
        """Factor by which the required constants grow from the coarse to the fine end of the window."""
        s, up, lo = self.required_constants(alpha)
        x = np.log(s)
        span = x.max() - x.min()
        out = []
        for K in (up, lo):
            slope = np.polyfit(x, np.log(K), 1)[0]
            out.append(float(np.exp(-slope * span)))
        return tuple(out)

    def verdict(self, alpha, growth_limit=2.0):
        gu, gl = self.growth(alpha)
        s, up, lo = self.required_constants(alpha)
        return {
            "alpha": alpha,
            "bi_holder": bool(gu < growth_limit and gl < growth_limit),
            "L": float(max(up.max(), lo.max())),
            "upper_growth": gu,
            "lower_growth": gl,
            "growth_limit": growth_limit,
        }

    def to_dict(self):
        return {
            "alpha_upper": self.alpha_upper,
            "L_upper": self.L_upper,
            "alpha_lower": self.alpha_lower,
            "L_lower": self.L_lower,
            "upper_fit": self.upper_fit.to_dict(),
            "lower_fit": self.lower_fit.to_dict(),
            "window": list(self.window),
            "worst_upper_pair": list(self.worst_upper_pair),
            "worst_lower_pair": list(self.worst_lower_pair),
            "pair_count": self.pair_count,
        }


def _map_images(h, X):
    if callable(h):
        return np.atleast_2d(np.asarray(h(X), dtype=float))
    from .expr import evaluate_columns, parse_expression

    n = X.shape[1]
    names = ["x", "y", "z", "w"][:n] if n <= 4 else [f"x{i + 1}" for i in range(n)]
    exprs = [parse_expression(e, names) if isinstance(e, str) else e for e in h]
    Y, ok = evaluate_columns(exprs, names, X, strict=False)
    Y[~ok] = np.nan
    return Y


def holder_modulus_fit(h, X_samples, seed: int = 0, window=None, bins: int = 16,
                       max_pairs: int = 400000) -> HolderFit:
    """Fit upper and lower Holder envelopes of ``h`` on the sample.

    ``h`` is a callable on (N, n) arrays, a list of coordinate expressions, or
    None when ``X_samples`` is a pair ``(X, Y)`` of matched samples.
    """
    if h is None:
        X, Y = (np.atleast_2d(np.asarray(a, dtype=float)) for a in X_samples)
    else:
        X = np.atleast_2d(np.asarray(X_samples, dtype=float))
        if X.shape[0] == 1 and X.shape[1] > 1 and np.ndim(X_samples) == 1:
            X = X.T
        Y = _map_images(h, X)
    if len(X) != len(Y):
        raise ValueError("X and Y must have the same number of rows")
    # points where the map is undefined (e.g. log at 0) are dropped
    finite = np.isfinite(Y).all(axis=1) & np.isfinite(X).all(axis=1)
    X, Y = X[finite], Y[finite]
    N = len(X)
    iu, ju = np.triu_indices(N, 1)
    if len(iu) > max_pairs:
        rng = np.random.default_rng(seed)
        pick = rng.choice(len(iu), size=max_pairs, replace=False)
        iu, ju = iu[pick], ju[pick]
    sep = np.linalg.norm(X[iu] - X[ju], axis=1)
    img = np.linalg.norm(Y[iu] - Y[ju], axis=1)
    ok = (sep > 0) & (img > 0)
    iu, ju, sep, img = iu[ok], ju[ok], sep[ok], img[ok]
    if window is None:
        hi = 0.5 * sep.max()
        window = (hi / 100.0, hi)
    lo_s, hi_s = window
    inw = (sep >= lo_s) & (sep <= hi_s)
    if inw.sum() < 100:
        raise DegenerateWindow(f"only {int(inw.sum())} pairs in the separation window")
    if np.log10(hi_s / lo_s) < 2 - 1e-9:
        raise DegenerateWindow("separations must span at least two decades")
    iu, ju, sep, img = iu[inw], ju[inw], sep[inw], img[inw]
    edges = np.geomspace(lo_s, hi_s, bins + 1)
    which = np.clip(np.searchsorted(edges, sep, side="right") - 1, 0, bins - 1)
    table = []
    ratio = img / sep
    for b in range(bins):
        m = np.flatnonzero(which == b)
        if m.size == 0:
            continue
        hi_k = m[np.argmax(ratio[m])]
        lo_k = m[np.argmin(ratio[m])]
        table.append({
            "s": float(np.sqrt(edges[b] * edges[b + 1])),
            "s_max": float(sep[hi_k]),
            "max_image": float(img[hi_k]),
            "s_min": float(sep[lo_k]),
            "min_image": float(img[lo_k]),
            "count": int(m.size),
        })
    if len(table) < 4:
        raise DegenerateWindow("too few populated separation bins")
    up = fit_power_law([(t["s_max"], t["max_image"]) for t in table], min_decades=1.0, min_count=4)
    lo = fit_power_law([(t["s_min"], t["min_image"]) for t in table], min_decades=1.0, min_count=4)
    a_up = up.slope
    a_lo = 1.0 / lo.slope if lo.slope > 0 else float("inf")
    q_up = img / sep ** a_up
    k_up = int(np.argmax(q_up))
    q_lo = sep ** (1.0 / a_lo) / img if np.isfinite(a_lo) else np.zeros_like(sep)
    k_lo = int(np.argmax(q_lo))
    return HolderFit(
        alpha_upper=float(a_up),
        L_upper=float(q_up[k_up]),
        alpha_lower=float(a_lo),
        L_lower=float(q_lo[k_lo]),
        upper_fit=up,
        lower_fit=lo,
        window=(float(lo_s), float(hi_s)),
        bins=table,
        worst_upper_pair=(int(iu[k_up]), int(ju[k_up])),
        worst_lower_pair=(int(iu[k_lo]), int(ju[k_lo])),
        pair_count=int(len(sep)),
    )
