"""Holder extensions of sampled maps and the ambient maps Phi, Psi built from them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWindow, DimensionMismatch, HolderViolation
from .sampling import derive_seed, unit_sphere

SAFETY = 1.05
BOUNDED_GROWTH = 1.5
_CHUNK = 2_000_000


def _pairwise_ratio_max(A, B, alpha):
    """max over i<j of |B_i - B_j| / |A_i - A_j|^alpha, with the witness pair."""
    n = len(A)
    best, wit = 0.0, (0, 0)
    rows = max(1, _CHUNK // max(n, 1))
    for s in range(0, n, rows):
        i = np.arange(s, min(n, s + rows))
        dA = np.linalg.norm(A[i, None, :] - A[None, :, :], axis=2)
        dB = np.linalg.norm(B[i, None, :] - B[None, :, :], axis=2)
        mask = np.arange(n)[None, :] > i[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            R = np.where(mask & (dA > 0), dB / dA ** alpha, 0.0)
        k = int(np.argmax(R))
        if R.flat[k] > best:
            best = float(R.flat[k])
            wit = (int(i[k // n]), int(k % n))
    return best, wit


@dataclass
class SampledMap:
    """Matched samples ``y_i = h(x_i)`` with Holder constants C (for h) and H (for h^-1)."""

    base: np.ndarray
    images: np.ndarray
    alpha: float
    C: float
    H: float

    @classmethod
    def build(cls, base, images, alpha, C=None, H=None):
        X = np.atleast_2d(np.asarray(base, dtype=float))
        Y = np.atleast_2d(np.asarray(images, dtype=float))
        if len(X) != len(Y):
            raise DimensionMismatch(f"{len(X)} base points but {len(Y)} images")
        if not 0 < alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if len(np.unique(X, axis=0)) != len(X):
            raise ValueError("base points must be pairwise distinct")
        if not (np.isfinite(X).all() and np.isfinite(Y).all()):
            raise ValueError("base points and images must be finite")
        c_hat, wc = _pairwise_ratio_max(X, Y, alpha)
        h_hat, wh = _pairwise_ratio_max(Y, X, alpha)
        if C is not None and c_hat > C * (1 + 1e-12):
            raise HolderViolation(wc[0], wc[1], c_hat, C)
        if H is not None and h_hat > H * (1 + 1e-12):
            raise HolderViolation(wh[0], wh[1], h_hat, H)
        return cls(X, Y, float(alpha), float(c_hat if C is None else C), float(h_hat if H is None else H))

    @property
    def dims(self):
        return self.base.shape[1], self.images.shape[1]


class ExtensionOperator:
    """McShane extension ``u -> min_i (v_i + L |u - x_i|^alpha)`` of one coordinate."""

    def __init__(self, base, values, alpha, L):
        self.base = np.atleast_2d(np.asarray(base, dtype=float))
        self.values = np.asarray(values, dtype=float).ravel()
        self.alpha = float(alpha)
        self.L = float(L)

    @property
    def dim(self):
        return self.base.shape[1]

    def __call__(self, U):
        U = np.atleast_2d(np.asarray(U, dtype=float))
        out = np.empty(len(U))
        rows = max(1, _CHUNK // max(len(self.base), 1))
        for s in range(0, len(U), rows):
            D = np.linalg.norm(U[s:s + rows, None, :] - self.base[None, :, :], axis=2)
            out[s:s + rows] = np.min(self.values[None, :] + self.L * D ** self.alpha, axis=1)
        return out

    def to_dict(self):
        return {"alpha": self.alpha, "L": self.L, "base_points": len(self.base)}


def mcshane_extend(base, values, alpha, L=None, safety=SAFETY) -> ExtensionOperator:
    """Extend scalar samples. ``L`` defaults to the sample constant times ``safety``."""
    X = np.atleast_2d(np.asarray(base, dtype=float))
    v = np.asarray(values, dtype=float).reshape(-1, 1)
    if len(X) != len(v):
        raise DimensionMismatch("values must match base points")
    est, wit = _pairwise_ratio_max(X, v, alpha)
    if L is None:
        L = est * safety if est > 0 else 1.0
    elif est > L * (1 + 1e-12):
        raise HolderViolation(wit[0], wit[1], est, L)
    return ExtensionOperator(X, v.ravel(), alpha, L)


class VectorMap:
    """R^n -> R^m from per-coordinate extensions or a closed-form callable."""

    def __init__(self, parts=None, fn=None, dim_in=None, dim_out=None):
        if (parts is None) == (fn is None):
            raise ValueError("give either coordinate extensions or a callable")
        self.parts = list(parts) if parts is not None else None
        self.fn = fn
        if parts is not None:
            self.dim_in = parts[0].dim
            self.dim_out = len(parts)
        else:
            self.dim_in, self.dim_out = int(dim_in), int(dim_out)

    def __call__(self, U):
        U = np.atleast_2d(np.asarray(U, dtype=float))
        if U.shape[1] != self.dim_in:
            raise DimensionMismatch(f"expected {self.dim_in} coordinates, got {U.shape[1]}")
        if self.fn is not None:
            return np.atleast_2d(np.asarray(self.fn(U), dtype=float)).reshape(len(U), self.dim_out)
        return np.stack([p(U) for p in self.parts], axis=1)

    @property
    def constants(self):
        return [p.L for p in self.parts] if self.parts is not None else None


def closed_form(fn, n, m=None) -> VectorMap:
    return VectorMap(fn=fn, dim_in=n, dim_out=n if m is None else m)


def _pad(A, k):
    return A if A.shape[1] == k else np.hstack([A, np.zeros((len(A), k - A.shape[1]))])


def extend_map(sm: SampledMap, safety=SAFETY):
    """Extensions of h and h^-1, both padded to the common dimension max(n, m)."""
    k = max(sm.dims)
    X, Y = _pad(sm.base, k), _pad(sm.images, k)
    h = VectorMap([mcshane_extend(X, Y[:, i], sm.alpha, safety=safety) for i in range(k)])
    g = VectorMap([mcshane_extend(Y, X[:, i], sm.alpha, safety=safety) for i in range(k)])
    return h, g


@dataclass
class AmbientMap:
    h: VectorMap
    k: VectorMap
    direction: str

    @property
    def n(self):
        return self.h.dim_in

    def __call__(self, P):
        P = np.atleast_2d(np.asarray(P, dtype=float))
        n = self.n
        if P.shape[1] != 2 * n:
            raise DimensionMismatch(f"expected points in R^{2 * n}")
        a, b = P[:, :n], P[:, n:]
        if self.direction == "Phi":
            w = b + self.h(a)
            return np.hstack([a - self.k(w), w])
        z = a + self.k(b)
        return np.hstack([z, b - self.h(z)])


def _check_dims(h, k):
    if not (h.dim_in == h.dim_out == k.dim_in == k.dim_out):
        raise DimensionMismatch(
            f"h: R^{h.dim_in} -> R^{h.dim_out}, k: R^{k.dim_in} -> R^{k.dim_out}; all must agree")


def build_phi(h: VectorMap, k: VectorMap) -> AmbientMap:
    _check_dims(h, k)
    return AmbientMap(h, k, "Phi")


def build_psi(h: VectorMap, k: VectorMap) -> AmbientMap:
    _check_dims(h, k)
    return AmbientMap(h, k, "Psi")


def round_trip_error(phi: AmbientMap, psi: AmbientMap, points, window=None) -> dict:
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if window is not None:
        nr = np.linalg.norm(P, axis=1)
        P = P[(nr >= window[0]) & (nr <= window[1])]
    if len(P) == 0:
        return {"max": 0.0, "median": 0.0, "count": 0}
    e = np.linalg.norm(psi(phi(P)) - P, axis=1)
    return {"max": float(e.max()), "median": float(np.median(e)), "count": int(len(P))}


def graph_transport_check(phi: AmbientMap, X, Y=None) -> dict:
    """Graph transport on X x {0}: first block norm, and distance of the second block to the Y sample."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = phi.n
    X = _pad(X, n)
    out = phi(np.hstack([X, np.zeros_like(X)]))
    first = np.linalg.norm(out[:, :n], axis=1)
    rep = {"first_block_max": float(first.max()), "first_block_median": float(np.median(first)),
           "count": int(len(X))}
    if Y is not None:
        from scipy.spatial import cKDTree

        Yp = _pad(np.atleast_2d(np.asarray(Y, dtype=float)), n)
        d, _ = cKDTree(Yp).query(out[:, n:])
        rep["image_to_Y_max"] = float(d.max())
    return rep


def random_pairs(points, count, window, seed):
    """Pairs (p, p + s u) with p from ``points``, u a random unit vector, s log-uniform in ``window``."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    rng = np.random.default_rng(derive_seed(seed, 21))
    p = P[rng.integers(0, len(P), size=count)]
    s = 10.0 ** rng.uniform(np.log10(window[0]), np.log10(window[1]), size=count)
    if count >= 2:
        s[:2] = window  # the sample spans the full window
    q = p + unit_sphere(rng, count, P.shape[1]) * s[:, None]
    return p, q


def holder_constant_sweep(fmap, exponents, pairs, seed=0, bins=8, bounded_growth=BOUNDED_GROWTH) -> dict:
    """Empirical constants max |f(p) - f(q)| / |p - q|^beta per separation bin.

    ``pairs`` is a tuple (P, Q).  The growth factor is the fitted change of the
    per-bin constant from the largest to the smallest separation; growth up
    to ``bounded_growth`` counts as bounded.
    """
    P, Q = (np.atleast_2d(np.asarray(a, dtype=float)) for a in pairs)
    sep = np.linalg.norm(P - Q, axis=1)
    keep = sep > 0
    P, Q, sep = P[keep], Q[keep], sep[keep]
    if len(sep) < 2 * bins or np.log10(sep.max() / sep.min()) < 2.0 - 1e-9:
        raise DegenerateWindow("pairs must span at least two decades of separations")
    img = np.linalg.norm(fmap(P) - fmap(Q), axis=1)
    ok = np.isfinite(img)
    sep, img = sep[ok], img[ok]
    edges = np.geomspace(sep.min(), sep.max() * (1 + 1e-12), bins + 1)
    idx = np.clip(np.searchsorted(edges, sep, side="right") - 1, 0, bins - 1)
    out = {}
    for beta in exponents:
        ratio = img / sep ** beta
        s_mid, c = [], []
        for b in range(bins):
            m = idx == b
            if m.any():
                j = np.argmax(np.where(m, ratio, -np.inf))
                s_mid.append(sep[j])
                c.append(ratio[j])
        s_mid, c = np.array(s_mid), np.array(c)
        pos = c > 0
        if pos.sum() >= 2:
            slope = np.polyfit(np.log(s_mid[pos]), np.log(c[pos]), 1)[0]
            growth = float((s_mid.max() / s_mid.min()) ** (-slope))
        else:
            growth = 1.0
        out[f"{beta:g}"] = {
            "beta": float(beta),
            "constant": float(c.max()) if len(c) else 0.0,
            "per_bin": [[float(a), float(b)] for a, b in zip(s_mid, c)],
            "growth": growth,
            "bounded": growth <= bounded_growth,
        }
    return out


# --------------------------------------------------------------------------
# the log-curve pair: h(x, 0) = (x, |x log|x||) between the line and its graph

def log_pair_base(N, seed, lo=1e-4, hi=1e-1):
    """Base X sample on the line: ``t = +-10^U(log lo, log hi)``."""
    rng = np.random.default_rng(derive_seed(seed, 31))
    t = rng.choice([-1.0, 1.0], size=N) * 10.0 ** rng.uniform(np.log10(lo), np.log10(hi), size=N)
    return np.c_[t, np.zeros(N)]


def log_pair_h(X):
    t = X[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        y = np.where(t == 0, 0.0, np.abs(t * np.log(np.abs(t))))
    return np.c_[t, y]


def log_pair_maps(N, alpha, seed):
    X = log_pair_base(N, seed)
    sm = SampledMap.build(X, log_pair_h(X), alpha)
    h, k = extend_map(sm)
    return sm, build_phi(h, k), build_psi(h, k)


def density_sweep(N_list, alpha, seed, test_count=1000):
    """Median round-trip error with Phi and Psi built from independently drawn bases.

    With one shared base the round trip cancels algebraically; independent
    bases make the error measure the extension error, which is what shrinks
    with density.
    """
    T = log_pair_base(test_count, derive_seed(seed, 99))
    tests = np.hstack([T, np.zeros_like(T)])
    rows = []
    for N in N_list:
        _, phi, _ = log_pair_maps(N, alpha, derive_seed(seed, N, 1))
        _, _, psi = log_pair_maps(N, alpha, derive_seed(seed, N, 2))
        e = round_trip_error(phi, psi, tests)
        rows.append({"N": int(N), **e})
    return rows
