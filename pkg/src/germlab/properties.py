"""Randomized property suites run by ``germlab verify-lemma all-properties``."""

from __future__ import annotations

import math
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .expr import BINARY_OPS, Binary, Const, Norm, Unary, Var, evaluate, parse_expression, print_expression
from .errors import DomainError
from .germs import catalog_germ
from .oracle import build_oracle
from .sampling import derive_seed, sample_band, unit_sphere
from .seatangle import STParams
from .topology import (betti0, betti0_by_rank, betti1, boundary2_columns, build_rips, rank_z2)


@dataclass
class PropertyResult:
    name: str
    checked: int
    failures: int
    examples: list = field(default_factory=list)

    @property
    def passed(self):
        return self.failures == 0 and self.checked > 0

    def to_dict(self):
        return {"name": self.name, "checked": self.checked, "failures": self.failures,
                "passed": self.passed, "examples": self.examples[:5]}


# --------------------------------------------------------------------------
# expressions

_VARS = ("x", "y", "z")
_UNARY = ("neg", "abs", "sqrt", "log", "exp", "sin", "cos")


def random_tree(rng, depth=4):
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.5:
            return Var(_VARS[rng.integers(len(_VARS))])
        # mix of integers and awkward floats to exercise number printing
        v = float(rng.integers(0, 10)) if rng.random() < 0.5 else float(rng.uniform(0, 5) * 10.0 ** rng.integers(-8, 8))
        return Const(v)
    k = rng.random()
    if k < 0.35:
        return Unary(_UNARY[rng.integers(len(_UNARY))], random_tree(rng, depth - 1))
    if k < 0.9:
        return Binary(BINARY_OPS[rng.integers(len(BINARY_OPS))], random_tree(rng, depth - 1),
                      random_tree(rng, depth - 1))
    return Norm(tuple(random_tree(rng, depth - 1) for _ in range(int(rng.integers(1, 4)))))


def _eval_or_none(e, env):
    try:
        return evaluate(e, env)
    except (DomainError, OverflowError):
        return None


def expression_roundtrip(count=1000, seed=0):
    rng = np.random.default_rng(derive_seed(seed, 101))
    fails = []
    for i in range(count):
        t = random_tree(rng)
        text = print_expression(t)
        back = parse_expression(text, _VARS)
        env = dict(zip(_VARS, rng.uniform(-2, 2, size=3)))
        a, b = _eval_or_none(t, env), _eval_or_none(back, env)
        same_value = (a is None and b is None) or (a is not None and b is not None and
                                                   (a == b or (math.isnan(a) and math.isnan(b))))
        if back != t or print_expression(back) != text or not same_value:
            fails.append(text)
    return PropertyResult("expression round-trip", count, len(fails), fails)


# --------------------------------------------------------------------------
# oracle

def _circle_cone_dist(P):
    # meridian half-plane: distance from (rho, z) to the ray through (1, 1)
    rho = np.hypot(P[:, 0], P[:, 1])
    z = P[:, 2]
    return np.where(rho + z >= 0, np.abs(rho - z) / np.sqrt(2.0), np.hypot(rho, z))


_ORACLE_GERMS = {
    # germ name -> exact distance function on R^n; circle_cone has no exact
    # shortcut inside the oracle, so it exercises the nearest-neighbour bound
    "circle_cone": _circle_cone_dist,
    "line": lambda P: np.abs(P[:, 1]),
    "plane": lambda P: np.abs(P[:, 2]),
    "ray": lambda P: np.where(P[:, 0] >= 0, np.abs(P[:, 1]), np.linalg.norm(P, axis=1)),
}


def oracle_one_sided(count=1000, seed=0):
    """The oracle never underestimates and overestimates by at most its reported error."""
    fails, checked = [], 0
    per = -(-count // len(_ORACLE_GERMS))
    for j, (name, exact) in enumerate(sorted(_ORACLE_GERMS.items())):
        g = catalog_germ(name)
        o = build_oracle(g, 1e-3, 1e-1, 4, 2000, derive_seed(seed, 102, j))
        rng = np.random.default_rng(derive_seed(seed, 103, j))
        on = sample_band(g, 1e-3, 1e-1, per, derive_seed(seed, 104, j))
        # half on the germ, half pushed off by a random offset up to 5% of the norm
        off = on.copy()
        half = per // 2
        nr = np.linalg.norm(on[half:], axis=1)
        off[half:] = on[half:] + unit_sphere(rng, per - half, g.ambient_dim) * (
            rng.uniform(0, 0.05, size=per - half) * nr)[:, None]
        off = off[o.covered(off)]
        d, err = o.query(off)
        t = exact(off)
        bad = (d < t - 1e-15 * (1 + np.linalg.norm(off, axis=1))) | (d > t + err)
        checked += len(off)
        fails += [f"{name}: |p|={np.linalg.norm(p):.3g} d={a:.3g} true={b:.3g} err={e:.3g}"
                  for p, a, b, e in zip(off[bad], d[bad], t[bad], err[bad])]
    return PropertyResult("oracle one-sidedness", checked, len(fails), fails)


# --------------------------------------------------------------------------
# sea-tangle monotonicity

def st_monotone(count=10000, seed=0):
    """Membership is monotone in C, antitone in d inside the unit ball, and contains the germ."""
    from .seatangle import st_members

    fails, checked = [], 0
    names = ("line", "plane", "cusp", "circle_cone")
    per = -(-count // len(names))
    for j, name in enumerate(names):
        g = catalog_germ(name)
        o = build_oracle(g, 1e-3, 1e-1, 4, 1500, derive_seed(seed, 105, j))
        rng = np.random.default_rng(derive_seed(seed, 106, j))
        base = sample_band(g, 1e-3, 1e-1, per, derive_seed(seed, 107, j))
        nr = np.linalg.norm(base, axis=1)
        P = base + unit_sphere(rng, per, g.ambient_dim) * (rng.uniform(0, 0.3, size=per) * nr)[:, None]
        P = P[o.covered(P)]
        d_lo, d_hi, c_lo, c_hi = 1.1, 1.5, 0.5, 1.0
        m = {key: st_members(o, P, STParams(d, C), check=False)[0]
             for key, (d, C) in {"a": (d_lo, c_lo), "b": (d_lo, c_hi), "c": (d_hi, c_lo)}.items()}
        bad_C = m["a"] & ~m["b"]
        bad_d = m["c"] & ~m["a"]
        on = st_members(o, o.points[::7], STParams(d_hi, 0.01), check=False)[0]
        checked += 2 * len(P) + len(on)
        fails += [f"{name}: C monotonicity at {p}" for p in P[bad_C]]
        fails += [f"{name}: d monotonicity at {p}" for p in P[bad_d]]
        fails += [f"{name}: germ point outside its sea-tangle set" for _ in range(int((~on).sum()))]
    return PropertyResult("sea-tangle monotonicity", checked, len(fails), fails)


# --------------------------------------------------------------------------
# Betti bookkeeping

def betti_bookkeeping(count=100, seed=0):
    """Along a growing Rips filtration: b0 by union-find equals b0 by rank, Euler
    characteristic equals b0 - b1 + b2, b0 never increases, and each new edge
    changes exactly one of b0 (down by 1) or b1 (up by 1) before triangles arrive."""
    fails = []
    for s in range(count):
        rng = np.random.default_rng(derive_seed(seed, 108, s))
        n = int(rng.integers(2, 4))
        P = rng.normal(size=(int(rng.integers(8, 40)), n))
        scales = np.sort(rng.uniform(0.05, 2.0, size=6))
        prev_b0 = None
        for eps in scales:
            c = build_rips(P, eps)
            V, E, T = c.counts
            b0, b1 = betti0(c), betti1(c)
            b2 = T - rank_z2(boundary2_columns(c))
            if b0 != betti0_by_rank(c):
                fails.append(f"seq {s}: b0 mismatch at eps={eps:.3g}")
            if V - E + T != b0 - b1 + b2:
                fails.append(f"seq {s}: Euler identity fails at eps={eps:.3g}")
            if b1 < 0 or b2 < 0:
                fails.append(f"seq {s}: negative Betti number")
            if prev_b0 is not None and b0 > prev_b0:
                fails.append(f"seq {s}: b0 grew along the filtration")
            prev_b0 = b0
        # edge-by-edge growth of the 1-skeleton
        c = build_rips(P, scales[-1])
        parent = list(range(len(P)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        comps, cycles = len(P), 0
        for a, b in c.edges:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[rb] = ra
                comps -= 1
            else:
                cycles += 1
        graph_b1 = len(c.edges) - len(P) + comps
        if comps != betti0(c) or cycles != graph_b1:
            fails.append(f"seq {s}: edge bookkeeping mismatch")
    return PropertyResult("Betti bookkeeping", count, len(fails), fails)


# --------------------------------------------------------------------------
# determinism

DETERMINISM_ARGV = (
    ["st-volume", "ray", "--d", "2", "--radii", "1e-2:1e-1:4", "--trials", "20000", "--seed", "3"],
    ["link-topology", "circle_cone", "--points", "200", "--seed", "3"],
    ["holder-fit", "--map", "x;abs(x*log(abs(x)))", "--germ", "line", "--points", "300", "--seed", "3"],
)


def determinism(seed=0):
    from .cli import run

    fails = []
    for argv in DETERMINISM_ARGV:
        outs = []
        for _ in range(2):
            with tempfile.TemporaryDirectory() as tmp:
                code = run(list(argv) + ["--out", tmp, "--quiet"])
                files = sorted(Path(tmp).glob("*"))
                outs.append((code, {f.name: f.read_bytes() for f in files if not f.name.endswith(".manifest.json")}))
        if outs[0] != outs[1] or not outs[0][1]:
            fails.append(" ".join(argv))
    return PropertyResult("determinism double-run", len(DETERMINISM_ARGV), len(fails), fails)


SUITES = {
    "expression_roundtrip": expression_roundtrip,
    "oracle_one_sided": oracle_one_sided,
    "st_monotone": st_monotone,
    "betti_bookkeeping": betti_bookkeeping,
    "determinism": determinism,
}


def run_all(seed=0, names=None):
    results = []
    for name, fn in SUITES.items():
        if names is None or name in names:
            results.append(fn(seed=seed))
    return results
