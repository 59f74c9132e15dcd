"""Germ specifications, the built-in catalog and the JSON file format.

A germ is described declaratively and only ever queried near the origin.
Six kinds exist: graphs of maps, parametric images, zero sets with optional
sign conditions, cones over finitely many unit directions, unions, and
products with a zero block (``X x {0}``).
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyShell, SchemaError, UnknownCatalogName
from .expr import Expression, parse_expression, print_expression, variables

_DEFAULT_NAMES = ("x", "y", "z", "w")


def default_variables(count, prefix):
    if count <= len(_DEFAULT_NAMES):
        return list(_DEFAULT_NAMES[:count])
    return [f"{prefix}{i + 1}" for i in range(count)]


@dataclass(frozen=True)
class GermSpec:
    name: str
    ambient_dim: int

    kind = "abstract"

    def to_dict(self) -> dict:
        raise NotImplementedError

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class GraphGerm(GermSpec):
    """``{(u, g(u))}`` with ``u`` ranging over the unit ball of R^k."""

    base_dim: int = 1
    exprs: tuple = ()
    variables: tuple = ()

    kind = "graph"

    def __post_init__(self):
        if self.base_dim + len(self.exprs) != self.ambient_dim:
            raise SchemaError(self.name, "graph needs ambient_dim - base_dim component expressions")

    @property
    def param_dim(self):
        return self.base_dim

    def to_dict(self):
        return {
            "name": self.name,
            "ambient_dim": self.ambient_dim,
            "kind": self.kind,
            "base_dim": self.base_dim,
            "variables": list(self.variables),
            "expressions": [print_expression(e) for e in self.exprs],
        }


@dataclass(frozen=True)
class ParametricGerm(GermSpec):
    """Image of a box around 0 under ``t -> (f_1(t), ..., f_n(t))``."""

    param_dim: int = 1
    exprs: tuple = ()
    variables: tuple = ()
    param_domain: tuple = ()

    kind = "parametric"

    def __post_init__(self):
        if len(self.exprs) != self.ambient_dim:
            raise SchemaError(self.name, "parametric germ needs ambient_dim expressions")
        if len(self.param_domain) != self.param_dim:
            raise SchemaError(self.name, "param_domain must have one interval per parameter")
        for lo, hi in self.param_domain:
            if not lo <= 0 <= hi or lo == hi:
                raise SchemaError(self.name, "param_domain intervals must contain 0")

    def to_dict(self):
        return {
            "name": self.name,
            "ambient_dim": self.ambient_dim,
            "kind": self.kind,
            "variables": list(self.variables),
            "expressions": [print_expression(e) for e in self.exprs],
            "param_domain": [list(iv) for iv in self.param_domain],
        }


@dataclass(frozen=True)
class ZeroSetGerm(GermSpec):
    """``{f_i = 0 for all i, g_j >= 0 for all j}``.  No equations means a full-dimensional region."""

    exprs: tuple = ()
    inequalities: tuple = ()
    variables: tuple = ()

    kind = "zero_set"

    def to_dict(self):
        return {
            "name": self.name,
            "ambient_dim": self.ambient_dim,
            "kind": self.kind,
            "variables": list(self.variables),
            "expressions": [print_expression(e) for e in self.exprs],
            "inequalities": [print_expression(e) for e in self.inequalities],
        }


@dataclass(frozen=True)
class ConeGerm(GermSpec):
    """Union of the rays ``{t v : t >= 0}`` over the given unit vectors."""

    link_points: np.ndarray = field(default_factory=lambda: np.zeros((0, 1)))

    kind = "cone"

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.link_points, dtype=float))
        if pts.shape[0] == 0 or pts.shape[1] != self.ambient_dim:
            raise SchemaError(self.name, "link_points must be a non-empty list of ambient vectors")
        if np.max(np.abs(np.linalg.norm(pts, axis=1) - 1.0)) > 1e-12:
            raise SchemaError(self.name, "link_points must have unit norm")
        pts.setflags(write=False)
        object.__setattr__(self, "link_points", pts)

    def __eq__(self, other):
        return (
            isinstance(other, ConeGerm)
            and self.name == other.name
            and np.array_equal(self.link_points, other.link_points)
        )

    __hash__ = None

    def to_dict(self):
        return {
            "name": self.name,
            "ambient_dim": self.ambient_dim,
            "kind": self.kind,
            "link_points": self.link_points.tolist(),
        }


@dataclass(frozen=True)
class UnionGerm(GermSpec):
    parts: tuple = ()

    kind = "union"

    def __post_init__(self):
        if not self.parts:
            raise SchemaError(self.name, "union needs at least one part")
        if any(p.ambient_dim != self.ambient_dim for p in self.parts):
            raise SchemaError(self.name, "union parts must share the ambient dimension")

    def to_dict(self):
        return {
            "name": self.name,
            "ambient_dim": self.ambient_dim,
            "kind": self.kind,
            "parts": [p.to_dict() for p in self.parts],
        }


@dataclass(frozen=True)
class ProductGerm(GermSpec):
    """``X x {0}`` inside ``R^(n1 + zero_pad)``."""

    inner: GermSpec = None
    zero_pad: int = 0

    kind = "product"

    def __post_init__(self):
        if self.inner is None or self.inner.ambient_dim + self.zero_pad != self.ambient_dim:
            raise SchemaError(self.name, "product ambient_dim must equal inner dim + zero_pad")

    def to_dict(self):
        return {
            "name": self.name,
            "ambient_dim": self.ambient_dim,
            "kind": self.kind,
            "inner": self.inner.to_dict(),
            "zero_pad": self.zero_pad,
        }


# --------------------------------------------------------------------------
# construction helpers

def graph(name, n, exprs, base_dim=None, variables=None):
    exprs = list(exprs)
    k = n - len(exprs) if base_dim is None else base_dim
    names = list(variables) if variables else default_variables(k, "u")
    parsed = tuple(parse_expression(e, names) if isinstance(e, str) else e for e in exprs)
    return GraphGerm(name, n, base_dim=k, exprs=parsed, variables=tuple(names))


def parametric(name, exprs, param_domain, variables=None):
    p = len(param_domain)
    names = list(variables) if variables else (["t"] if p == 1 else [f"t{i + 1}" for i in range(p)])
    parsed = tuple(parse_expression(e, names) if isinstance(e, str) else e for e in exprs)
    dom = tuple((float(lo), float(hi)) for lo, hi in param_domain)
    return ParametricGerm(name, len(parsed), param_dim=p, exprs=parsed, variables=tuple(names), param_domain=dom)


def zero_set(name, n, exprs, inequalities=(), variables=None):
    names = list(variables) if variables else default_variables(n, "x")
    eqs = tuple(parse_expression(e, names) if isinstance(e, str) else e for e in exprs)
    ineqs = tuple(parse_expression(e, names) if isinstance(e, str) else e for e in inequalities)
    return ZeroSetGerm(name, n, exprs=eqs, inequalities=ineqs, variables=tuple(names))


def cone(name, link_points):
    pts = np.atleast_2d(np.asarray(link_points, dtype=float))
    norms = np.linalg.norm(pts, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise SchemaError(name, "link points must be non-zero")
    return ConeGerm(name, pts.shape[1], link_points=pts / norms)


def rk_in_rn(k, n):
    if not 0 <= k <= n or n < 1:
        raise UnknownCatalogName(f"rk_in_rn({k},{n})")
    return graph(f"rk_in_rn({k},{n})", n, ["0"] * (n - k), base_dim=k)


def product(inner, zero_pad, name=None):
    return ProductGerm(name or f"{inner.name}_x_0^{zero_pad}", inner.ambient_dim + zero_pad,
                       inner=inner, zero_pad=zero_pad)


# --------------------------------------------------------------------------
# catalog

def _catalog():
    s = 0.5 * np.sqrt(3.0)
    return {
        "line": lambda: graph("line", 2, ["0"]),
        "plane": lambda: graph("plane", 3, ["0"]),
        "log_curve": lambda: graph("log_curve", 2, ["abs(x*log(abs(x)))"]),
        "log_cone": lambda: graph("log_cone", 3, ["abs(norm(x,y)*log(norm(x,y)))"]),
        "cusp": lambda: zero_set("cusp", 2, ["y^2 - x^3"], ["x"]),
        "parabola_pair": lambda: UnionGerm(
            "parabola_pair", 2, parts=(graph("parabola_pair.flat", 2, ["0"]),
                                       graph("parabola_pair.parabola", 2, ["x^2"]))
        ),
        "circle_cone": lambda: zero_set("circle_cone", 3, ["x^2 + y^2 - z^2"], ["z"]),
        "halfline_z": lambda: cone("halfline_z", [[0.0, 0.0, 1.0]]),
        "ray": lambda: cone("ray", [[1.0, 0.0]]),
        "two_rays": lambda: cone("two_rays", [[1.0, 0.0], [0.0, 1.0]]),
        "tripod": lambda: cone("tripod", [[1.0, 0.0], [-0.5, s], [-0.5, -s]]),
        "full_plane": lambda: rk_in_rn(2, 2),
    }


CATALOG_DESCRIPTIONS = {
    "line": "R x {0} in R^2",
    "plane": "R^2 x {0} in R^3",
    "log_curve": "graph y = |x log|x|| in R^2 (non-LNE, bi-alpha-Holder to the line)",
    "log_cone": "graph z = |r log r|, r = |(x,y)|, in R^3; tangent cone is a half-line",
    "cusp": "y^2 = x^3, x >= 0",
    "parabola_pair": "union of y = 0 and y = x^2 (tangent branches, not LNE)",
    "circle_cone": "x^2 + y^2 = z^2, z >= 0",
    "halfline_z": "cone over (0,0,1): tangent cone of log_cone",
    "ray": "cone over (1,0) in R^2",
    "two_rays": "cone over (1,0) and (0,1) in R^2",
    "tripod": "cone over three directions at 120 degrees in R^2",
    "full_plane": "all of R^2 (alias of rk_in_rn(2,2))",
    "rk_in_rn(k,n)": "R^k x {0} in R^n",
}

_RK_RE = re.compile(r"^rk_in_rn\(\s*(\d+)\s*,\s*(\d+)\s*\)$|^r(\d+)_in_r(\d+)$")


def catalog_names():
    return sorted(_catalog())


def catalog_germ(name):
    entries = _catalog()
    if name in entries:
        return entries[name]()
    m = _RK_RE.match(name)
    if m:
        k, n = (m.group(1), m.group(2)) if m.group(1) else (m.group(3), m.group(4))
        return rk_in_rn(int(k), int(n))
    raise UnknownCatalogName(name)


# --------------------------------------------------------------------------
# file format

def _require(d, key, path, kind=None):
    if key not in d:
        raise SchemaError(path, f"missing field {key!r}")
    v = d[key]
    if kind is not None and not isinstance(v, kind):
        raise SchemaError(path, f"field {key!r} has the wrong type")
    return v


def germ_from_dict(d, path="<dict>"):
    if isinstance(d, str):
        return catalog_germ(d)
    if not isinstance(d, dict):
        raise SchemaError(path, "germ spec must be an object or a catalog name")
    name = _require(d, "name", path, str)
    n = _require(d, "ambient_dim", path, int)
    if n < 1:
        raise SchemaError(path, "ambient_dim must be positive")
    kind = _require(d, "kind", path, str)
    try:
        if kind == "graph":
            exprs = _require(d, "expressions", path, list)
            return graph(name, n, exprs, base_dim=d.get("base_dim"), variables=d.get("variables"))
        if kind == "parametric":
            exprs = _require(d, "expressions", path, list)
            dom = d.get("param_domain")
            if dom is None:
                p = d.get("param_dim", 1)
                dom = [[-1.0, 1.0]] * p
            return parametric(name, exprs, dom, variables=d.get("variables"))
        if kind == "zero_set":
            return zero_set(name, n, d.get("expressions", []), d.get("inequalities", []),
                            variables=d.get("variables"))
        if kind == "cone":
            return cone(name, _require(d, "link_points", path, list))
        if kind == "union":
            parts = tuple(germ_from_dict(p, f"{path}.parts[{i}]")
                          for i, p in enumerate(_require(d, "parts", path, list)))
            return UnionGerm(name, n, parts=parts)
        if kind == "product":
            inner = germ_from_dict(_require(d, "inner", path), f"{path}.inner")
            return ProductGerm(name, n, inner=inner, zero_pad=_require(d, "zero_pad", path, int))
    except SchemaError:
        raise
    except UnknownCatalogName:
        raise
    except Exception as exc:  # parse errors and malformed arrays
        raise SchemaError(path, str(exc)) from exc
    raise SchemaError(path, f"unknown germ kind {kind!r}")


def load_germ(source) -> GermSpec:
    """Load a germ by catalog name or from a JSON spec file."""
    if isinstance(source, GermSpec):
        return source
    source = str(source)
    p = Path(source)
    if p.suffix == ".json" or p.exists():
        try:
            d = json.loads(p.read_text())
        except FileNotFoundError:
            raise SchemaError(source, "file not found") from None
        except json.JSONDecodeError as exc:
            raise SchemaError(source, f"invalid JSON: {exc}") from None
        return germ_from_dict(d, source)
    return catalog_germ(source)


def save_germ(germ, path):
    Path(path).write_text(json.dumps(germ.to_dict(), indent=2) + "\n")


def validate_germ(germ, r=1e-4, seed=0):
    """Check origin adherence by sampling a small shell; return a list of problems."""
    from .sampling import sample_shell

    problems = []
    for e in _all_exprs(germ):
        extra = variables(e) - set(_declared(germ))
        if extra:
            problems.append(f"undeclared variables {sorted(extra)}")
    try:
        sample_shell(germ, r, 8, 0.5, seed)
    except EmptyShell as exc:
        problems.append(f"origin adherence failed: {exc}")
    return problems


def _all_exprs(g) -> list[Expression]:
    if isinstance(g, (GraphGerm, ParametricGerm)):
        return list(g.exprs)
    if isinstance(g, ZeroSetGerm):
        return list(g.exprs) + list(g.inequalities)
    return []


def _declared(g):
    return getattr(g, "variables", ())


def nominal_dim(germ) -> int:
    """Dimension implied by the description (graph base, parameter count, equation count)."""
    if isinstance(germ, GraphGerm):
        return germ.base_dim
    if isinstance(germ, ParametricGerm):
        return germ.param_dim
    if isinstance(germ, ZeroSetGerm):
        return germ.ambient_dim - len(germ.exprs)
    if isinstance(germ, ConeGerm):
        return 1  # a finite union of rays
    if isinstance(germ, UnionGerm):
        return max(nominal_dim(p) for p in germ.parts)
    if isinstance(germ, ProductGerm):
        return nominal_dim(germ.inner)
    raise TypeError(f"no nominal dimension for {germ!r}")
