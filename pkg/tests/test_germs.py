import json

import numpy as np
import pytest

from germlab.errors import OutOfCoverage, SchemaError, UnknownCatalogName
from germlab.expr import parse_expression
from germlab.germs import (ConeGerm, GraphGerm, catalog_germ, catalog_names, germ_from_dict, load_germ,
                           nominal_dim, save_germ, validate_germ)
from germlab.oracle import build_oracle, ladder
from germlab.sampling import derive_seed, link_tracks, sample_band, sample_shell


def test_catalog_has_examples():
    names = catalog_names()
    assert len(names) >= 8
    for n in ("line", "plane", "log_curve", "log_cone", "cusp", "halfline_z", "circle_cone", "parabola_pair"):
        assert n in names


def test_load_log_curve():
    g = load_germ("log_curve")
    assert isinstance(g, GraphGerm) and g.ambient_dim == 2
    assert g.exprs[0] == parse_expression("abs(x*log(abs(x)))", ["x"])


def test_load_line_and_unknown():
    g = load_germ("line")
    assert isinstance(g, GraphGerm)
    assert g.to_dict()["expressions"] == ["0"]
    with pytest.raises(UnknownCatalogName):
        load_germ("no_such")


def test_json_round_trip(tmp_path):
    for name in catalog_names():
        g = catalog_germ(name)
        p = tmp_path / f"{name}.json"
        save_germ(g, p)
        back = load_germ(p)
        assert back.to_dict() == g.to_dict()
        assert back.fingerprint() == g.fingerprint()


def test_schema_errors(tmp_path):
    with pytest.raises(SchemaError):
        germ_from_dict({"name": "a", "kind": "graph", "expressions": ["0"]})
    with pytest.raises(SchemaError):
        germ_from_dict({"name": "a", "ambient_dim": 2, "kind": "spiral"})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SchemaError):
        load_germ(bad)


def test_validate_catalog():
    for name in catalog_names():
        assert validate_germ(catalog_germ(name)) == []


def test_nominal_dims():
    assert [nominal_dim(catalog_germ(n)) for n in ("line", "plane", "cusp", "log_cone", "halfline_z")] == [1, 2, 1, 2, 1]


def test_sample_shell_line():
    s = sample_shell(catalog_germ("line"), 0.1, 100, 0.05, 1)
    assert s.points.shape == (100, 2)
    assert np.all(s.points[:, 1] == 0)
    t = np.abs(s.points[:, 0])
    assert t.min() >= 0.095 - 1e-15 and t.max() <= 0.105 + 1e-15


def test_sample_shell_cusp_residual():
    P = sample_shell(catalog_germ("cusp"), 0.1, 100, 0.05, 7).points
    assert len(P) == 100
    assert np.max(np.abs(P[:, 1] ** 2 - P[:, 0] ** 3)) <= 1e-10
    nr = np.linalg.norm(P, axis=1)
    assert nr.min() >= 0.095 * (1 - 1e-12) and nr.max() <= 0.105 * (1 + 1e-12)


def test_sample_shell_halfline():
    P = sample_shell(catalog_germ("halfline_z"), 0.1, 10, 0.05, 1).points
    assert P.shape == (10, 3)
    assert np.all(P[:, :2] == 0)
    assert np.all((P[:, 2] >= 0.095 - 1e-15) & (P[:, 2] <= 0.105 + 1e-15))


def test_sampling_is_seeded():
    g = catalog_germ("log_cone")
    a = sample_band(g, 1e-3, 1e-1, 200, 4)
    b = sample_band(g, 1e-3, 1e-1, 200, 4)
    c = sample_band(g, 1e-3, 1e-1, 200, 5)
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    assert derive_seed(1, 2) != derive_seed(2, 1)


def test_link_tracks_on_sphere():
    P, ok = link_tracks(catalog_germ("circle_cone"), 0.01, 50, 0)
    # tracks landing on the excluded nappe z < 0 are marked invalid
    assert ok.sum() >= 10
    Q = P[ok]
    assert np.allclose(np.linalg.norm(Q, axis=1), 0.01, rtol=1e-9)
    assert np.max(np.abs(Q[:, 0] ** 2 + Q[:, 1] ** 2 - Q[:, 2] ** 2)) <= 1e-10
    assert np.all(Q[:, 2] >= 0)


def test_ladder_and_oracle_examples():
    assert len(ladder(1e-3, 1, 4)) == 13
    o = build_oracle(catalog_germ("line"), 1e-3, 1, 4, 500, 1)
    assert len(o.shells) == 13
    assert np.allclose(o.radii, 1e-3 * 10.0 ** (np.arange(13) / 4))
    d, err = o.dist((0, 0.2))
    assert d >= 0.2 - 1e-15 and d <= 0.2 + err
    d, err = o.dist((0.1, 0))
    assert 0 <= d <= err
    with pytest.raises(OutOfCoverage):
        o.dist((10.0, 0.0))


def test_oracle_plane():
    o = build_oracle(catalog_germ("plane"), 1e-3, 1e-1, 4, 2000, 2)
    d, err = o.dist((0, 0, 0.05))
    assert 0.05 - 1e-15 <= d <= 0.05 + err


def test_oracle_log_curve_against_sweep():
    o = build_oracle(catalog_germ("log_curve"), 1e-3, 1.0, 4, 2000, 3)
    p = np.array([0.1, 0.0])
    d, err = o.dist(p)
    t = np.concatenate([-np.geomspace(1e-9, 1, 200001), np.geomspace(1e-9, 1, 200001)])
    curve = np.c_[t, np.abs(t * np.log(np.abs(t)))]
    brute = float(np.min(np.linalg.norm(curve - p, axis=1)))
    assert d <= 0.2303
    assert brute - 1e-9 <= d <= brute + err
