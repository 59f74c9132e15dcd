import warnings

import numpy as np
import pytest

from germlab.cli import _log_cloud
from germlab.errors import DegenerateWindow, DisconnectedWarning
from germlab.fitting import fit_power_law
from germlab.germs import catalog_germ
from germlab.metric import (LNE_CONSISTENT, NOT_LNE_POLY, NOT_LNE_SLOW, build_neighborhood_graph, classify_lne,
                            holder_modulus_fit, inner_distance, lne_scan)
from germlab.sampling import sample_band


def test_two_point_graph():
    g = build_neighborhood_graph([np.array([[0.0, 0.0], [0.5, 0.0]])], 1.0, include_origin=False)
    assert g.edge_count == 1
    assert g.adjacency[0, 1] == pytest.approx(0.5)


def test_zero_eps_warns():
    P = np.array([[0.1, 0.0], [0.2, 0.0], [0.3, 0.0]])
    with pytest.warns(DisconnectedWarning):
        g = build_neighborhood_graph([P], 0.0, include_origin=False)
    assert g.edge_count == 0


def test_line_shells_connected():
    P = sample_band(catalog_germ("line"), 0.05, 0.2, 400, 0)
    with warnings.catch_warnings():
        warnings.simplefilter("error", DisconnectedWarning)
        # the two half-lines meet only through the origin vertex
        g = build_neighborhood_graph([P], 0.08, include_origin=True)
    n, _ = g.components()
    assert n == 1


def test_inner_distance_chain():
    P = np.array([[0.1, 0.0], [0.2, 0.0], [0.3, 0.0]])
    g = build_neighborhood_graph([P], 0.15, include_origin=False)
    assert inner_distance(g, 1, 1) == 0.0
    assert inner_distance(g, 0, 2) == pytest.approx(0.2, abs=1e-15)


def test_parabola_pair_path_through_origin():
    t = 0.05
    # relative threshold 0.002 cannot bridge the branches until s^2 < 0.002 s
    s = np.geomspace(1e-5, 0.06, 8000)
    P = np.vstack([np.c_[s, 0 * s], np.c_[s, s ** 2]])
    g = build_neighborhood_graph([P], 0.002, include_origin=True, relative=True, hub_radius=2e-5)
    i = int(np.argmin(np.abs(s - t)))
    d = inner_distance(g, i, len(s) + i)
    assert d >= np.linalg.norm(P[i] - P[len(s) + i])
    assert d == pytest.approx(2 * t, rel=0.1)


def test_fit_exact_power_laws():
    s = 2.0 ** -np.arange(1, 20)
    f = fit_power_law(np.c_[s, s])
    assert f.slope == pytest.approx(1.0, abs=1e-12) and f.constant == pytest.approx(1.0)
    assert f.residual_max <= 1e-12
    f = fit_power_law(np.c_[s, 3 * s ** 0.5])
    assert f.slope == pytest.approx(0.5, abs=1e-12) and f.constant == pytest.approx(3.0)


def test_fit_log_corrected_law():
    s = np.geomspace(1e-6, 1e-2, 40)
    f = fit_power_law(np.c_[s, s * np.abs(np.log(s))])
    # chord slope of s|log s| across [1e-6, 1e-2] is 1 + log(1/3)/log(1e4) = 0.881
    chord = 1 + np.log(np.log(1e-2) / np.log(1e-6)) / np.log(1e4)
    assert 0.85 < f.slope < 1.0
    assert f.slope == pytest.approx(chord, abs=0.01)
    res = [fit_power_law(np.c_[s[s >= lo], (s * np.abs(np.log(s)))[s >= lo]], min_decades=0.5).residual_max
           for lo in (1e-3, 1e-4, 1e-6)]
    assert res[0] < res[1] < res[2]


def test_fit_rejects_short_window():
    s = np.geomspace(1e-2, 5e-2, 20)
    with pytest.raises(DegenerateWindow):
        fit_power_law(np.c_[s, s])


def test_classify_rules():
    r = np.geomspace(1e-6, 1e-2, 5)
    assert classify_lne(1.0, r, np.ones(5))[0] == LNE_CONSISTENT
    assert classify_lne(0.98, r, 1 + np.abs(np.log(r)))[0] == NOT_LNE_SLOW
    assert classify_lne(0.5, r, r ** -0.5)[0] == NOT_LNE_POLY


def test_lne_line():
    rep = lne_scan(catalog_germ("line"), np.geomspace(1e-3, 1e-1, 5), seed=0)
    assert rep.verdict == LNE_CONSISTENT
    assert 0.97 <= rep.beta <= 1.03


def test_holder_identity_and_scaling():
    X = _log_cloud(catalog_germ("line"), 500, 0)
    f = holder_modulus_fit(["x", "y"], X)
    assert f.alpha_upper == pytest.approx(1) and f.alpha_lower == pytest.approx(1)
    assert f.L_upper == pytest.approx(1) and f.L_lower == pytest.approx(1)
    f = holder_modulus_fit(["2*x", "2*y"], X)
    assert f.alpha_upper == pytest.approx(1) and f.L_upper == pytest.approx(2)
    assert f.verdict(1.0)["L"] == pytest.approx(2)
