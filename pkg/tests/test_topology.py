import numpy as np
import pytest

from germlab.cone import link_sample
from germlab.errors import EmptyLink
from germlab.germs import catalog_germ, cone
from germlab.seatangle import STParams
from germlab.topology import (betti0, betti0_by_rank, betti1, build_rips, compare_links, complex_from,
                              link_betti, rank_z2, st_link_betti)


def circle(n=100, r=1.0):
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    return np.c_[r * np.cos(t), r * np.sin(t)]


def test_rips_small_cases():
    c = build_rips(np.array([[0.0, 0.0], [3.0, 0.0]]), 1.0)
    assert c.counts == (2, 0, 0)
    tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
    c = build_rips(tri, 1.0 + 1e-12)
    assert c.counts == (3, 3, 1)


def test_rips_circle_structure():
    P = circle()
    gap = 2 * np.sin(np.pi / 100)
    c = build_rips(P, 3 * gap)
    V, E, T = c.counts
    assert E == 300  # each vertex joins its three nearest on each side
    # brute force: triangles are exactly the triples with all pairwise distances <= eps
    D = np.linalg.norm(P[:, None] - P[None], axis=2) <= 3 * gap
    brute = sum(D[a, b] and D[a, k] and D[b, k] for a in range(V) for b in range(a + 1, V)
                for k in range(b + 1, V))
    assert T == brute


def test_betti0_cases():
    assert betti0(complex_from(0, [])) == 0
    assert betti0(build_rips(np.array([[0.0, 0.0], [5.0, 0.0]]), 1.0)) == 2
    assert betti0(build_rips(link_sample(catalog_germ("line"), 0.1, 50, 0), 0.01)) == 2


def test_betti1_cases():
    tree = complex_from(5, [(0, 1), (1, 2), (1, 3), (3, 4)])
    assert betti1(tree) == 0
    c = build_rips(circle(), 3 * 2 * np.sin(np.pi / 100))
    assert betti1(c) == 1 and betti0_by_rank(c) == 1
    filled = complex_from(3, [(0, 1), (0, 2), (1, 2)], [(0, 1, 2)])
    assert betti1(filled) == 0
    hollow = complex_from(3, [(0, 1), (0, 2), (1, 2)])
    assert betti1(hollow) == 1


def test_circle_betti_stable_over_scales():
    P = circle()
    gap = 2 * np.sin(np.pi / 100)
    for eps in np.linspace(2 * gap, 1.0, 6):
        c = build_rips(P, eps)
        assert (betti0(c), betti1(c)) == (1, 1)


def test_rank_z2():
    assert rank_z2([0b011, 0b110, 0b101]) == 2
    assert rank_z2([0b1, 0b1]) == 1
    assert rank_z2([]) == 0


@pytest.mark.parametrize("name,expected", [
    ("plane", (1, 1)), ("halfline_z", (1, 0)), ("circle_cone", (1, 1)), ("line", (2, 0)),
    ("tripod", (3, 0)), ("two_rays", (2, 0)), ("log_cone", (1, 1)),
])
def test_link_betti_catalog(name, expected):
    rep = link_betti(catalog_germ(name), 0.1, 400, seed=0)
    assert rep.betti == expected
    assert rep.stable and rep.necessary_condition_only


def test_st_link_bands():
    st = STParams(1.5, 1.0)
    plane_cone = cone("plane_cone", np.c_[circle(64), np.zeros(64)].tolist())
    assert st_link_betti(plane_cone, st, 0.05).betti == (1, 1)
    assert st_link_betti(catalog_germ("halfline_z"), st, 0.05).betti == (1, 0)


def test_st_link_degenerate_width():
    rep = st_link_betti(catalog_germ("halfline_z"), STParams(1.5, 10.0), 0.05)
    assert rep.betti == (1, 0)
    assert any("degenerate" in n for n in rep.notes)


def test_st_link_empty():
    with pytest.raises(EmptyLink):
        st_link_betti(catalog_germ("halfline_z"), STParams(3.0, 1e-6), 0.05, N=500)


def test_compare_links():
    res = compare_links(catalog_germ("plane"), catalog_germ("circle_cone"))
    assert res["equal"] and res["A"]["betti"] == [1, 1]
    res = compare_links(catalog_germ("plane"), catalog_germ("halfline_z"))
    assert not res["equal"]
