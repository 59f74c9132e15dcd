import numpy as np
import pytest
from scipy.spatial import cKDTree

from germlab.errors import DegenerateWindow, DimensionMismatch, HolderViolation
from germlab.transport import (SAFETY, SampledMap, VectorMap, build_phi, build_psi, closed_form, extend_map,
                               graph_transport_check, holder_constant_sweep, log_pair_base, log_pair_h,
                               log_pair_maps, mcshane_extend, random_pairs, round_trip_error)


def zero(n):
    return closed_form(lambda U: np.zeros_like(U), n)


def ident(n, c=1.0):
    return closed_form(lambda U: c * U, n)


def test_single_point_extension():
    ext = mcshane_extend([[0.0, 0.0]], [0.0], 0.5, L=1.0)
    U = np.array([[0.3, 0.4], [1e-4, 0.0], [2.0, 0.0]])
    assert np.allclose(ext(U), np.linalg.norm(U, axis=1) ** 0.5)


def test_two_point_extension():
    ext = mcshane_extend([[0.0], [1.0]], [0.0, 1.0], 1.0, L=1.0)
    assert ext([[0.5]])[0] == pytest.approx(0.5)


def test_extension_leave_out(rng):
    alpha = 0.5
    x = np.sort(rng.uniform(-1, 1, 400))
    f = np.sqrt(np.abs(x))
    held = np.arange(1, 400, 5)
    base = np.setdiff1d(np.arange(400), held)
    ext = mcshane_extend(x[base, None], f[base], alpha)
    gap, _ = cKDTree(x[base, None]).query(x[held, None])
    err = np.abs(ext(x[held, None]) - f[held])
    # extension constant L >= the data constant, so the error is at most 2 L gap^alpha
    assert np.all(err <= 2 * ext.L * gap ** alpha + 1e-15)
    assert np.allclose(ext(x[base, None]), f[base], atol=1e-15)


def test_violation_and_validation():
    X = np.array([[0.0], [1e-4]])
    Y = np.array([[0.0], [1.0]])
    with pytest.raises(HolderViolation):
        SampledMap.build(X, Y, 0.5, C=1.0)
    with pytest.raises(ValueError):
        SampledMap.build(np.array([[0.0], [0.0]]), Y, 0.5)
    with pytest.raises(DimensionMismatch):
        SampledMap.build(X, Y[:1], 0.5)
    with pytest.raises(HolderViolation):
        mcshane_extend(X, [0.0, 1.0], 1.0, L=1.0)


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        build_phi(ident(2), ident(3))
    phi = build_phi(ident(2), ident(2))
    with pytest.raises(DimensionMismatch):
        phi(np.zeros((3, 3)))


def test_zero_maps_are_identity(rng):
    P = rng.normal(size=(50, 4))
    phi, psi = build_phi(zero(2), zero(2)), build_psi(zero(2), zero(2))
    assert np.array_equal(phi(P), P)
    assert round_trip_error(phi, psi, P)["max"] == 0.0


def test_linear_round_trip_exact(rng):
    P = rng.uniform(-0.1, 0.1, size=(200, 4))
    A = np.array([[2.0, 1.0], [0.5, 3.0]])
    h = closed_form(lambda U: U @ A.T, 2)
    k = closed_form(lambda U: U @ np.linalg.inv(A).T, 2)
    assert round_trip_error(build_phi(h, k), build_psi(h, k), P)["max"] <= 1e-12
    assert round_trip_error(build_phi(ident(2), ident(2)), build_psi(ident(2), ident(2)), P)["max"] <= 1e-12


def test_identity_swaps_blocks(rng):
    X = rng.normal(size=(20, 2))
    out = build_phi(ident(2), ident(2))(np.hstack([X, 0 * X]))
    assert np.array_equal(out, np.hstack([0 * X, X]))


def test_log_pair_graph_transport_on_base():
    sm, phi, _ = log_pair_maps(1000, 0.9, 0)
    r = graph_transport_check(phi, sm.base, sm.images)
    assert r["first_block_max"] <= 1e-12
    assert r["image_to_Y_max"] <= 1e-12


def test_log_pair_graph_transport_held_out():
    alpha = 0.9
    sm, phi, _ = log_pair_maps(2000, alpha, 0)
    T = log_pair_base(500, 77)
    gX, _ = cKDTree(sm.base).query(T)
    gY, _ = cKDTree(sm.images).query(log_pair_h(T))
    first = np.linalg.norm(phi(np.hstack([T, 0 * T]))[:, :2], axis=1)
    # two-coordinate McShane extensions with constant SAFETY * (C or H):
    # the error of h~ at x feeds through k~, plus the extension error of k~ itself
    r2 = np.sqrt(2)
    bound = (r2 * (1 + SAFETY) * sm.H * gY ** alpha
             + r2 * SAFETY * sm.H * (r2 * (1 + SAFETY) * sm.C * gX ** alpha) ** alpha)
    assert np.all(first <= bound)


def test_sweep_linear_maps(rng):
    P = rng.normal(size=(300, 4)) * 0.1
    pairs = random_pairs(P, 4000, (1e-4, 1e-1), 0)
    s = holder_constant_sweep(build_phi(zero(2), zero(2)), [1.0], pairs)
    assert s["1"]["constant"] == pytest.approx(1.0) and s["1"]["bounded"]
    s = holder_constant_sweep(build_phi(ident(2, 2.0), ident(2, 0.5)), [1.0], pairs)
    assert s["1"]["bounded"]


def test_sweep_log_pair():
    sm, phi, _ = log_pair_maps(1000, 0.9, 0)
    P = np.hstack([sm.base, np.zeros_like(sm.base)])
    rng = np.random.default_rng(5)
    P = P + rng.normal(size=P.shape) * 1e-3
    pairs = random_pairs(P, 20000, (1e-4, 1e-2), 1)
    s = holder_constant_sweep(phi, [0.81, 0.99], pairs)
    assert s["0.81"]["bounded"]
    assert not s["0.99"]["bounded"]


def test_sweep_needs_two_decades(rng):
    P = rng.normal(size=(50, 4))
    with pytest.raises(DegenerateWindow):
        holder_constant_sweep(build_phi(zero(2), zero(2)), [1.0], random_pairs(P, 100, (1e-2, 1e-1), 0))


def test_vector_map_from_extensions():
    sm = SampledMap.build(np.array([[0.0], [1.0], [2.0]]), np.array([[0.0, 1.0], [1.0, 2.0], [2.0, 3.0]]), 1.0)
    h, k = extend_map(sm)
    assert isinstance(h, VectorMap) and h.dim_in == h.dim_out == 2
    assert np.allclose(h(np.array([[1.0, 0.0]])), [[1.0, 2.0]])
