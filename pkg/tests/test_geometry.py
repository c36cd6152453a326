"""Core hyperboloid operations: examples with frozen oracle values plus
randomized invariant suites."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fgg import geometry as geo

# Frozen via 50-digit evaluation (mpmath) of the closed forms.
COSH1 = 1.5430806348152437
SINH1 = 1.1752011936438014
COSH2 = 3.7621956910836314
SINH2 = 3.6268604078470186
COSH3 = 10.067661995777765
SINH3 = 10.017874927409903
SQRT26 = 5.0990195135927845


def test_curvature_validation():
    geo.Curvature(2.5)
    for bad in (0.0, -1.0, float("nan"), float("inf")):
        with pytest.raises(ValueError):
            geo.Curvature(bad)


def test_minkowski_inner_examples():
    o = np.array([1.0, 0.0, 0.0])
    assert geo.minkowski_inner(o, o) == -1.0
    e2 = np.array([0.0, 1.0, 0.0])
    assert geo.minkowski_inner(e2, e2) == 1.0
    x = np.array([COSH1, SINH1, 0.0])
    assert geo.minkowski_inner(x, o) == pytest.approx(-COSH1, abs=1e-15)


def test_minkowski_inner_bilinear_symmetric():
    rng = np.random.default_rng(0)
    x, y, z = rng.standard_normal((3, 4))
    a, b = 0.7, -1.3
    assert geo.minkowski_inner(x, y) == pytest.approx(geo.minkowski_inner(y, x), rel=1e-14)
    assert geo.minkowski_inner(a * x + b * z, y) == pytest.approx(
        a * geo.minkowski_inner(x, y) + b * geo.minkowski_inner(z, y), rel=1e-12
    )


def test_minkowski_inner_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        geo.minkowski_inner(np.zeros(3), np.zeros(4))


def test_origin_examples():
    np.testing.assert_array_equal(geo.origin(2, geo.Curvature(1.0)).ambient, [1.0, 0.0, 0.0])
    np.testing.assert_array_equal(geo.origin(2, geo.Curvature(4.0)).ambient, [0.5, 0.0, 0.0])
    np.testing.assert_array_equal(geo.origin(1, geo.Curvature(0.25)).ambient, [2.0, 0.0])
    assert geo.manifold_violation(geo.origin(5, geo.Curvature(2.0)).ambient, 2.0) <= 1e-15
    with pytest.raises(ValueError):
        geo.origin_array(0, 1.0)


def test_distance_examples():
    o = np.array([1.0, 0.0, 0.0])
    x = np.array([COSH2, SINH2, 0.0])
    assert geo.distance(o, o, 1.0) == 0.0
    # rounding of the self inner product costs sqrt(eps) through arccosh
    assert geo.distance(x, x, 1.0) <= 1e-7
    assert geo.distance(o, x, 1.0) == pytest.approx(2.0, abs=1e-12)


def test_distance_symmetric_pair_matches_shooting_oracle():
    # Independent oracle: shoot geodesics from x over a (direction, length)
    # grid and take the best arrival at y; refine the grid three times.
    x = np.array([COSH1, SINH1, 0.0])
    y = np.array([COSH1, -SINH1, 0.0])
    e1 = np.array([SINH1, COSH1, 0.0])  # unit tangent at x toward the axis
    e2 = np.array([0.0, 0.0, 1.0])
    phi_lo, phi_hi = 0.0, 2 * np.pi
    t_lo, t_hi = 1e-3, 6.0
    best = None
    for _ in range(4):
        phis = np.linspace(phi_lo, phi_hi, 61)
        ts = np.linspace(t_lo, t_hi, 61)
        gaps = np.empty((phis.size, ts.size))
        for i, phi in enumerate(phis):
            v = np.cos(phi) * e1 + np.sin(phi) * e2
            pts = geo.exp_map(np.broadcast_to(x, (ts.size, 3)), ts[:, None] * v, 1.0)
            gaps[i] = np.linalg.norm(pts - y, axis=1)
        i, j = np.unravel_index(np.argmin(gaps), gaps.shape)
        best = ts[j]
        dphi, dt = phis[1] - phis[0], ts[1] - ts[0]
        phi_lo, phi_hi = phis[i] - dphi, phis[i] + dphi
        t_lo, t_hi = max(ts[j] - dt, 1e-6), ts[j] + dt
    assert best == pytest.approx(2.0, abs=1e-5)
    assert geo.distance(x, y, 1.0) == pytest.approx(best, abs=1e-5)


def test_distance_curvature_mismatch():
    a = geo.origin(2, geo.Curvature(1.0))
    b = geo.origin(2, geo.Curvature(2.0))
    with pytest.raises(ValueError, match="curvature mismatch"):
        a.distance_to(b)


def test_hyperbolic_norm_examples():
    o = np.array([1.0, 0.0, 0.0])
    assert geo.hyperbolic_norm(o, 1.0) == 0.0
    assert geo.hyperbolic_norm(np.array([COSH3, SINH3, 0.0]), 1.0) == pytest.approx(3.0, abs=1e-12)
    z4 = np.array([COSH2 / 2, SINH2 / 2, 0.0])
    assert geo.hyperbolic_norm(z4, 4.0) == pytest.approx(1.0, abs=1e-12)


def test_hyperbolic_norm_equals_distance_to_origin():
    rng = np.random.default_rng(1)
    for kappa in (0.25, 1.0, 4.0):
        pts = geo.random_points(rng, 200, 3, kappa, max_norm=4.0)
        o = geo.origin_array(3, kappa)
        np.testing.assert_allclose(
            geo.hyperbolic_norm(pts, kappa), geo.distance(pts, o, kappa), atol=1e-12
        )


def test_exp_map_examples():
    o = np.array([1.0, 0.0, 0.0])
    np.testing.assert_array_equal(geo.exp_map(o, np.zeros(3), 1.0), o)
    out = geo.exp_map(o, np.array([0.0, 1.0, 0.0]), 1.0)
    np.testing.assert_allclose(out, [COSH1, SINH1, 0.0], atol=1e-15)
    for t in (0.5, 2.0, 5.0):
        y = geo.exp_map(o, np.array([0.0, t, 0.0]), 1.0)
        assert geo.distance(o, y, 1.0) == pytest.approx(t, rel=1e-12)


def test_exp_map_rejects_timelike_tangent():
    o = np.array([1.0, 0.0, 0.0])
    with pytest.raises(ValueError, match="tangent"):
        geo.exp_map(o, np.array([1.0, 0.0, 0.0]), 1.0)


def test_exp_map_series_branch_stays_on_manifold():
    o = np.array([1.0, 0.0, 0.0])
    for t in (0.0, 1e-9, 1e-7, 5e-7):
        y = geo.exp_map(o, np.array([0.0, t, 0.0]), 1.0)
        assert geo.manifold_violation(y, 1.0) <= 1e-15
        # below the series switch the spatial step is the tangent itself
        assert y[1] == pytest.approx(t, rel=1e-13)
        assert y[2] == 0.0


def test_log_map_examples():
    x = np.array([COSH1, SINH1, 0.0])
    np.testing.assert_array_equal(geo.log_map(x, x, 1.0), np.zeros(3))
    o = np.array([1.0, 0.0, 0.0])
    np.testing.assert_allclose(geo.log_map(o, x, 1.0), [0.0, 1.0, 0.0], atol=1e-14)


def _random_base_and_target(rng, n, dim, kappa, max_dist):
    # Ranges are curvature-normalized: sqrt(kappa)-scaled lengths match the
    # kappa = 1 geometry, keeping the constraint representable in float64.
    base = geo.random_points(rng, n, dim, kappa, max_norm=2.0 / np.sqrt(kappa))
    raw = rng.standard_normal((n, dim + 1))
    tangent = geo.tangent_project(base, raw, kappa)
    tangent /= np.asarray(geo.lorentz_norm(tangent))[:, None]
    r = rng.uniform(0.0, max_dist, size=(n, 1))
    target = geo.exp_map(base, r * tangent, kappa)
    return base, target


@pytest.mark.parametrize("kappa", [0.25, 1.0, 4.0])
def test_exp_log_roundtrip(kappa):
    rng = np.random.default_rng(42)
    base, target = _random_base_and_target(rng, 2000, 3, kappa, max_dist=5.0 / np.sqrt(kappa))
    v = geo.log_map(base, target, kappa)
    again = geo.exp_map(base, v, kappa)
    assert np.max(np.abs(again - target)) <= 1e-8
    # log norm equals the geodesic distance
    np.testing.assert_allclose(
        geo.lorentz_norm(v), geo.distance(base, target, kappa), atol=1e-9
    )


@pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0])
def test_parallel_transport_preserves_inner_products(kappa):
    rng = np.random.default_rng(7)
    x, y = _random_base_and_target(rng, 1000, 3, kappa, max_dist=4.0 / np.sqrt(kappa))
    u = geo.tangent_project(x, rng.standard_normal((1000, 4)), kappa)
    v = geo.tangent_project(x, rng.standard_normal((1000, 4)), kappa)
    gu = geo.parallel_transport(x, y, u, kappa)
    gv = geo.parallel_transport(x, y, v, kappa)
    np.testing.assert_allclose(
        geo.minkowski_inner(gu, gv), geo.minkowski_inner(u, v), atol=1e-9
    )
    # transported vectors are tangent at the target point
    assert np.max(np.abs(geo.minkowski_inner(y, gu))) <= 1e-9


def test_parallel_transport_examples():
    o = np.array([1.0, 0.0, 0.0])
    x = np.array([COSH1, SINH1, 0.0])
    v = np.array([0.0, 1.0, 0.0])
    np.testing.assert_array_equal(geo.parallel_transport(o, o, v, 1.0), v)
    np.testing.assert_allclose(geo.parallel_transport(o, x, v, 1.0), [SINH1, COSH1, 0.0], atol=1e-14)


def test_project_to_hyperboloid_examples():
    p = geo.project_to_hyperboloid(np.zeros(2), geo.Curvature(1.0))
    np.testing.assert_array_equal(p.ambient, [1.0, 0.0, 0.0])
    p = geo.project_to_hyperboloid(np.array([SINH1, 0.0]), geo.Curvature(1.0))
    np.testing.assert_allclose(p.ambient, [COSH1, SINH1, 0.0], atol=1e-15)
    p = geo.project_to_hyperboloid(np.array([3.0, 4.0]), geo.Curvature(1.0))
    np.testing.assert_allclose(p.ambient, [SQRT26, 3.0, 4.0], atol=1e-15)


def test_triangle_inequality_random_triples():
    rng = np.random.default_rng(3)
    kappa = 1.7
    x = geo.random_points(rng, 10_000, 3, kappa, max_norm=3.0)
    y = geo.random_points(rng, 10_000, 3, kappa, max_norm=3.0)
    z = geo.random_points(rng, 10_000, 3, kappa, max_norm=3.0)
    dxy = geo.distance(x, y, kappa)
    dyz = geo.distance(y, z, kappa)
    dxz = geo.distance(x, z, kappa)
    assert np.all(dxz <= dxy + dyz + 1e-9)
    assert np.all(dxy >= 0.0)
    np.testing.assert_allclose(dxy, geo.distance(y, x, kappa), atol=1e-12)


def test_point_type_validation():
    k = geo.Curvature(1.0)
    with pytest.raises(ValueError, match="hyperboloid"):
        geo.LorentzPoint(np.array([1.0, 1.0, 0.0]), k)
    with pytest.raises(ValueError, match="upper sheet"):
        geo.LorentzPoint(np.array([-1.0, 0.0, 0.0]), k)
    with pytest.raises(ValueError, match="finite"):
        geo.LorentzPoint(np.array([np.inf, 0.0, 0.0]), k)
    o = geo.origin(2, k)
    with pytest.raises(ValueError, match="orthogonal"):
        geo.TangentVector(np.array([1.0, 0.0, 0.0]), o)
    v = geo.TangentVector(np.array([0.0, 1.0, 0.0]), o)
    assert v.norm() == 1.0


def test_typed_exp_log_transport():
    k = geo.Curvature(1.0)
    o = geo.origin(2, k)
    v = geo.TangentVector(np.array([0.0, 1.0, 0.0]), o)
    p = o.exp(v)
    np.testing.assert_allclose(p.ambient, [COSH1, SINH1, 0.0], atol=1e-15)
    back = o.log(p)
    np.testing.assert_allclose(back.ambient, v.ambient, atol=1e-14)
    moved = v.transport_to(p)
    np.testing.assert_allclose(moved.ambient, [SINH1, COSH1, 0.0], atol=1e-14)


def test_lorentz_norm_rejects_timelike():
    with pytest.raises(ValueError, match="timelike"):
        geo.lorentz_norm(np.array([2.0, 1.0, 0.0]))


@settings(max_examples=50, deadline=None)
@given(
    kappa=st.floats(0.1, 10.0),
    seed=st.integers(0, 2**32 - 1),
    dim=st.integers(1, 6),
)
def test_constructed_points_satisfy_constraint(kappa, seed, dim):
    rng = np.random.default_rng(seed)
    pts = geo.random_points(rng, 32, dim, kappa, max_norm=5.0 / np.sqrt(kappa))
    assert np.max(geo.manifold_violation(pts, kappa)) <= 1e-9
    assert np.all(pts[:, 0] > 0.0)


@settings(max_examples=30, deadline=None)
@given(kappa=st.floats(0.2, 5.0), seed=st.integers(0, 2**32 - 1))
def test_geodesic_speed_property(kappa, seed):
    rng = np.random.default_rng(seed)
    o = geo.origin_array(4, kappa)
    raw = rng.standard_normal(4)
    unit = np.concatenate([[0.0], raw / np.linalg.norm(raw)])
    for t in rng.uniform(0.01, 5.0 / np.sqrt(kappa), size=8):
        y = geo.exp_map(o, t * unit, kappa)
        assert geo.distance(o, y, kappa) == pytest.approx(t, rel=1e-8)
