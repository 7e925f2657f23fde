"""Convex hull construction in the Klein ball.

Chords are geodesics, so the hyperbolic hull has the same vertex and
facet structure as the Euclidean one; these tests pin the combinatorics,
the halfspace data, and the two independent membership routes against
each other.
"""

import json

import numpy as np
import pytest

from hypervol import (
    DegenerateHullError,
    Simplex,
    affine_rank,
    apex_triangulation,
    convex_hull,
    lp_membership,
    simplicial_perturbation,
)

SQUARE = np.array([[0.4, 0.0], [0.0, 0.4], [-0.4, 0.0], [0.0, -0.4]])


def test_square_hull_combinatorics():
    poly = convex_hull(SQUARE)
    assert poly.dim == 2
    assert len(poly.facets) == 4
    assert poly.vertices.shape == (4, 2)
    assert poly.euclidean_volume == pytest.approx(0.32, rel=1e-12)
    # every input vertex survives and keeps its input order
    assert np.array_equal(poly.vertices, SQUARE)


def test_square_halfspaces_match_facets():
    poly = convex_hull(SQUARE)
    for facet, nrm, off in zip(poly.facets, poly.normals, poly.offsets):
        # facet i lies exactly on halfspace i
        slack = poly.vertices[list(facet)] @ nrm - off
        assert np.max(np.abs(slack)) < 1e-12
        assert np.linalg.norm(nrm) == pytest.approx(1.0, abs=1e-12)


def test_contains_interior_boundary_exterior():
    poly = convex_hull(SQUARE)
    assert poly.contains([0.0, 0.0])
    assert poly.contains([0.2, 0.2])          # on an edge
    assert not poly.contains([0.21, 0.21])
    assert not poly.contains([0.9, 0.0])
    probes = np.array([[0.0, 0.0], [0.3, 0.3], [0.1, -0.05]])
    got = poly.contains(probes)
    assert got.tolist() == [True, False, True]


def test_interior_point_is_interior():
    rng = np.random.default_rng(7)
    for n in (2, 3, 4):
        pts = rng.normal(size=(n + 4, n))
        pts *= 0.5 / np.max(np.linalg.norm(pts, axis=1))
        poly = convex_hull(pts)
        c = poly.interior_point()
        assert np.all(poly.normals @ c < poly.offsets - 1e-12)


def test_lp_membership_agrees_with_halfspaces():
    rng = np.random.default_rng(21)
    pts = rng.normal(size=(10, 3))
    pts *= 0.6 / np.max(np.linalg.norm(pts, axis=1))
    poly = convex_hull(pts)
    for _ in range(40):
        probe = rng.uniform(-0.6, 0.6, size=3)
        assert lp_membership(pts, probe) == bool(poly.contains(probe))


def test_degenerate_rank_raises():
    # 4 collinear points in the plane: affine rank 1
    pts = np.array([[0.1 * k, 0.2 * k] for k in range(4)])
    assert affine_rank(pts) == 1
    with pytest.raises(DegenerateHullError) as exc:
        convex_hull(pts)
    assert exc.value.affine_rank == 1
    assert exc.value.dim == 2


def test_coplanar_in_3d_raises():
    pts = np.array([
        [0.1, 0.0, 0.0], [0.0, 0.1, 0.0], [-0.1, 0.0, 0.0],
        [0.0, -0.1, 0.0], [0.05, 0.05, 0.0],
    ])
    with pytest.raises(DegenerateHullError):
        convex_hull(pts)


def test_simplicial_perturbation_restores_rank():
    pts = np.array([[0.1 * k, 0.2 * k, 0.0] for k in range(5)])
    moved = simplicial_perturbation(pts, magnitude=1e-6, seed=3)
    assert affine_rank(moved) == 3
    assert np.max(np.abs(moved - pts)) < 1e-5
    again = simplicial_perturbation(pts, magnitude=1e-6, seed=3)
    assert np.array_equal(moved, again)


def test_dimension_guard():
    with pytest.raises(ValueError):
        convex_hull(np.array([[0.1], [0.2], [0.3]]))
    with pytest.raises(ValueError):
        convex_hull(np.zeros((9, 7)))


def test_hull_dims_2_through_6():
    rng = np.random.default_rng(11)
    for n in range(2, 7):
        pts = rng.normal(size=(2 * n + 4, n))
        pts *= 0.5 / np.max(np.linalg.norm(pts, axis=1))
        poly = convex_hull(pts)
        assert poly.dim == n
        # all facets are (n-1)-simplices
        assert all(len(f) == n for f in poly.facets)
        assert poly.euclidean_volume > 0
        inside = poly.contains(poly.interior_point())
        assert bool(inside)


def test_simplex_volume_and_centroid():
    tri = Simplex(np.array([[0.0, 0.0], [0.3, 0.0], [0.0, 0.4]]))
    assert tri.dim == 2
    assert tri.k == 2
    assert tri.euclidean_volume() == pytest.approx(0.06, rel=1e-14)
    assert np.allclose(tri.centroid(), [0.1, 0.4 / 3.0])


def test_apex_triangulation_partitions_volume():
    rng = np.random.default_rng(5)
    for n in (2, 3, 4):
        pts = rng.normal(size=(n + 5, n))
        pts *= 0.5 / np.max(np.linalg.norm(pts, axis=1))
        poly = convex_hull(pts)
        parts = apex_triangulation(poly, poly.interior_point())
        assert len(parts) == len(poly.facets)
        total = sum(s.euclidean_volume() for s in parts)
        assert total == pytest.approx(poly.euclidean_volume, rel=1e-9)


def test_apex_triangulation_rejects_exterior_apex():
    poly = convex_hull(SQUARE)
    with pytest.raises(ValueError):
        apex_triangulation(poly, np.array([0.5, 0.5]))


def test_json_roundtrip_is_deterministic():
    poly = convex_hull(SQUARE)
    d = poly.to_json_dict()
    assert d["dim"] == 2
    assert len(d["facets"]) == 4
    assert poly.dumps() == convex_hull(SQUARE).dumps()
    parsed = json.loads(poly.dumps())
    assert parsed == d


def test_vertices_are_frozen():
    poly = convex_hull(SQUARE)
    with pytest.raises(ValueError):
        poly.vertices[0, 0] = 9.0
