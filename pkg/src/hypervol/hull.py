"""Convex hulls inside the Klein ball.

Hyperbolic hulls coincide with Euclidean hulls here, so the combinatorial
work is ordinary computational geometry; hyperbolic weight enters only
when volumes are integrated later.  Facets are kept simplicial, which the
underlying Qhull run guarantees via joggle-free triangulated output; for
inputs Qhull rejects we fall back to a seeded perturbation.

Halfspaces use the convention normal . x <= offset with outward normals.
"""

from __future__ import annotations

import json

import numpy as np
from scipy import optimize, spatial

from .klein import BOUNDARY_TOL, KleinPoint, as_coords
from .rng import substream

__all__ = [
    "DegenerateHullError",
    "Simplex",
    "Polytope",
    "convex_hull",
    "simplicial_perturbation",
    "apex_triangulation",
    "lp_membership",
    "affine_rank",
]

_ORIENT_TOL = 1e-10


class DegenerateHullError(ValueError):
    """Input not full-dimensional; carries the observed affine rank."""

    def __init__(self, rank: int, dim: int):
        super().__init__(
            f"hull is degenerate: affine rank {rank} in dimension {dim}"
        )
        self.affine_rank = rank
        self.dim = dim


class Simplex:
    """k+1 affinely independent vertices, rows of an array."""

    __slots__ = ("vertices",)

    def __init__(self, vertices):
        v = np.atleast_2d(np.asarray(vertices, dtype=float))
        if v.shape[0] < 2 or v.shape[0] > v.shape[1] + 1:
            raise ValueError("a simplex in R^n has between 2 and n+1 vertices")
        self.vertices = v
        self.vertices.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def k(self) -> int:
        """Intrinsic dimension (vertex count minus one)."""
        return self.vertices.shape[0] - 1

    def euclidean_volume(self) -> float:
        """k-dimensional Euclidean measure via the Gram determinant."""
        e = self.vertices[1:] - self.vertices[0]
        gram = e @ e.T
        det = float(np.linalg.det(gram))
        return float(np.sqrt(max(det, 0.0))) / _factorial(self.k)

    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)


def _factorial(k: int) -> float:
    out = 1.0
    for i in range(2, k + 1):
        out *= i
    return out


class Polytope:
    """Vertex list, simplicial facets (index tuples), supporting halfspaces.

    Facet i lies on halfspace i.  Vertices keep the relative order in which
    they appeared in the input, facets are sorted lexicographically, so the
    representation is deterministic for a given input.
    """

    __slots__ = ("vertices", "facets", "normals", "offsets", "euclidean_volume")

    def __init__(self, vertices, facets, normals, offsets, euclidean_volume):
        self.vertices = np.asarray(vertices, dtype=float)
        self.facets = [tuple(int(i) for i in f) for f in facets]
        self.normals = np.asarray(normals, dtype=float)
        self.offsets = np.asarray(offsets, dtype=float)
        self.euclidean_volume = float(euclidean_volume)
        for a in (self.vertices, self.normals, self.offsets):
            a.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def contains(self, p, tol: float = 1e-9):
        """Halfspace membership with `tol` slack; vectorized over rows."""
        c = np.asarray(as_coords(p) if not isinstance(p, np.ndarray) else p,
                       dtype=float)
        if c.ndim == 1:
            return bool(np.all(self.normals @ c <= self.offsets + tol))
        slack = c @ self.normals.T - self.offsets
        return np.all(slack <= tol, axis=1)

    def interior_point(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def to_json_dict(self) -> dict:
        return {
            "dim": int(self.dim),
            "vertices": [[float(x) for x in v] for v in self.vertices],
            "facets": [list(f) for f in self.facets],
            "halfspaces": [
                {"normal": [float(x) for x in nrm], "offset": float(off)}
                for nrm, off in zip(self.normals, self.offsets)
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def affine_rank(points: np.ndarray, tol: float = _ORIENT_TOL) -> int:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    centered = pts - pts.mean(axis=0)
    if centered.shape[0] == 1:
        return 0
    sv = np.linalg.svd(centered, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol * max(1.0, sv[0])))


def _dedupe(points: np.ndarray) -> np.ndarray:
    # keep first occurrence, preserve order
    seen = {}
    keep = []
    for i, row in enumerate(points):
        key = row.tobytes()
        if key not in seen:
            seen[key] = i
            keep.append(i)
    return points[keep]


def simplicial_perturbation(points, magnitude: float = 1e-9, seed: int = 0) -> np.ndarray:
    """Move each point by at most `magnitude` to reach general position.

    Points that a full perturbation would push out of the model ball are
    instead pulled radially inward by the same amount.
    """
    if magnitude <= 0:
        raise ValueError("magnitude must be positive")
    pts = np.atleast_2d(np.asarray(points, dtype=float)).copy()
    rng = substream(seed, 0)
    shift = rng.standard_normal(pts.shape)
    shift *= magnitude / np.maximum(
        np.linalg.norm(shift, axis=1, keepdims=True), 1e-300
    )
    moved = pts + shift
    norms = np.linalg.norm(moved, axis=1)
    bad = norms >= 1.0 - BOUNDARY_TOL
    if np.any(bad):
        base = np.linalg.norm(pts[bad], axis=1, keepdims=True)
        scale = np.maximum(base - magnitude, 0.0) / np.maximum(base, 1e-300)
        moved[bad] = pts[bad] * scale
    return moved


def convex_hull(points, seed: int = 0) -> Polytope:
    """Euclidean (= hyperbolic) convex hull of Klein points, 2 <= n <= 6.

    Degenerate input raises DegenerateHullError with the affine rank.
    Qhull failures on exactly degenerate-in-position inputs are retried
    once after a seeded 1e-9 perturbation.
    """
    if isinstance(points, (list, tuple)):
        pts = np.array([as_coords(p) for p in points], dtype=float)
    else:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = pts.shape[1]
    if not 2 <= n <= 6:
        raise ValueError("hull dimensions supported: 2..6")
    pts = _dedupe(pts)
    if pts.shape[0] < n + 1:
        raise DegenerateHullError(affine_rank(pts), n)
    rank = affine_rank(pts)
    if rank < n:
        raise DegenerateHullError(rank, n)
    try:
        qh = spatial.ConvexHull(pts, qhull_options="Qt")
    except spatial.QhullError:
        qh = spatial.ConvexHull(
            simplicial_perturbation(pts, 1e-9, seed), qhull_options="Qt"
        )
        pts = qh.points
    order = np.sort(np.asarray(qh.vertices))
    remap = {int(old): new for new, old in enumerate(order)}
    vertices = pts[order]
    facets = []
    for simplex, eq in zip(qh.simplices, qh.equations):
        tup = tuple(sorted(remap[int(i)] for i in simplex))
        facets.append((tup, eq))
    facets.sort(key=lambda fe: fe[0])
    normals = np.array([eq[:-1] for _, eq in facets])
    offsets = np.array([-eq[-1] for _, eq in facets])
    return Polytope(vertices, [f for f, _ in facets], normals, offsets, qh.volume)


def apex_triangulation(poly: Polytope, apex) -> list[Simplex]:
    """Cones from an interior apex over every facet; a partition of poly."""
    a = as_coords(apex)
    if not bool(np.all(poly.normals @ a < poly.offsets - 1e-12)):
        raise ValueError("apex must be strictly interior to the polytope")
    out = []
    for facet in poly.facets:
        verts = np.vstack([a[None, :], poly.vertices[list(facet)]])
        out.append(Simplex(verts))
    return out


def lp_membership(points: np.ndarray, probe) -> bool:
    """Independent hull-membership oracle: is probe a convex combination?

    Solves the feasibility LP  {lambda >= 0, sum lambda = 1,
    points^T lambda = probe}  directly, with no reference to the facet
    structure, so it cross-checks the halfspace route.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    p = as_coords(probe)
    m = pts.shape[0]
    a_eq = np.vstack([pts.T, np.ones((1, m))])
    b_eq = np.concatenate([p, [1.0]])
    res = optimize.linprog(
        c=np.zeros(m), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * m,
        method="highs",
    )
    return bool(res.status == 0)
