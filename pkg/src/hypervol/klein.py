"""Klein-model primitives: points, metric, density, isometries, balls.

Hyperbolic n-space is modeled on the open Euclidean unit ball.  Geodesics
are straight chords, so hyperbolic and Euclidean convexity coincide and
all of the hyperbolic structure is carried by the radial volume density

    v_n(r) = (1 - r^2)^(-(n+1)/2),   r = Euclidean norm,

and by the distance

    dist(p, q) = acosh( (1 - <p,q>) / sqrt((1-|p|^2)(1-|q|^2)) ).

Isometries are implemented by lifting to the hyperboloid model,
x -> (1, x)/sqrt(1-|x|^2), acting with a Lorentz matrix, and projecting
back.  Klein-model isometries are projective maps of the ball, so this
composition is numerically stable and keeps chords straight.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .rng import substream

__all__ = [
    "BOUNDARY_TOL",
    "KleinPoint",
    "IdealPoint",
    "Isometry",
    "as_coords",
    "density",
    "dist",
    "dist_matrix",
    "translate_to_origin",
    "translation_to",
    "random_isometry",
    "ball_volume",
    "ball_boundary_points",
    "unit_sphere_area",
    "sinh_power_integral",
    "radial_density_integral",
]

# Points with Euclidean norm >= 1 - BOUNDARY_TOL are rejected: the density
# is not finitely evaluable there.  Ideal points use the IdealPoint type.
BOUNDARY_TOL = 1e-12

_MAX_DIM = 16


class KleinPoint:
    """A point of hyperbolic n-space in Klein coordinates (norm < 1)."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        c = np.asarray(coords, dtype=float).reshape(-1)
        if c.size < 2:
            raise ValueError("dimension must be at least 2")
        if c.size > _MAX_DIM:
            raise ValueError("dimension too large")
        if not np.all(np.isfinite(c)):
            raise ValueError("coordinates must be finite")
        if float(np.linalg.norm(c)) >= 1.0 - BOUNDARY_TOL:
            raise ValueError(
                "point too close to the boundary sphere (norm >= 1 - 1e-12)"
            )
        self.coords = c
        self.coords.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.coords.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    def __repr__(self):
        return f"KleinPoint({self.coords.tolist()})"

    def __eq__(self, other):
        return isinstance(other, KleinPoint) and np.array_equal(
            self.coords, other.coords
        )

    def __hash__(self):
        return hash(self.coords.tobytes())


class IdealPoint:
    """A point on the sphere at infinity, stored as a unit direction."""

    __slots__ = ("direction",)

    def __init__(self, direction):
        d = np.asarray(direction, dtype=float).reshape(-1)
        if d.size < 2:
            raise ValueError("dimension must be at least 2")
        nrm = float(np.linalg.norm(d))
        if not np.isfinite(nrm) or nrm == 0.0:
            raise ValueError("direction must be a nonzero finite vector")
        self.direction = d / nrm
        self.direction.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.direction.size

    def __repr__(self):
        return f"IdealPoint({self.direction.tolist()})"


def as_coords(p) -> np.ndarray:
    """Coordinate vector of a KleinPoint, IdealPoint, or array-like."""
    if isinstance(p, KleinPoint):
        return p.coords
    if isinstance(p, IdealPoint):
        return p.direction
    return np.asarray(p, dtype=float).reshape(-1)


def _check_inside(c: np.ndarray) -> np.ndarray:
    n2 = np.sum(np.asarray(c, dtype=float) ** 2, axis=-1)
    if np.any(n2 >= (1.0 - BOUNDARY_TOL) ** 2):
        raise ValueError("point outside the open model ball")
    return n2


def density(p) -> float:
    """Volume density v_n = (1 - |p|^2)^(-(n+1)/2) at a Klein point."""
    c = as_coords(p)
    n2 = _check_inside(c)
    return float((1.0 - n2) ** (-(c.size + 1) / 2.0))


def density_array(pts: np.ndarray) -> np.ndarray:
    """Vectorized density over rows of an (m, n) coordinate array."""
    pts = np.asarray(pts, dtype=float)
    n = pts.shape[-1]
    n2 = np.sum(pts * pts, axis=-1)
    n2 = np.minimum(n2, (1.0 - BOUNDARY_TOL) ** 2)
    return (1.0 - n2) ** (-(n + 1) / 2.0)


def dist(p, q) -> float:
    """Hyperbolic distance between two Klein points."""
    a = as_coords(p)
    b = as_coords(q)
    if a.size != b.size:
        raise ValueError("dimension mismatch")
    na = _check_inside(a)
    nb = _check_inside(b)
    arg = (1.0 - float(a @ b)) / math.sqrt((1.0 - na) * (1.0 - nb))
    return math.acosh(max(arg, 1.0))


def dist_matrix(P, Q) -> np.ndarray:
    """Pairwise hyperbolic distances between rows of P (m, n) and Q (k, n)."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    p2 = 1.0 - np.sum(P * P, axis=1)
    q2 = 1.0 - np.sum(Q * Q, axis=1)
    num = 1.0 - P @ Q.T
    arg = num / np.sqrt(np.outer(p2, q2))
    return np.arccosh(np.maximum(arg, 1.0))


def _lift(pts: np.ndarray) -> np.ndarray:
    """Klein (m, n) -> hyperboloid (m, n+1), x -> (1, x)/sqrt(1-|x|^2)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    s = 1.0 / np.sqrt(1.0 - np.sum(pts * pts, axis=1))
    out = np.empty((pts.shape[0], pts.shape[1] + 1))
    out[:, 0] = s
    out[:, 1:] = pts * s[:, None]
    return out


class Isometry:
    """Hyperbolic isometry stored as a Lorentz matrix on hyperboloid lifts.

    The matrix M preserves the Minkowski form eta = diag(-1, 1, ..., 1),
    so its inverse is eta M^T eta and never needs a linear solve.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 3:
            raise ValueError("matrix must be square of size n+1 >= 3")
        if m[0, 0] <= 0:
            raise ValueError("matrix must preserve the forward light cone")
        self.matrix = m
        self.matrix.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0] - 1

    @staticmethod
    def identity(n: int) -> "Isometry":
        return Isometry(np.eye(n + 1))

    def minkowski_defect(self) -> float:
        """Max-abs deviation of M^T eta M from eta; 0 for an exact isometry."""
        eta = np.diag([-1.0] + [1.0] * self.dim)
        return float(np.max(np.abs(self.matrix.T @ eta @ self.matrix - eta)))

    def apply_array(self, pts: np.ndarray) -> np.ndarray:
        X = _lift(pts) @ self.matrix.T
        return X[:, 1:] / X[:, 0:1]

    def apply(self, p) -> KleinPoint:
        c = as_coords(p)
        _check_inside(c)
        return KleinPoint(self.apply_array(c[None, :])[0])

    def compose(self, other: "Isometry") -> "Isometry":
        """Isometry acting as self after other."""
        return Isometry(self.matrix @ other.matrix)

    def inverse(self) -> "Isometry":
        eta = np.diag([-1.0] + [1.0] * self.dim)
        return Isometry(eta @ self.matrix.T @ eta)


def translation_to(p) -> Isometry:
    """The hyperbolic translation (Lorentz boost) taking the origin to p."""
    c = as_coords(p)
    _check_inside(c)
    n = c.size
    x = _lift(c)[0]
    x0, xs = x[0], x[1:]
    m = np.eye(n + 1)
    m[0, 0] = x0
    m[0, 1:] = xs
    m[1:, 0] = xs
    s2 = float(xs @ xs)
    if s2 > 0.0:
        m[1:, 1:] += (x0 - 1.0) * np.outer(xs, xs) / s2
    return Isometry(m)


def translate_to_origin(p) -> Isometry:
    """The isometry mapping p to the origin (inverse boost)."""
    return translation_to(p).inverse()


def random_isometry(n: int, seed: int, radius: float = 0.7) -> Isometry:
    """Seeded random isometry: rotation followed by a bounded translation."""
    rng = substream(seed, 0)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    rot = np.eye(n + 1)
    rot[1:, 1:] = q
    u = rng.standard_normal(n)
    u /= np.linalg.norm(u)
    target = u * radius * rng.uniform() ** (1.0 / n)
    return translation_to(target).compose(Isometry(rot))


def unit_sphere_area(k: int) -> float:
    """Surface area of the unit k-sphere S^k in R^(k+1).

    k = 0 gives 2 (two points), matching the degenerate revolution cases.
    """
    if k < 0:
        raise ValueError("sphere dimension must be >= 0")
    return 2.0 * math.pi ** ((k + 1) / 2.0) / math.gamma((k + 1) / 2.0)


def sinh_power_integral(m: int, w) -> np.ndarray | float:
    """integral_0^w sinh(t)^m dt, vectorized over w, for 0 <= m <= 15.

    Uses the reduction
        I_m = sinh^(m-1)(w) cosh(w)/m - (m-1)/m I_(m-2)
    with a Taylor series below w = 0.01 where the reduction would cancel.
    """
    if m < 0 or m > 15:
        raise ValueError("unsupported sinh power")
    w_arr = np.asarray(w, dtype=float)
    scalar = w_arr.ndim == 0
    w_arr = np.atleast_1d(w_arr)
    if np.any(w_arr < 0):
        raise ValueError("negative upper limit")
    out = _sinh_power_recursive(m, w_arr)
    if m >= 2:
        small = w_arr < 1e-2
        if np.any(small):
            out = np.where(small, _sinh_power_series(m, w_arr), out)
    return float(out[0]) if scalar else out


def _sinh_power_recursive(m: int, w: np.ndarray) -> np.ndarray:
    if m == 0:
        return w.copy()
    if m == 1:
        # cosh(w) - 1, written to avoid cancellation at small w
        return 2.0 * np.sinh(w / 2.0) ** 2
    s, c = np.sinh(w), np.cosh(w)
    prev2 = _sinh_power_recursive(m % 2, w)
    k = m % 2
    while k < m:
        k += 2
        prev2 = s ** (k - 1) * c / k - (k - 1) / k * prev2
    return prev2

def _sinh_power_series(m: int, w: np.ndarray) -> np.ndarray:
    # sinh^m t = t^m (1 + m t^2/6 + (m/120 + m(m-1)/72) t^4 + O(t^6))
    c2 = m / 6.0
    c4 = m / 120.0 + m * (m - 1) / 72.0
    return w ** (m + 1) * (
        1.0 / (m + 1) + c2 * w * w / (m + 3) + c4 * w ** 4 / (m + 5)
    )


def radial_density_integral(n: int, r) -> np.ndarray | float:
    """integral_0^r s^(n-1) (1-s^2)^(-(n+1)/2) ds = I_(n-1)(atanh r).

    This is the radial factor of every volume integral in the model; the
    substitution s = tanh(t) turns it into a sinh-power integral.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr >= 1.0) or np.any(r_arr < 0.0):
        raise ValueError("radius must lie in [0, 1)")
    return sinh_power_integral(n - 1, np.arctanh(r_arr))


def ball_volume(n: int, r: float) -> float:
    """Volume of a hyperbolic ball of radius r in dimension n (2 <= n <= 8).

    Equals sigma_(n-1) * integral_0^r sinh(t)^(n-1) dt; for n = 2 this is
    2 pi (cosh r - 1).  Evaluated by adaptive quadrature at 1e-10 relative
    tolerance per the accuracy contract (the closed forms serve as test
    oracles, not as the implementation).
    """
    if not 2 <= n <= 8:
        raise ValueError("dimension must be in 2..8")
    if r <= 0:
        raise ValueError("radius must be positive")
    val, _ = integrate.quad(
        lambda t: math.sinh(t) ** (n - 1), 0.0, r, epsabs=0.0, epsrel=1e-10, limit=200
    )
    return unit_sphere_area(n - 1) * val


def ball_boundary_points(center, r: float, count: int, seed: int) -> list[KleinPoint]:
    """`count` seeded points at hyperbolic distance r from `center`.

    Directions are drawn uniformly; the sphere around the origin is mapped
    onto the target sphere by the translation taking 0 to `center`, which
    preserves the distance exactly.  For a fixed seed the first k points
    of a longer draw coincide with a shorter draw (prefix stability).
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    if count < 1:
        raise ValueError("count must be >= 1")
    c = as_coords(center)
    _check_inside(c)
    n = c.size
    rng = substream(seed, 0)
    dirs = rng.standard_normal((count, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    at_origin = math.tanh(r) * dirs
    moved = translation_to(c).apply_array(at_origin)
    return [KleinPoint(row) for row in moved]
