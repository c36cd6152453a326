"""Closed-form operations of the Lorentz (hyperboloid) model.

Points live on the upper sheet of a two-sheeted hyperboloid embedded in
Minkowski space with signature (-, +, ..., +).  Coordinates are time-first:
index 0 is the time component, indices 1..D the spatial components.  The
embedded space has constant negative curvature -kappa with kappa > 0.

All functions accept either a single vector of shape (D+1,) or a row-major
batch of shape (N, D+1) (more generally any leading shape, reducing over the
last axis), and are pure: no shared mutable state, safe to call concurrently.
Everything is computed in float64.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Tolerance for the hyperboloid constraint |kappa*(z o z) + 1| on constructed
# points, and for Minkowski orthogonality of tangent vectors to their base.
MANIFOLD_TOL = 1e-9
TANGENT_TOL = 1e-9

# Below sqrt(kappa)*|v| = EXP_SERIES_SWITCH the exponential map uses its
# first-order series; sinh(t)/t is 0/0 at t = 0.
EXP_SERIES_SWITCH = 1e-6

# Squared Lorentz norms may round slightly negative for barely-spacelike
# vectors; anything below -SPACELIKE_SLACK is treated as genuinely timelike.
SPACELIKE_SLACK = 1e-12


@dataclass(frozen=True)
class Curvature:
    """Curvature magnitude kappa; the space has sectional curvature -kappa."""

    kappa: float

    def __post_init__(self):
        if not np.isfinite(self.kappa) or self.kappa <= 0.0:
            raise ValueError(f"curvature magnitude must be positive and finite, got {self.kappa}")

    @property
    def sqrt(self) -> float:
        return float(np.sqrt(self.kappa))


def minkowski_inner(x: np.ndarray, y: np.ndarray) -> np.ndarray | float:
    """Lorentz inner product -x0*y0 + <x_spatial, y_spatial>, over the last axis."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape[-1] != y.shape[-1]:
        raise ValueError(f"dimension mismatch: {x.shape[-1]} vs {y.shape[-1]}")
    out = -x[..., 0] * y[..., 0] + np.sum(x[..., 1:] * y[..., 1:], axis=-1)
    return out if out.ndim else float(out)


def lorentz_norm_sq(v: np.ndarray) -> np.ndarray | float:
    """Squared Lorentz pseudonorm v o v (not positive definite)."""
    return minkowski_inner(v, v)


def lorentz_norm(v: np.ndarray) -> np.ndarray | float:
    """Lorentz norm sqrt(v o v) of a spacelike (or tangent) vector.

    The pseudonorm is undefined for timelike vectors; squared norms below
    -SPACELIKE_SLACK raise, and small negative rounding is clamped to zero.
    """
    sq = np.asarray(lorentz_norm_sq(v))
    if np.any(sq < -SPACELIKE_SLACK):
        raise ValueError("Lorentz norm of a timelike vector (squared norm < 0)")
    out = np.sqrt(np.maximum(sq, 0.0))
    return out if out.ndim else float(out)


def euclidean_norm(x: np.ndarray, axis: int = -1) -> np.ndarray | float:
    """Overflow-safe Euclidean norm (scales by the max magnitude first)."""
    x = np.asarray(x, dtype=np.float64)
    scale = np.max(np.abs(x), axis=axis, keepdims=True)
    scale_safe = np.where(scale > 0.0, scale, 1.0)
    out = np.squeeze(scale, axis) * np.sqrt(np.sum((x / scale_safe) ** 2, axis=axis))
    return out if np.ndim(out) else float(out)


def origin_array(dim: int, kappa: float) -> np.ndarray:
    """Origin (1/sqrt(kappa), 0, ..., 0) of the D-dimensional manifold."""
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    o = np.zeros(dim + 1, dtype=np.float64)
    o[0] = 1.0 / np.sqrt(kappa)
    return o


def lift_spatial(spatial: np.ndarray, kappa: float) -> np.ndarray:
    """Attach the time component sqrt(1/kappa + |spatial|^2) to spatial coordinates.

    This is the canonical projection onto the upper sheet: the result satisfies
    the hyperboloid constraint exactly up to rounding.
    """
    spatial = np.asarray(spatial, dtype=np.float64)
    if not np.all(np.isfinite(spatial)):
        raise ValueError("spatial coordinates must be finite")
    t = np.sqrt(1.0 / kappa + np.sum(spatial * spatial, axis=-1, keepdims=True))
    return np.concatenate([t, spatial], axis=-1)


def manifold_violation(z: np.ndarray, kappa: float) -> np.ndarray | float:
    """|kappa*(z o z) + 1|, zero for points exactly on the hyperboloid."""
    out = np.abs(kappa * np.asarray(lorentz_norm_sq(z)) + 1.0)
    return out if out.ndim else float(out)


def distance(x: np.ndarray, y: np.ndarray, kappa: float) -> np.ndarray | float:
    """Geodesic distance arccosh(-kappa*(x o y)) / sqrt(kappa).

    The arccosh argument is clamped to >= 1: rounding can push the product
    below 1 for equal or near-equal points.
    """
    c = np.maximum(-kappa * np.asarray(minkowski_inner(x, y)), 1.0)
    out = np.arccosh(c) / np.sqrt(kappa)
    return out if out.ndim else float(out)


def hyperbolic_norm(z: np.ndarray, kappa: float) -> np.ndarray | float:
    """Geodesic distance to the origin, arccosh(sqrt(kappa)*z0) / sqrt(kappa)."""
    z = np.asarray(z, dtype=np.float64)
    sk = np.sqrt(kappa)
    c = np.maximum(sk * z[..., 0], 1.0)
    out = np.arccosh(c) / sk
    return out if out.ndim else float(out)


def tangent_project(x: np.ndarray, v: np.ndarray, kappa: float) -> np.ndarray:
    """Project an ambient vector onto the tangent space at x."""
    inner = np.asarray(minkowski_inner(x, v))[..., None]
    return v + kappa * inner * x


def exp_map(x: np.ndarray, v: np.ndarray, kappa: float) -> np.ndarray:
    """Geodesic shooting: move from x along its tangent vector v.

    cosh(sqrt(kappa)|v|) x + sinh(sqrt(kappa)|v|)/(sqrt(kappa)|v|) v, with the
    |v| -> 0 limit handled by the first-order series x + v.  The output's time
    component is rebuilt from the spatial part so the hyperboloid constraint
    holds exactly up to rounding.
    """
    x = np.asarray(x, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    sq = np.asarray(lorentz_norm_sq(v))
    if np.any(sq < -TANGENT_TOL):
        raise ValueError("invalid tangent vector: squared Lorentz norm is negative")
    t = np.sqrt(kappa * np.maximum(sq, 0.0))[..., None]
    small = t < EXP_SERIES_SWITCH
    t_safe = np.where(small, 1.0, t)
    y = np.where(small, x + v, np.cosh(t) * x + (np.sinh(t_safe) / t_safe) * v)
    return lift_spatial(y[..., 1:], kappa)


def log_map(x: np.ndarray, y: np.ndarray, kappa: float) -> np.ndarray:
    """Inverse of the exponential map: the tangent vector at x pointing to y.

    Computed as arccosh(c)/sqrt(c^2 - 1) * (y + kappa*(x o y) x) with
    c = -kappa*(x o y), which has Lorentz norm d(x, y).  Returns the zero
    tangent when y coincides with x.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    c = np.maximum(-kappa * np.asarray(minkowski_inner(x, y)), 1.0)[..., None]
    t = np.arccosh(c)  # sqrt(kappa) * distance
    # t/sinh(t) with a series branch; the factor tends to 1 as y -> x.
    small = t < 1e-4
    t_safe = np.where(small, 1.0, t)
    factor = np.where(small, 1.0 - t * t / 6.0, t / np.sinh(t_safe))
    v = factor * (y + kappa * np.asarray(minkowski_inner(x, y))[..., None] * x)
    # coincident points get the exact zero tangent
    same = np.all(x == y, axis=-1, keepdims=True)
    return np.where(same, 0.0, v)


def parallel_transport(x: np.ndarray, y: np.ndarray, v: np.ndarray, kappa: float) -> np.ndarray:
    """Transport tangent vector v from x to y along the connecting geodesic.

    v + kappa*(y o v)/(1 - kappa*(x o y)) * (x + y); preserves Lorentz inner
    products.  The denominator is >= 2 for distinct points on the upper sheet.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    num = kappa * np.asarray(minkowski_inner(y, v))[..., None]
    den = 1.0 - kappa * np.asarray(minkowski_inner(x, y))[..., None]
    return v + (num / den) * (x + y)


def random_points(
    rng: np.random.Generator, n: int, dim: int, kappa: float, max_norm: float = 2.0
) -> np.ndarray:
    """Sample n points by shooting random tangents from the origin.

    Directions are uniform on the sphere, hyperbolic norms uniform on
    [0, max_norm]; output shape (n, dim+1).
    """
    raw = rng.standard_normal((n, dim))
    unit = raw / np.linalg.norm(raw, axis=-1, keepdims=True)
    r = rng.uniform(0.0, max_norm, size=(n, 1))
    o = np.broadcast_to(origin_array(dim, kappa), (n, dim + 1))
    tangent = np.concatenate([np.zeros((n, 1)), unit * r], axis=-1)
    return exp_map(o, tangent, kappa)


# ---------------------------------------------------------------------------
# Validated wrapper types.  The array-level functions above are the hot paths;
# these classes enforce the structural invariants at construction time and are
# the recommended public surface for single points.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LorentzPoint:
    """A point (or batch of points, one per row) on the upper hyperboloid sheet."""

    ambient: np.ndarray
    curvature: Curvature

    def __post_init__(self):
        z = np.asarray(self.ambient, dtype=np.float64)
        object.__setattr__(self, "ambient", z)
        if not np.all(np.isfinite(z)):
            raise ValueError("point coordinates must be finite")
        if np.any(np.asarray(manifold_violation(z, self.curvature.kappa)) > MANIFOLD_TOL):
            raise ValueError("point violates the hyperboloid constraint")
        if np.any(z[..., 0] <= 0.0):
            raise ValueError("point is not on the upper sheet (time component <= 0)")

    @property
    def dim(self) -> int:
        return self.ambient.shape[-1] - 1

    def hyperbolic_norm(self) -> np.ndarray | float:
        return hyperbolic_norm(self.ambient, self.curvature.kappa)

    def distance_to(self, other: "LorentzPoint") -> np.ndarray | float:
        _check_same_curvature(self, other)
        return distance(self.ambient, other.ambient, self.curvature.kappa)

    def exp(self, v: "TangentVector") -> "LorentzPoint":
        """Shoot the geodesic from this point along a tangent vector based here."""
        if not np.array_equal(v.base.ambient, self.ambient):
            raise ValueError("tangent vector is not based at this point")
        return LorentzPoint(exp_map(self.ambient, v.ambient, self.curvature.kappa), self.curvature)

    def log(self, y: "LorentzPoint") -> "TangentVector":
        """Tangent vector at this point whose exponential reaches y."""
        _check_same_curvature(self, y)
        return TangentVector(log_map(self.ambient, y.ambient, self.curvature.kappa), self)


@dataclass(frozen=True)
class TangentVector:
    """An ambient vector Minkowski-orthogonal to its base point."""

    ambient: np.ndarray
    base: LorentzPoint

    def __post_init__(self):
        v = np.asarray(self.ambient, dtype=np.float64)
        object.__setattr__(self, "ambient", v)
        if not np.all(np.isfinite(v)):
            raise ValueError("tangent coordinates must be finite")
        if v.shape != self.base.ambient.shape:
            raise ValueError("tangent vector and base point shapes differ")
        if np.any(np.abs(np.asarray(minkowski_inner(self.base.ambient, v))) > TANGENT_TOL):
            raise ValueError("vector is not Minkowski-orthogonal to its base point")

    def norm(self) -> np.ndarray | float:
        return lorentz_norm(self.ambient)

    def transport_to(self, y: LorentzPoint) -> "TangentVector":
        """Parallel transport along the geodesic from the base point to y."""
        _check_same_curvature(self.base, y)
        k = y.curvature.kappa
        return TangentVector(parallel_transport(self.base.ambient, y.ambient, self.ambient, k), y)


def _check_same_curvature(x: LorentzPoint, y: LorentzPoint) -> None:
    if x.curvature.kappa != y.curvature.kappa:
        raise ValueError("curvature mismatch")


def origin(dim: int, curvature: Curvature) -> LorentzPoint:
    """The manifold origin as a validated point."""
    return LorentzPoint(origin_array(dim, curvature.kappa), curvature)


def project_to_hyperboloid(spatial: np.ndarray, curvature: Curvature) -> LorentzPoint:
    """Lift spatial coordinates onto the hyperboloid (time from constraint)."""
    return LorentzPoint(lift_spatial(spatial, curvature.kappa), curvature)
