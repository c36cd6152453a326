"""Geodesic hyperplanes parametrized by Euclidean-style weights and biases.

A hyperplane is determined by a spatial weight vector w (a tangent direction
at the origin) and a scalar bias b.  Its reference point sits at hyperbolic
distance |b|/|w| from the origin along w, and its normal is w parallel-
transported to that point.  The transported normal v reduces membership to an
ambient linear condition x o v = 0 and carries all distance formulas.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (
    SPACELIKE_SLACK,
    Curvature,
    LorentzPoint,
    euclidean_norm,
    minkowski_inner,
)

# Weight norms at or below this are degenerate: the construction divides by
# |w| and cache inversion requires |w| > 0.
WEIGHT_NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class HyperplaneParams:
    """Weights w (spatial, length D) and bias b of one geodesic hyperplane."""

    w: np.ndarray
    b: float
    curvature: Curvature

    def __post_init__(self):
        object.__setattr__(self, "w", np.asarray(self.w, dtype=np.float64))
        if self.w.ndim != 1:
            raise ValueError("w must be a 1-D spatial vector")
        if not (np.all(np.isfinite(self.w)) and np.isfinite(self.b)):
            raise ValueError("hyperplane parameters must be finite")

    @property
    def weight_norm(self) -> float:
        return float(euclidean_norm(self.w))


@dataclass(frozen=True)
class TransportedNormal:
    """The hyperplane normal at its reference point, as an ambient vector.

    Spacelike by construction; its Lorentz norm equals the Euclidean norm of
    the generating weights (parallel transport is an isometry).
    """

    v: np.ndarray
    curvature: Curvature

    def __post_init__(self):
        object.__setattr__(self, "v", np.asarray(self.v, dtype=np.float64))
        if self.v.ndim != 1:
            raise ValueError("v must be a 1-D ambient vector")
        # Rounding may push a barely-spacelike vector's square norm a hair
        # below zero; only reject beyond the slack.
        if lorentz_norm_sq_stable(self.v) < -SPACELIKE_SLACK:
            raise ValueError("normal vector must be spacelike")

    @property
    def norm(self) -> float:
        return float(np.sqrt(max(0.0, lorentz_norm_sq_stable(self.v))))


def lorentz_norm_sq_stable(v: np.ndarray) -> float:
    """v o v computed with max-scaling so huge transported normals do not overflow."""
    v = np.asarray(v, dtype=np.float64)
    m = float(np.max(np.abs(v)))
    if m == 0.0:
        return 0.0
    u = v / m
    return float((np.sum(u[1:] * u[1:]) - u[0] * u[0]) * m * m)


def _displacement(p: HyperplaneParams) -> tuple[float, float]:
    """(|w|, theta) with theta = -sqrt(kappa)*b/|w|, the signed displacement angle."""
    n = p.weight_norm
    if n <= WEIGHT_NORM_FLOOR:
        raise ValueError(f"degenerate weight norm {n!r} (<= {WEIGHT_NORM_FLOOR})")
    return n, -p.curvature.sqrt * p.b / n


def reference_point(p: HyperplaneParams) -> LorentzPoint:
    """Anchor point of the hyperplane: the origin displaced by -b/|w| along w.

    Its hyperbolic norm is |b|/|w|.
    """
    n, theta = _displacement(p)
    sk = p.curvature.sqrt
    ambient = np.concatenate([[np.cosh(theta) / sk], (np.sinh(theta) / sk) * (p.w / n)])
    return LorentzPoint(ambient, p.curvature)


def transported_normal(p: HyperplaneParams) -> TransportedNormal:
    """Weights transported from the origin to the reference point.

    Closed form (|w| sinh(theta), cosh(theta) w); agrees with generic parallel
    transport of (0, w) and keeps Lorentz norm |w|.
    """
    n, theta = _displacement(p)
    v = np.concatenate([[n * np.sinh(theta)], np.cosh(theta) * p.w])
    return TransportedNormal(v, p.curvature)


def hyperplane_residual(x: LorentzPoint, normal: TransportedNormal) -> float:
    """Ambient membership residual x o v; zero exactly on the hyperplane."""
    return float(minkowski_inner(x.ambient, normal.v))


def distance_to_hyperplane(x: LorentzPoint, normal: TransportedNormal) -> float:
    """Hyperbolic distance arcsinh(sqrt(kappa) |x o v| / |v|_L) / sqrt(kappa)."""
    sk = x.curvature.sqrt
    return float(np.arcsinh(sk * abs(hyperplane_residual(x, normal)) / normal.norm) / sk)


def signed_distance(x: LorentzPoint, normal: TransportedNormal) -> float:
    """Distance with the sign of the Minkowski product x o v.

    The sign matches the side of the hyperplane x lies on (the sign of the
    inner product of the normal with the log map from the reference point).
    """
    sk = x.curvature.sqrt
    return float(np.arcsinh(sk * hyperplane_residual(x, normal) / normal.norm) / sk)


def scaled_distance_d1(x: LorentzPoint, p: HyperplaneParams) -> float:
    """Signed distance scaled linearly by the weight norm: |w| * signed_distance."""
    normal = transported_normal(p)
    sk = p.curvature.sqrt
    return float(p.weight_norm / sk * np.arcsinh(sk * hyperplane_residual(x, normal) / normal.norm))


def pre_activation_d2(x: LorentzPoint, p: HyperplaneParams) -> float:
    """Signed distance with the weight norm folded inside the arcsinh.

    arcsinh(sqrt(kappa) * (x o v)) / sqrt(kappa): a nonlinear scaling of the
    distance, and the pre-activation used by the linear layer.
    """
    normal = transported_normal(p)
    sk = p.curvature.sqrt
    return float(np.arcsinh(sk * hyperplane_residual(x, normal)) / sk)


# ---------------------------------------------------------------------------
# Batched forms over weight matrices, used by the layers.
# ---------------------------------------------------------------------------


def transported_normal_matrix(W: np.ndarray, b: np.ndarray, kappa: float) -> np.ndarray:
    """Stack transported normals for weight rows W (K x D) and biases b (K,).

    Returns V of shape (K, D+1); row i is the normal of hyperplane (W[i], b[i]).
    """
    W = np.asarray(W, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    norms = euclidean_norm(W, axis=-1)
    if np.any(norms <= WEIGHT_NORM_FLOOR):
        raise ValueError("degenerate weight row (norm <= 1e-12)")
    theta = -np.sqrt(kappa) * b / norms
    time = norms * np.sinh(theta)
    spatial = np.cosh(theta)[:, None] * W
    return np.concatenate([time[:, None], spatial], axis=-1)


def minkowski_products(X: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Matrix of x_n o v_i for point rows X (N x D+1) and normal rows V (K x D+1)."""
    X = np.asarray(X, dtype=np.float64)
    V = np.asarray(V, dtype=np.float64)
    if X.shape[-1] != V.shape[-1]:
        raise ValueError(f"dimension mismatch: {X.shape[-1]} vs {V.shape[-1]}")
    VI = V.copy()
    VI[:, 0] = -VI[:, 0]
    return X @ VI.T


def pre_activations(X: np.ndarray, W: np.ndarray, b: np.ndarray, kappa: float) -> np.ndarray:
    """Batch of layer pre-activations: signed scaled distances, (N x K)."""
    sk = np.sqrt(kappa)
    return np.arcsinh(sk * minkowski_products(X, transported_normal_matrix(W, b, kappa))) / sk
