"""Lorentz fully connected layers, the ambient-matrix baseline, and caching.

The distance-grounded layer maps a batch of points to a batch of points by
taking signed scaled distances to learned geodesic hyperplanes, applying a
scalar nonlinearity, and rebuilding a manifold point whose axis-hyperplane
distances equal the activations.  Because the distance arcsinh cancels with
the output sinh, the spatial output is just h applied to Minkowski products
against the transported-normal matrix V, and V can be cached for inference.

The baseline layer multiplies the full ambient input by a weight matrix and
treats the result as the spatial output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .activations import ActivationKind, apply_to_preactivation, spatial_from_products
from .geometry import Curvature, euclidean_norm, lift_spatial
from .hyperplanes import (
    WEIGHT_NORM_FLOOR,
    lorentz_norm_sq_stable,
    minkowski_products,
    transported_normal_matrix,
)


@dataclass(frozen=True)
class WeightNormParam:
    """Per-row gain g and unnormalized directions a; effective rows g_i * a_i/|a_i|."""

    g: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "g", np.asarray(self.g, dtype=np.float64))
        object.__setattr__(self, "a", np.asarray(self.a, dtype=np.float64))
        if self.g.ndim != 1 or self.a.ndim != 2 or self.g.shape[0] != self.a.shape[0]:
            raise ValueError("g must be (K,) and a must be (K, D) with matching K")


def weightnorm_effective(p: WeightNormParam) -> np.ndarray:
    """Effective weight matrix with rows g_i * a_i / |a_i|; row norms are |g_i|."""
    norms = euclidean_norm(p.a, axis=-1)
    if np.any(norms <= WEIGHT_NORM_FLOOR):
        raise ValueError("degenerate direction row (|a_i| <= 1e-12)")
    return (p.g / norms)[:, None] * p.a


@dataclass
class FggLinearLayer:
    """Distance-to-hyperplane linear layer on the hyperboloid.

    Weight rows are stored weight-normalized (gain + direction); the bias
    displaces each hyperplane from the origin.
    """

    params: WeightNormParam
    b: np.ndarray
    activation: ActivationKind
    curvature: Curvature

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=np.float64)
        if self.b.shape != (self.params.g.shape[0],):
            raise ValueError("bias shape must match the number of weight rows")

    @property
    def d_in(self) -> int:
        return self.params.a.shape[1]

    @property
    def d_out(self) -> int:
        return self.params.a.shape[0]

    def effective_weights(self) -> np.ndarray:
        return weightnorm_effective(self.params)

    def normal_matrix(self) -> np.ndarray:
        return transported_normal_matrix(self.effective_weights(), self.b, self.curvature.kappa)

    @classmethod
    def from_weights(cls, W, b, activation: ActivationKind, curvature: Curvature) -> "FggLinearLayer":
        """Build from a plain weight matrix: gains are row norms, directions the rows."""
        W = np.asarray(W, dtype=np.float64)
        return cls(WeightNormParam(euclidean_norm(W, axis=-1), W.copy()), b, activation, curvature)


@dataclass
class ChenLinearLayer:
    """Ambient-matrix baseline: spatial output W x on the full ambient input, no bias."""

    W: np.ndarray
    curvature: Curvature

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=np.float64)
        if self.W.ndim != 2:
            raise ValueError("W must be (D_out, D_in+1)")
        if not np.all(np.isfinite(self.W)):
            raise ValueError("W entries must be finite")

    @property
    def d_in(self) -> int:
        return self.W.shape[1] - 1

    @property
    def d_out(self) -> int:
        return self.W.shape[0]


@dataclass(frozen=True)
class LayerCache:
    """Precomputed transported-normal matrix for inference.

    Rows must be spacelike; the original (W, b) are recoverable, so a cache is
    a complete substitute for the layer at inference time.
    """

    V: np.ndarray
    curvature: Curvature
    activation: ActivationKind

    def __post_init__(self):
        object.__setattr__(self, "V", np.asarray(self.V, dtype=np.float64))
        if self.V.ndim != 2:
            raise ValueError("V must be (D_out, D_in+1)")
        sq = np.array([lorentz_norm_sq_stable(row) for row in self.V])
        if np.any(sq <= 0.0):
            raise ValueError("cache rows must be spacelike")

    @property
    def d_in(self) -> int:
        return self.V.shape[1] - 1

    @property
    def d_out(self) -> int:
        return self.V.shape[0]


def _forward_from_normals(V: np.ndarray, X: np.ndarray, kind: ActivationKind, kappa: float) -> np.ndarray:
    """Shared forward kernel: h of Minkowski products, then time reconstruction."""
    ybar = spatial_from_products(kind, minkowski_products(X, V), kappa)
    return lift_spatial(ybar, kappa)


def fgg_forward(layer: FggLinearLayer, X: np.ndarray) -> np.ndarray:
    """Forward pass over a batch of point rows X (N, D_in+1) -> (N, D_out+1)."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[-1] != layer.d_in + 1:
        raise ValueError(f"input dimension mismatch: {X.shape[-1] - 1} vs layer {layer.d_in}")
    return _forward_from_normals(layer.normal_matrix(), X, layer.activation, layer.curvature.kappa)


def fgg_forward_decomposed(layer: FggLinearLayer, X: np.ndarray) -> np.ndarray:
    """Forward pass through the explicit distance/activation/output steps.

    Computes signed scaled distances z to each hyperplane, applies the
    activation (the conjugated version in lorentzian mode), and rebuilds the
    point whose axis-hyperplane distances are the activations.  Agrees with
    fgg_forward; the agreement is the cancellation property, which the tests
    check rather than assume.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.shape[-1] != layer.d_in + 1:
        raise ValueError(f"input dimension mismatch: {X.shape[-1] - 1} vs layer {layer.d_in}")
    kappa = layer.curvature.kappa
    sk = np.sqrt(kappa)
    m = minkowski_products(X, layer.normal_matrix())
    z = np.arcsinh(sk * m) / sk
    a = apply_to_preactivation(layer.activation, z, kappa)
    ybar = np.sinh(sk * a) / sk
    return lift_spatial(ybar, kappa)


def chen_forward(layer: ChenLinearLayer, X: np.ndarray) -> np.ndarray:
    """Baseline forward: spatial output W x of the full ambient input."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[-1] != layer.W.shape[1]:
        raise ValueError(f"input dimension mismatch: {X.shape[-1]} vs {layer.W.shape[1]}")
    return lift_spatial(X @ layer.W.T, layer.curvature.kappa)


def build_cache(layer: FggLinearLayer) -> LayerCache:
    """Precompute the transported-normal matrix of a trained layer."""
    return LayerCache(layer.normal_matrix(), layer.curvature, layer.activation)


def cached_forward(cache: LayerCache, X: np.ndarray) -> np.ndarray:
    """Inference forward from a cache; identical code path as fgg_forward."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[-1] != cache.V.shape[1]:
        raise ValueError(f"input dimension mismatch: {X.shape[-1]} vs {cache.V.shape[1]}")
    return _forward_from_normals(cache.V, X, cache.activation, cache.curvature.kappa)


def invert_cache(cache: LayerCache) -> tuple[np.ndarray, np.ndarray]:
    """Recover the weight matrix and biases that generated a cache.

    Row-wise: w = (|v|_L / |v_spatial|) * v_spatial and
    b = -(|v|_L / sqrt(kappa)) * arcsinh(v_time / |v|_L).
    """
    sk = cache.curvature.sqrt
    W = np.empty((cache.d_out, cache.d_in), dtype=np.float64)
    b = np.empty(cache.d_out, dtype=np.float64)
    for i, v in enumerate(cache.V):
        sq = lorentz_norm_sq_stable(v)
        if sq <= 0.0:
            raise ValueError(f"cache row {i} is lightlike or timelike; not invertible")
        spatial_norm = euclidean_norm(v[1:])
        if spatial_norm <= 0.0:
            raise ValueError(f"cache row {i} has zero spatial part; not invertible")
        L = np.sqrt(sq)
        W[i] = (L / spatial_norm) * v[1:]
        b[i] = -(L / sk) * np.arcsinh(v[0] / L)
    return W, b


# ---------------------------------------------------------------------------
# Mean-only batch normalization
# ---------------------------------------------------------------------------


def mean_only_batchnorm(
    Z: np.ndarray, state: np.ndarray, training: bool, momentum: float = 0.1
) -> np.ndarray:
    """Subtract per-feature means from pre-activations; no variance scaling.

    In training mode the batch mean is subtracted and the running-mean buffer
    `state` is updated in place with exponential momentum; in inference mode
    the stored running mean is subtracted.
    """
    Z = np.asarray(Z, dtype=np.float64)
    if training:
        if Z.shape[0] < 1:
            raise ValueError("training-mode batch normalization requires a nonempty batch")
        mean = Z.mean(axis=0)
        state *= 1.0 - momentum
        state += momentum * mean
        return Z - mean
    return Z - state


@dataclass
class MeanOnlyBatchNorm:
    """Running-mean buffer plus momentum for one layer's pre-activations."""

    num_features: int
    momentum: float = 0.1
    running_mean: np.ndarray = field(init=False)

    def __post_init__(self):
        self.running_mean = np.zeros(self.num_features, dtype=np.float64)

    def __call__(self, Z: np.ndarray, training: bool) -> np.ndarray:
        return mean_only_batchnorm(Z, self.running_mean, training, self.momentum)


# ---------------------------------------------------------------------------
# Stacks of layers with optional normalization, and forward records used by
# backpropagation.
# ---------------------------------------------------------------------------


@dataclass
class FggForwardRecord:
    """Intermediates of one distance-layer forward pass, retained for backward."""

    layer: FggLinearLayer
    X: np.ndarray
    W: np.ndarray  # effective weight rows
    V: np.ndarray
    M: np.ndarray  # Minkowski products
    U: np.ndarray  # recentered products (equals M without normalization)
    Z: np.ndarray | None  # pre-activations, only on the normalized path
    Zc: np.ndarray | None  # centered pre-activations
    ybar: np.ndarray
    y: np.ndarray
    bn_training: bool


@dataclass
class ChenForwardRecord:
    """Intermediates of one baseline-layer forward pass."""

    layer: ChenLinearLayer
    X: np.ndarray
    WX: np.ndarray
    ybar: np.ndarray
    y: np.ndarray
    bn_training: bool


def fgg_forward_record(
    layer: FggLinearLayer,
    X: np.ndarray,
    batchnorm: MeanOnlyBatchNorm | None = None,
    training: bool = False,
) -> FggForwardRecord:
    """Forward pass retaining intermediates; the normalized path centers the
    pre-activations before the activation is applied."""
    X = np.asarray(X, dtype=np.float64)
    kappa = layer.curvature.kappa
    sk = np.sqrt(kappa)
    W = layer.effective_weights()
    V = transported_normal_matrix(W, layer.b, kappa)
    M = minkowski_products(X, V)
    if batchnorm is not None:
        Z = np.arcsinh(sk * M) / sk
        Zc = batchnorm(Z, training)
        U = np.sinh(sk * Zc) / sk
    else:
        Z = Zc = None
        U = M
    ybar = spatial_from_products(layer.activation, U, kappa)
    y = lift_spatial(ybar, kappa)
    return FggForwardRecord(
        layer, X, W, V, M, U, Z, Zc, ybar, y, training and batchnorm is not None
    )


def chen_forward_record(
    layer: ChenLinearLayer,
    X: np.ndarray,
    batchnorm: MeanOnlyBatchNorm | None = None,
    training: bool = False,
) -> ChenForwardRecord:
    X = np.asarray(X, dtype=np.float64)
    WX = X @ layer.W.T
    ybar = batchnorm(WX, training) if batchnorm is not None else WX
    y = lift_spatial(ybar, layer.curvature.kappa)
    return ChenForwardRecord(layer, X, WX, ybar, y, training and batchnorm is not None)


@dataclass
class StackLayer:
    """One stage of a network: a linear layer plus optional normalization."""

    layer: FggLinearLayer | ChenLinearLayer
    batchnorm: MeanOnlyBatchNorm | None = None


@dataclass
class LayerStack:
    """A feedforward stack of Lorentz layers sharing one curvature."""

    stages: list[StackLayer]
    trained: bool = False

    @property
    def curvature(self) -> Curvature:
        return self.stages[0].layer.curvature

    def forward(self, X: np.ndarray, training: bool = False) -> np.ndarray:
        for stage in self.stages:
            if isinstance(stage.layer, FggLinearLayer):
                X = fgg_forward_record(stage.layer, X, stage.batchnorm, training).y
            else:
                X = chen_forward_record(stage.layer, X, stage.batchnorm, training).y
        return X

    def forward_records(self, X: np.ndarray, training: bool = False):
        """Forward pass returning per-stage records (for backpropagation)."""
        records = []
        for stage in self.stages:
            if isinstance(stage.layer, FggLinearLayer):
                rec = fgg_forward_record(stage.layer, X, stage.batchnorm, training)
            else:
                rec = chen_forward_record(stage.layer, X, stage.batchnorm, training)
            records.append(rec)
            X = rec.y
        return records


def init_fgg_layer(
    rng: np.random.Generator,
    d_in: int,
    d_out: int,
    activation: ActivationKind,
    curvature: Curvature,
) -> FggLinearLayer:
    """Directions from a zero-mean Gaussian with std 1/sqrt(D_in), unit gains, zero biases."""
    a = rng.standard_normal((d_out, d_in)) / np.sqrt(d_in)
    return FggLinearLayer(
        WeightNormParam(np.ones(d_out), a), np.zeros(d_out), activation, curvature
    )


def init_chen_layer(
    rng: np.random.Generator, d_in: int, d_out: int, curvature: Curvature
) -> ChenLinearLayer:
    """Ambient weight matrix from a zero-mean Gaussian with std 1/sqrt(D_in+1)."""
    W = rng.standard_normal((d_out, d_in + 1)) / np.sqrt(d_in + 1)
    return ChenLinearLayer(W, curvature)
