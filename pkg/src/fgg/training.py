"""Hand-derived reverse-mode gradients, a finite-difference oracle, and
stochastic gradient descent with an optional bound on the update norm.

The operation set is small enough that a general tape buys nothing: each layer
kind gets one backward function written against its forward record, and the
central-difference oracle keeps them honest.  All trainable parameters live in
flat Euclidean space (gains, directions, biases, ambient matrices), so plain
gradient descent applies without Riemannian machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .activations import spatial_from_products_grad
from .layers import (
    ChenForwardRecord,
    ChenLinearLayer,
    FggForwardRecord,
    FggLinearLayer,
)


@dataclass
class ParamGradient:
    """Loss gradients for a distance layer's parameters (gain, direction, bias)."""

    d_g: np.ndarray
    d_a: np.ndarray
    d_b: np.ndarray

    def arrays(self) -> list[np.ndarray]:
        return [self.d_g, self.d_a, self.d_b]


@dataclass
class ChenGradient:
    """Loss gradient for the baseline layer's ambient weight matrix."""

    d_W: np.ndarray

    def arrays(self) -> list[np.ndarray]:
        return [self.d_W]


def _fold_time_gradient(upstream: np.ndarray, ybar: np.ndarray, y: np.ndarray) -> np.ndarray:
    # y_time = sqrt(1/kappa + |ybar|^2), so d y_time / d ybar = ybar / y_time
    return upstream[:, 1:] + upstream[:, :1] * (ybar / y[:, :1])


def fgg_backward(record: FggForwardRecord, upstream: np.ndarray) -> tuple[ParamGradient, np.ndarray]:
    """Gradients of a scalar loss through one distance-layer forward pass.

    upstream is dL/dy over the full ambient outputs (N, D_out+1); returns the
    parameter gradients and dL/dX over the ambient inputs.
    """
    if record is None:
        raise ValueError("missing forward record: run fgg_forward_record first")
    upstream = np.asarray(upstream, dtype=np.float64)
    if upstream.shape != record.y.shape:
        raise ValueError(f"upstream shape {upstream.shape} != output shape {record.y.shape}")
    layer = record.layer
    kappa = layer.curvature.kappa
    sk = np.sqrt(kappa)

    d_ybar = _fold_time_gradient(upstream, record.ybar, record.y)
    d_U = d_ybar * spatial_from_products_grad(layer.activation, record.U, kappa)
    if record.Z is not None:
        d_Zc = d_U * np.cosh(sk * record.Zc)
        if record.bn_training:
            d_Z = d_Zc - d_Zc.mean(axis=0)  # centering couples the batch
        else:
            d_Z = d_Zc
        d_M = d_Z / np.sqrt(1.0 + kappa * record.M * record.M)
    else:
        d_M = d_U

    X_I = record.X.copy()
    X_I[:, 0] = -X_I[:, 0]
    d_V = d_M.T @ X_I
    d_X = d_M @ record.V
    d_X[:, 0] = -d_X[:, 0]

    # transported-normal rows v = (n sinh(theta), cosh(theta) w) with
    # n = |w| and theta = -sqrt(kappa) b / n
    W = record.W
    n = np.linalg.norm(W, axis=1)
    theta = -sk * layer.b / n
    sinh_t, cosh_t = np.sinh(theta), np.cosh(theta)
    what = W / n[:, None]
    d_vt = d_V[:, 0]
    d_vs = d_V[:, 1:]
    dot = np.sum(what * d_vs, axis=1)
    d_W = (
        (d_vt * (sinh_t - theta * cosh_t) - theta * sinh_t * dot)[:, None] * what
        + cosh_t[:, None] * d_vs
    )
    d_b = -sk * (cosh_t * d_vt + sinh_t * dot)

    # weight normalization w = g * a / |a|
    a = layer.params.a
    na = np.linalg.norm(a, axis=1)
    ahat = a / na[:, None]
    d_g = np.sum(ahat * d_W, axis=1)
    d_a = (layer.params.g / na)[:, None] * (d_W - d_g[:, None] * ahat)

    return ParamGradient(d_g, d_a, d_b), d_X


def chen_backward(record: ChenForwardRecord, upstream: np.ndarray) -> tuple[ChenGradient, np.ndarray]:
    """Gradients through one baseline-layer forward pass."""
    if record is None:
        raise ValueError("missing forward record: run chen_forward_record first")
    upstream = np.asarray(upstream, dtype=np.float64)
    if upstream.shape != record.y.shape:
        raise ValueError(f"upstream shape {upstream.shape} != output shape {record.y.shape}")
    d_ybar = _fold_time_gradient(upstream, record.ybar, record.y)
    if record.ybar is not record.WX and record.bn_training:
        d_ybar = d_ybar - d_ybar.mean(axis=0)
    d_W = d_ybar.T @ record.X
    d_X = d_ybar @ record.layer.W
    return ChenGradient(d_W), d_X


def backward(record, upstream: np.ndarray):
    """Dispatch to the record's layer kind."""
    if isinstance(record, FggForwardRecord):
        return fgg_backward(record, upstream)
    if isinstance(record, ChenForwardRecord):
        return chen_backward(record, upstream)
    raise ValueError("missing forward record: run a *_forward_record first")


def stack_backward(records: Sequence, upstream: np.ndarray):
    """Chain backward through a stack's forward records.

    Returns per-stage gradients (aligned with the records) and dL/dX at the
    stack input.
    """
    grads = [None] * len(records)
    for i in reversed(range(len(records))):
        grads[i], upstream = backward(records[i], upstream)
    return grads, upstream


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------


def finite_difference_gradient(
    f: Callable[[list[np.ndarray]], float],
    params: Sequence[np.ndarray],
    step: float = 1e-5,
) -> list[np.ndarray]:
    """Central differences of a scalar function, coordinate by coordinate."""
    if step <= 0:
        raise ValueError("step must be positive")
    params = [np.array(p, dtype=np.float64) for p in params]
    grads = []
    for k, p in enumerate(params):
        g = np.zeros_like(p)
        flat = p.ravel()
        gflat = g.ravel()
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + step
            hi = f(params)
            flat[i] = keep - step
            lo = f(params)
            flat[i] = keep
            gflat[i] = (hi - lo) / (2.0 * step)
        grads.append(g)
    return grads


# ---------------------------------------------------------------------------
# stochastic gradient descent
# ---------------------------------------------------------------------------


@dataclass
class SgdConfig:
    """Constant-rate SGD, optionally with momentum and a hard cap on the
    Frobenius norm of each full parameter update."""

    learning_rate: float
    clip_norm: float | None = None
    momentum: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.clip_norm is not None and self.clip_norm <= 0:
            raise ValueError("clip_norm must be positive when set")


@dataclass
class Sgd:
    """Optimizer state: velocity buffers keyed by parameter identity."""

    cfg: SgdConfig
    _velocity: dict[int, np.ndarray] = field(default_factory=dict)

    def _param_arrays(self, layer) -> list[np.ndarray]:
        if isinstance(layer, FggLinearLayer):
            return [layer.params.g, layer.params.a, layer.b]
        if isinstance(layer, ChenLinearLayer):
            return [layer.W]
        raise TypeError(f"cannot optimize {type(layer).__name__}")

    def step(self, layers: Sequence, grads: Sequence) -> float:
        """Apply one update in place across all layers; returns the update norm.

        The raw update is -lr times the momentum-accumulated gradient; when
        clip_norm is set the whole update is rescaled so its Frobenius norm
        (across every parameter of every layer) never exceeds it.
        """
        if len(layers) != len(grads):
            raise ValueError("layers and grads must align")
        updates: list[tuple[np.ndarray, np.ndarray]] = []
        total_sq = 0.0
        for layer, grad in zip(layers, grads):
            for p, g in zip(self._param_arrays(layer), grad.arrays()):
                if not np.all(np.isfinite(g)):
                    raise ValueError("NaN or infinite gradient")
                if self.cfg.momentum:
                    vel = self._velocity.setdefault(id(p), np.zeros_like(p))
                    vel *= self.cfg.momentum
                    vel += g
                    g = vel
                delta = -self.cfg.learning_rate * g
                total_sq += float(np.sum(delta * delta))
                updates.append((p, delta))
        norm = float(np.sqrt(total_sq))
        scale = 1.0
        if self.cfg.clip_norm is not None and norm > self.cfg.clip_norm:
            scale = self.cfg.clip_norm / norm
        for p, delta in updates:
            p += scale * delta
        return norm * scale


def sgd_step(layer, grad, cfg: SgdConfig, optimizer: Sgd | None = None) -> float:
    """Single-layer convenience wrapper; returns the applied update norm."""
    opt = optimizer if optimizer is not None else Sgd(cfg)
    return opt.step([layer], [grad])
