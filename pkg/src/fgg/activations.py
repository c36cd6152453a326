"""Scalar nonlinearities and their curvature-conjugated (Lorentzian) versions.

The Lorentzian version of a scalar function h conjugates it by sinh/arcsinh
scaled by sqrt(kappa):

    h_lor(x) = arcsinh(sqrt(k) * h(sinh(sqrt(k) x) / sqrt(k))) / sqrt(k)

which recovers h as kappa tends to zero.  Applied to the layer pre-activations
(which are arcsinh-scaled Minkowski products), the conjugation cancels and the
layer's spatial output is just h of the raw Minkowski products.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BASES = ("identity", "relu", "leaky_relu", "tanh")
MODES = ("plain", "lorentzian")


@dataclass(frozen=True)
class ActivationKind:
    """A scalar base nonlinearity plus the mode it is applied in.

    base: one of identity | relu | leaky_relu | tanh (all monotone
    nondecreasing).  alpha is the leaky_relu slope.  mode "lorentzian" means
    the base is conjugated by sinh/arcsinh at the layer's curvature; "plain"
    applies the base directly to pre-activations.
    """

    base: str = "relu"
    mode: str = "lorentzian"
    alpha: float = 0.01

    def __post_init__(self):
        if self.base not in BASES:
            raise ValueError(f"unknown activation base {self.base!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown activation mode {self.mode!r}")
        if self.base == "leaky_relu" and not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"leaky_relu slope must be in [0, 1), got {self.alpha}")


def apply_base(kind: ActivationKind, x: np.ndarray) -> np.ndarray:
    """Evaluate the base nonlinearity elementwise."""
    x = np.asarray(x, dtype=np.float64)
    if kind.base == "identity":
        return x.copy()
    if kind.base == "relu":
        return np.maximum(x, 0.0)
    if kind.base == "leaky_relu":
        return np.where(x > 0.0, x, kind.alpha * x)
    return np.tanh(x)


def base_derivative(kind: ActivationKind, x: np.ndarray) -> np.ndarray:
    """Elementwise derivative of the base; relu's subgradient at 0 is 0."""
    x = np.asarray(x, dtype=np.float64)
    if kind.base == "identity":
        return np.ones_like(x)
    if kind.base == "relu":
        return (x > 0.0).astype(np.float64)
    if kind.base == "leaky_relu":
        return np.where(x > 0.0, 1.0, kind.alpha)
    t = np.tanh(x)
    return 1.0 - t * t


def lorentzian_activation(kind: ActivationKind, x: np.ndarray | float, kappa: float):
    """The Lorentzian version of the base nonlinearity at curvature kappa.

    Requires mode "lorentzian"; with an identity base this is the identity map
    for every kappa.
    """
    if kind.mode != "lorentzian":
        raise ValueError("lorentzian_activation requires an ActivationKind in lorentzian mode")
    sk = np.sqrt(kappa)
    out = np.arcsinh(sk * apply_base(kind, np.sinh(sk * np.asarray(x, dtype=np.float64)) / sk)) / sk
    return out if out.ndim else float(out)


def apply_to_preactivation(kind: ActivationKind, z: np.ndarray, kappa: float) -> np.ndarray:
    """Activation value a = act(z) for pre-activations z, honoring the mode."""
    if kind.mode == "lorentzian":
        return np.asarray(lorentzian_activation(kind, z, kappa))
    return apply_base(kind, z)


def spatial_from_products(kind: ActivationKind, m: np.ndarray, kappa: float) -> np.ndarray:
    """Spatial layer output sinh(sqrt(k)*act(z))/sqrt(k) written in terms of the
    raw Minkowski products m = sinh(sqrt(k) z)/sqrt(k).

    In lorentzian mode the conjugation cancels and this is exactly h(m); in
    plain mode the sinh/arcsinh pair is evaluated explicitly.
    """
    m = np.asarray(m, dtype=np.float64)
    if kind.mode == "lorentzian":
        return apply_base(kind, m)
    sk = np.sqrt(kappa)
    return np.sinh(sk * apply_base(kind, np.arcsinh(sk * m) / sk)) / sk


def spatial_from_products_grad(kind: ActivationKind, m: np.ndarray, kappa: float) -> np.ndarray:
    """Elementwise derivative of spatial_from_products with respect to m."""
    m = np.asarray(m, dtype=np.float64)
    if kind.mode == "lorentzian":
        return base_derivative(kind, m)
    sk = np.sqrt(kappa)
    z = np.arcsinh(sk * m) / sk
    h = apply_base(kind, z)
    # d/dm [sinh(sk*h(z))/sk] = cosh(sk*h(z)) * h'(z) / sqrt(1 + k*m^2)
    return np.cosh(sk * h) * base_derivative(kind, z) / np.sqrt(1.0 + kappa * m * m)
