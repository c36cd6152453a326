"""Lorentz-model hyperbolic geometry, distance-grounded linear layers, and a
desk-scale experiment harness."""

__version__ = "0.1.0"

from .activations import ActivationKind, lorentzian_activation
from .geometry import Curvature, LorentzPoint, TangentVector, origin, project_to_hyperboloid
from .hyperplanes import (
    HyperplaneParams,
    TransportedNormal,
    distance_to_hyperplane,
    hyperplane_residual,
    pre_activation_d2,
    reference_point,
    scaled_distance_d1,
    signed_distance,
    transported_normal,
)
from .layers import (
    ChenLinearLayer,
    FggLinearLayer,
    LayerCache,
    MeanOnlyBatchNorm,
    WeightNormParam,
    build_cache,
    cached_forward,
    chen_forward,
    fgg_forward,
    fgg_forward_decomposed,
    invert_cache,
    mean_only_batchnorm,
    weightnorm_effective,
)

__all__ = [
    "ActivationKind",
    "ChenLinearLayer",
    "Curvature",
    "FggLinearLayer",
    "HyperplaneParams",
    "LayerCache",
    "LorentzPoint",
    "MeanOnlyBatchNorm",
    "TangentVector",
    "TransportedNormal",
    "WeightNormParam",
    "build_cache",
    "cached_forward",
    "chen_forward",
    "distance_to_hyperplane",
    "fgg_forward",
    "fgg_forward_decomposed",
    "hyperplane_residual",
    "invert_cache",
    "lorentzian_activation",
    "mean_only_batchnorm",
    "origin",
    "pre_activation_d2",
    "project_to_hyperboloid",
    "reference_point",
    "scaled_distance_d1",
    "signed_distance",
    "transported_normal",
    "weightnorm_effective",
]
