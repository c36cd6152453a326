"""Shared oracles for the test suite: brute-force geodesic sampling and
random instance generators kept independent of the closed forms they check."""

import numpy as np

from fgg import geometry as geo
from fgg import hyperplanes as hp


def tangent_basis_at(p: np.ndarray, kappa: float) -> np.ndarray:
    """Orthonormal (Minkowski) basis of the tangent space at p, rows as vectors."""
    dim = p.shape[-1] - 1
    basis = []
    for i in range(dim + 1):
        e = np.zeros(dim + 1)
        e[i] = 1.0
        v = geo.tangent_project(p, e, kappa)
        for u in basis:
            v = v - geo.minkowski_inner(v, u) * u
        sq = geo.lorentz_norm_sq(v)
        if sq > 1e-12:
            basis.append(v / np.sqrt(sq))
        if len(basis) == dim:
            break
    return np.array(basis)


def hyperplane_distance_by_sampling(
    params: hp.HyperplaneParams, x: np.ndarray, n_samples: int = 100_000
) -> float:
    """Minimum distance from x to a dense sweep of the hyperplane geodesic.

    Only for D = 2, where the hyperplane is a single geodesic through the
    reference point orthogonal to the transported normal.
    """
    kappa = params.curvature.kappa
    p = hp.reference_point(params).ambient
    v = hp.transported_normal(params).v
    vhat = v / np.sqrt(geo.lorentz_norm_sq(v))
    # tangent direction along the hyperplane: orthogonalize a basis vector
    # against the unit normal
    h = None
    for cand in tangent_basis_at(p, kappa):
        w = cand - geo.minkowski_inner(cand, vhat) * vhat
        sq = geo.lorentz_norm_sq(w)
        if sq > 1e-8:
            h = w / np.sqrt(sq)
            break
    assert h is not None
    reach = 2.0 * geo.distance(x, p, kappa) + 0.5
    ts = np.linspace(-reach, reach, n_samples)
    points = geo.exp_map(np.broadcast_to(p, (n_samples, 3)), ts[:, None] * h, kappa)
    return float(np.min(geo.distance(points, x, kappa)))


def random_hyperplane_params(rng: np.random.Generator, dim: int, kappa: float) -> hp.HyperplaneParams:
    """Random weights/bias with the reference point within hyperbolic norm 2."""
    w = rng.standard_normal(dim)
    w *= rng.uniform(0.3, 3.0) / np.linalg.norm(w)
    offset = rng.uniform(-2.0, 2.0) / np.sqrt(kappa)
    b = -offset * float(np.linalg.norm(w))
    return hp.HyperplaneParams(w, b, geo.Curvature(kappa))


def random_fgg_layer(rng, d_in, d_out, kappa=1.0, activation=None):
    from fgg.activations import ActivationKind
    from fgg.layers import FggLinearLayer, WeightNormParam

    if activation is None:
        activation = ActivationKind("relu", "lorentzian")
    g = rng.uniform(0.3, 2.0, size=d_out)
    a = rng.standard_normal((d_out, d_in))
    b = rng.uniform(-1.5, 1.5, size=d_out)
    return FggLinearLayer(WeightNormParam(g, a), b, activation, geo.Curvature(kappa))


def random_chen_layer(rng, d_in, d_out, kappa=1.0):
    from fgg.layers import ChenLinearLayer

    W = rng.standard_normal((d_out, d_in + 1)) / np.sqrt(d_in + 1)
    return ChenLinearLayer(W, geo.Curvature(kappa))
