"""Versioned on-disk format for layers and inference caches.

A model file is a JSON document:

    {
      "format": "fgg-model" | "fgg-cache" | "chen-model",
      "format_version": 1,
      "kappa": <float>,
      "dims": [d_in, d_out],
      "activation": {"base": ..., "mode": ..., "alpha": ...},   # not for chen
      "arrays": {<name>: <array>, ...},
      "checksum": "sha256:<hex>"
    }

Arrays are float64, either as explicit JSON numbers ("encoding": "text",
round-trips through repr) or as a little-endian binary blob ("encoding":
"b64-le-f64", bit-exact by construction).  Model files carry g/a/b (the
weight-normalized parameters), cache files carry V, baseline files carry W;
an optional bn_running_mean array stores normalizer state.  The checksum is
over the canonical JSON of everything else and guards against corruption.
"""

from __future__ import annotations

import base64
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .activations import ActivationKind
from .geometry import Curvature
from .layers import ChenLinearLayer, FggLinearLayer, LayerCache, WeightNormParam

FORMAT_VERSION = 1
_KINDS = ("fgg-model", "fgg-cache", "chen-model")


class ModelFileError(ValueError):
    """Malformed, corrupt, or unsupported model file."""


class VersionMismatchError(ModelFileError):
    pass


class ChecksumMismatchError(ModelFileError):
    pass


@dataclass
class LoadedModel:
    """A deserialized layer or cache plus optional normalizer state."""

    model: FggLinearLayer | ChenLinearLayer | LayerCache
    bn_running_mean: np.ndarray | None = None


def _encode_array(arr: np.ndarray, encoding: str) -> dict:
    arr = np.ascontiguousarray(arr, dtype="<f8")
    if encoding == "binary":
        return {
            "shape": list(arr.shape),
            "encoding": "b64-le-f64",
            "data": base64.b64encode(arr.tobytes()).decode("ascii"),
        }
    return {"shape": list(arr.shape), "encoding": "text", "data": arr.ravel().tolist()}


def _decode_array(spec: dict) -> np.ndarray:
    try:
        shape = tuple(spec["shape"])
        if spec["encoding"] == "b64-le-f64":
            flat = np.frombuffer(base64.b64decode(spec["data"]), dtype="<f8")
        elif spec["encoding"] == "text":
            flat = np.asarray(spec["data"], dtype=np.float64)
        else:
            raise ModelFileError(f"unknown array encoding {spec['encoding']!r}")
        return flat.reshape(shape).astype(np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelFileError):
            raise
        raise ModelFileError(f"malformed array record: {exc}") from exc


def _checksum(doc: dict) -> str:
    payload = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return "sha256:" + hashlib.sha256(payload).hexdigest()


def _document(model, bn_running_mean, encoding: str) -> dict:
    arrays: dict[str, dict] = {}
    if isinstance(model, FggLinearLayer):
        kind = "fgg-model"
        dims = [model.d_in, model.d_out]
        kappa = model.curvature.kappa
        activation = {
            "base": model.activation.base,
            "mode": model.activation.mode,
            "alpha": model.activation.alpha,
        }
        arrays["g"] = _encode_array(model.params.g, encoding)
        arrays["a"] = _encode_array(model.params.a, encoding)
        arrays["b"] = _encode_array(model.b, encoding)
    elif isinstance(model, LayerCache):
        kind = "fgg-cache"
        dims = [model.d_in, model.d_out]
        kappa = model.curvature.kappa
        activation = {
            "base": model.activation.base,
            "mode": model.activation.mode,
            "alpha": model.activation.alpha,
        }
        arrays["V"] = _encode_array(model.V, encoding)
    elif isinstance(model, ChenLinearLayer):
        kind = "chen-model"
        dims = [model.d_in, model.d_out]
        kappa = model.curvature.kappa
        activation = None
        arrays["W"] = _encode_array(model.W, encoding)
    else:
        raise TypeError(f"cannot serialize object of type {type(model).__name__}")
    if bn_running_mean is not None:
        arrays["bn_running_mean"] = _encode_array(np.asarray(bn_running_mean), encoding)
    doc = {
        "format": kind,
        "format_version": FORMAT_VERSION,
        "kappa": float(kappa),
        "dims": dims,
        "activation": activation,
        "arrays": arrays,
    }
    doc["checksum"] = _checksum(doc)
    return doc


def save_model(
    model,
    path: str | Path,
    bn_running_mean: np.ndarray | None = None,
    encoding: str = "binary",
) -> None:
    """Write a layer or cache to a versioned, checksummed JSON document."""
    if encoding not in ("binary", "text"):
        raise ValueError(f"encoding must be 'binary' or 'text', got {encoding!r}")
    doc = _document(model, bn_running_mean, encoding)
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def load_model(path: str | Path) -> LoadedModel:
    """Read a model file, verifying version and checksum.

    Cache files come back as LayerCache objects: inference-only until
    invert_cache recovers the parameters.
    """
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"not a valid model file: {exc}") from exc
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise ModelFileError("not a model file (missing format_version)")
    if doc["format_version"] != FORMAT_VERSION:
        raise VersionMismatchError(
            f"unsupported format_version {doc['format_version']!r}; this build reads {FORMAT_VERSION}"
        )
    stated = doc.pop("checksum", None)
    if stated != _checksum(doc):
        raise ChecksumMismatchError("checksum mismatch: file is corrupt or was edited")
    kind = doc.get("format")
    if kind not in _KINDS:
        raise ModelFileError(f"unknown format kind {kind!r}")
    try:
        curvature = Curvature(float(doc["kappa"]))
        arrays = {name: _decode_array(spec) for name, spec in doc["arrays"].items()}
        bn = arrays.pop("bn_running_mean", None)
        if kind == "fgg-model":
            act = ActivationKind(**doc["activation"])
            model = FggLinearLayer(
                WeightNormParam(arrays["g"], arrays["a"]), arrays["b"], act, curvature
            )
        elif kind == "fgg-cache":
            act = ActivationKind(**doc["activation"])
            model = LayerCache(arrays["V"], curvature, act)
        else:
            model = ChenLinearLayer(arrays["W"], curvature)
    except (KeyError, TypeError) as exc:
        raise ModelFileError(f"malformed model file: {exc}") from exc
    return LoadedModel(model, bn)
