"""Model persistence: one .npz container for net, priors and metadata.

The container is versioned and pickle-free.  Arrays: layer dims, trainable
flags and row-major weight/bias pairs; optionally the state-label table,
the feature recipe and per-layer co-activation priors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MalformedContainer
from .features import FeatureConfig
from .net import CoactPrior, NetState

FORMAT_VERSION = 1


@dataclass
class ModelBundle:
    net: NetState
    state_labels: tuple[str, ...] | None = None
    feature_config: FeatureConfig | None = None
    prior: CoactPrior | None = None


def save_model(path, bundle: ModelBundle) -> None:
    net = bundle.net
    arrays: dict[str, np.ndarray] = {
        "format_version": np.array(FORMAT_VERSION, dtype=np.int64),
        "layer_dims": np.array(net.layer_dims, dtype=np.int64),
        "trainable": np.array(net.trainable, dtype=np.uint8),
    }
    for i in range(net.num_layers):
        arrays["weight_%d" % i] = np.ascontiguousarray(net.weights[i])
        arrays["bias_%d" % i] = np.ascontiguousarray(net.biases[i])
    if bundle.state_labels is not None:
        arrays["state_labels"] = np.array(bundle.state_labels, dtype=np.str_)
    if bundle.feature_config is not None:
        cfg = bundle.feature_config
        arrays["feature_params"] = np.array(
            [cfg.window_samples, cfg.shift_samples, cfg.num_bands], dtype=np.int64
        )
        arrays["feature_log_floor"] = np.array(cfg.log_floor, dtype=np.float64)
    if bundle.prior is not None:
        prior = bundle.prior
        arrays["prior_layers"] = np.array(prior.layers, dtype=np.int64)
        arrays["prior_ridge"] = np.array(prior.ridge, dtype=np.float64)
        for k in range(len(prior.layers)):
            arrays["prior_mean_%d" % k] = np.ascontiguousarray(prior.means[k])
            arrays["prior_prec_%d" % k] = np.ascontiguousarray(prior.precisions[k])
    np.savez(path, **arrays)


def load_model(path) -> ModelBundle:
    try:
        data = np.load(path, allow_pickle=False)
    except (OSError, ValueError) as exc:
        raise MalformedContainer("cannot read model file: %s" % exc) from exc
    with data:
        if "format_version" not in data:
            raise MalformedContainer("missing format_version")
        version = int(data["format_version"])
        if version != FORMAT_VERSION:
            raise MalformedContainer("unsupported model format version %d" % version)
        try:
            dims = data["layer_dims"]
            trainable = tuple(bool(t) for t in data["trainable"])
            weights = [data["weight_%d" % i] for i in range(len(dims) - 1)]
            biases = [data["bias_%d" % i] for i in range(len(dims) - 1)]
        except KeyError as exc:
            raise MalformedContainer("missing array: %s" % exc) from exc
        net = NetState(weights, biases, trainable)

        labels = None
        if "state_labels" in data:
            labels = tuple(str(s) for s in data["state_labels"])
        feature_config = None
        if "feature_params" in data:
            window, shift, bands = (int(v) for v in data["feature_params"])
            feature_config = FeatureConfig(window, shift, bands,
                                           float(data["feature_log_floor"]))
        prior = None
        if "prior_layers" in data:
            layer_ids = tuple(int(v) for v in data["prior_layers"])
            prior = CoactPrior(
                layer_ids,
                tuple(data["prior_mean_%d" % k] for k in range(len(layer_ids))),
                tuple(data["prior_prec_%d" % k] for k in range(len(layer_ids))),
                float(data["prior_ridge"]),
            )
    return ModelBundle(net, labels, feature_config, prior)
