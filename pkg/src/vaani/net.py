"""Sigmoid feedforward network with co-activation regularization.

The canonical acoustic model (``NetSpec``) has seven weight layers: a fixed
input-normalization affine layer followed by six trainable ones, sigmoid on
every hidden layer and softmax on the output.  The math below works for any
depth so small hand-checkable nets exercise the same code paths.

Co-activation statistics summarize a layer's activations on matched-condition
data as a mean vector and inverse covariance matrix.  The penalty is the
Mahalanobis distance of a batch's activation means from those statistics,
summed over monitored layers; its gradient flows into the monitored layers
during backpropagation, which lets adaptation run without labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeMismatch

DEFAULT_RIDGE = 1e-3
CANONICAL_LAYERS = 7


@dataclass(frozen=True)
class NetSpec:
    """The canonical seven-layer architecture.

    ``layer_dims`` has eight entries (input plus seven layers); ``trainable``
    has one flag per weight layer, with at least one layer on each side.
    """

    layer_dims: tuple[int, ...]
    trainable: tuple[bool, ...]

    def __post_init__(self):
        if len(self.layer_dims) != CANONICAL_LAYERS + 1:
            raise ValueError(
                "layer_dims needs %d entries, got %d"
                % (CANONICAL_LAYERS + 1, len(self.layer_dims))
            )
        if len(self.trainable) != CANONICAL_LAYERS:
            raise ValueError(
                "trainable needs %d flags, got %d" % (CANONICAL_LAYERS, len(self.trainable))
            )
        if any(d < 1 for d in self.layer_dims):
            raise ValueError("layer dims must be positive")
        if not any(self.trainable) or all(self.trainable):
            raise ValueError("need at least one trainable and one non-trainable layer")

    def build(self, seed: int = 0) -> "NetState":
        return init_net(self.layer_dims, self.trainable, seed)


def default_spec(num_classes: int, input_dim: int = 24, hidden_dim: int = 64) -> NetSpec:
    dims = (input_dim,) + (hidden_dim,) * (CANONICAL_LAYERS - 1) + (num_classes,)
    return NetSpec(dims, (False,) + (True,) * (CANONICAL_LAYERS - 1))


class NetState:
    """Weights and biases, one pair per layer, plus per-layer trainable flags."""

    def __init__(self, weights: list[np.ndarray], biases: list[np.ndarray],
                 trainable: tuple[bool, ...]):
        if not weights or len(weights) != len(biases) or len(weights) != len(trainable):
            raise ShapeMismatch("weights, biases and trainable flags must align")
        for i, (w, b) in enumerate(zip(weights, biases)):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise ShapeMismatch("layer %d weight/bias shapes disagree" % i)
            if i > 0 and weights[i - 1].shape[1] != w.shape[0]:
                raise ShapeMismatch("layer %d input dim breaks the chain" % i)
        self.weights = weights
        self.biases = biases
        self.trainable = tuple(bool(t) for t in trainable)

    @property
    def num_layers(self) -> int:
        return len(self.weights)

    @property
    def layer_dims(self) -> tuple[int, ...]:
        return (self.weights[0].shape[0],) + tuple(w.shape[1] for w in self.weights)

    def copy(self) -> "NetState":
        return NetState([w.copy() for w in self.weights],
                        [b.copy() for b in self.biases], self.trainable)


def init_net(layer_dims, trainable, seed: int = 0) -> NetState:
    """Seeded Gaussian init scaled by 1/sqrt(fan-in); zero biases."""
    dims = tuple(int(d) for d in layer_dims)
    rng = np.random.default_rng(seed)
    weights = [rng.normal(0.0, 1.0 / np.sqrt(dims[i]), (dims[i], dims[i + 1]))
               for i in range(len(dims) - 1)]
    biases = [np.zeros(dims[i + 1]) for i in range(len(dims) - 1)]
    return NetState(weights, biases, tuple(trainable))


def set_input_normalization(net: NetState, mean: np.ndarray, std: np.ndarray,
                            seed: int = 0) -> None:
    """Fix layer 0 to a whitening affine map from training-set statistics.

    The layer computes ((x - mean) / std) @ R with a seeded projection R,
    so downstream sigmoids see roughly zero-mean unit-variance inputs.
    """
    mean = np.asarray(mean, dtype=np.float64)
    std = np.asarray(std, dtype=np.float64)
    in_dim, out_dim = net.weights[0].shape
    if mean.shape != (in_dim,) or std.shape != (in_dim,):
        raise ShapeMismatch("normalization stats must match the input dim")
    if np.any(std <= 0):
        raise ValueError("std entries must be positive")
    rng = np.random.default_rng(seed)
    projection = rng.normal(0.0, 1.0 / np.sqrt(in_dim), (in_dim, out_dim))
    net.weights[0] = projection / std[:, None]
    net.biases[0] = -(mean / std) @ projection


def sigmoid(z: np.ndarray) -> np.ndarray:
    # exp(-softplus(-z)) is stable for large |z| in both directions
    return np.exp(-np.logaddexp(0.0, -z))


def softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


@dataclass
class ForwardPass:
    activations: list[np.ndarray]  # [input, hidden 1, ..., hidden L-1]
    logits: np.ndarray
    posteriors: np.ndarray

    @property
    def hidden(self) -> list[np.ndarray]:
        return self.activations[1:]


def forward(net: NetState, batch: np.ndarray) -> ForwardPass:
    """Sigmoid hidden layers, softmax output; returns every activation."""
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[1] != net.layer_dims[0]:
        raise ShapeMismatch(
            "batch must be N x %d, got %r" % (net.layer_dims[0], batch.shape)
        )
    acts = [batch]
    for i in range(net.num_layers - 1):
        acts.append(sigmoid(acts[-1] @ net.weights[i] + net.biases[i]))
    logits = acts[-1] @ net.weights[-1] + net.biases[-1]
    return ForwardPass(acts, logits, softmax(logits))


def monitored_activation(fp: ForwardPass, layer_id: int, num_layers: int) -> np.ndarray:
    """Layer ids 1..L-1 are hidden activations; id L is the output posteriors."""
    if layer_id == num_layers:
        return fp.posteriors
    if 1 <= layer_id < num_layers:
        return fp.activations[layer_id]
    raise ShapeMismatch("layer id %d out of range for %d layers" % (layer_id, num_layers))


def coact_stats(activations: np.ndarray, ridge: float = DEFAULT_RIDGE):
    """Column mean and ridge-regularized inverse covariance of activations."""
    a = np.asarray(activations, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1:
        raise ShapeMismatch("need an N x H activation matrix with N >= 1")
    if ridge <= 0:
        raise ValueError("ridge must be positive")
    mean = a.mean(axis=0)
    centered = a - mean
    cov = (centered.T @ centered) / a.shape[0] + ridge * np.eye(a.shape[1])
    precision = np.linalg.inv(cov)
    return mean, (precision + precision.T) / 2.0


@dataclass(frozen=True)
class CoactPrior:
    """Per monitored layer: activation mean and inverse covariance."""

    layers: tuple[int, ...]
    means: tuple[np.ndarray, ...]
    precisions: tuple[np.ndarray, ...]
    ridge: float = DEFAULT_RIDGE


def collect_prior(net: NetState, data: np.ndarray, monitored: list[int] | None = None,
                  ridge: float = DEFAULT_RIDGE, include_output: bool = False) -> CoactPrior:
    """Record co-activation statistics on matched-condition data.

    Defaults to every hidden layer; the output posteriors join only when
    ``include_output`` is set.
    """
    fp = forward(net, data)
    if monitored is None:
        monitored = list(range(1, net.num_layers))
        if include_output:
            monitored.append(net.num_layers)
    means, precisions = [], []
    for layer_id in monitored:
        m, p = coact_stats(monitored_activation(fp, layer_id, net.num_layers), ridge)
        means.append(m)
        precisions.append(p)
    return CoactPrior(tuple(monitored), tuple(means), tuple(precisions), ridge)


def coact_penalty(batch_means, prior: CoactPrior) -> float:
    """Sum over monitored layers of (m - mu)^T P (m - mu)."""
    if len(batch_means) != len(prior.layers):
        raise ShapeMismatch(
            "got %d means for %d monitored layers" % (len(batch_means), len(prior.layers))
        )
    total = 0.0
    for m, mu, p in zip(batch_means, prior.means, prior.precisions):
        m = np.asarray(m, dtype=np.float64)
        if m.shape != mu.shape:
            raise ShapeMismatch("mean shape %r does not match prior %r" % (m.shape, mu.shape))
        d = m - mu
        total += float(d @ p @ d)
    return total


def batch_penalty(net: NetState, batch: np.ndarray, prior: CoactPrior) -> float:
    """Co-activation penalty of one batch under a recorded prior."""
    fp = forward(net, batch)
    means = [monitored_activation(fp, lid, net.num_layers).mean(axis=0)
             for lid in prior.layers]
    return coact_penalty(means, prior)


def cross_entropy(posteriors: np.ndarray, targets: np.ndarray) -> float:
    """Mean negative log posterior of the target classes."""
    rows = np.arange(len(targets))
    with np.errstate(divide="ignore"):
        return float(-np.mean(np.log(posteriors[rows, targets])))


def _check_targets(targets, num_classes: int) -> np.ndarray:
    t = np.asarray(targets)
    if t.ndim != 1 or not np.issubdtype(t.dtype, np.integer):
        raise ShapeMismatch("targets must be a 1-D integer array")
    if t.size and (t.min() < 0 or t.max() >= num_classes):
        raise ShapeMismatch("target out of range for %d classes" % num_classes)
    return t


def loss(net: NetState, batch: np.ndarray, targets, prior: CoactPrior | None = None,
         lam: float = 0.0) -> float:
    """Mean cross-entropy plus lam times the co-activation penalty."""
    fp = forward(net, batch)
    targets = _check_targets(targets, net.layer_dims[-1])
    if len(targets) != fp.logits.shape[0]:
        raise ShapeMismatch("targets must match the batch rows")
    # CE from logits: logsumexp(z) - z[target], stable for extreme logits
    zmax = fp.logits.max(axis=1)
    lse = zmax + np.log(np.exp(fp.logits - zmax[:, None]).sum(axis=1))
    total = float(np.mean(lse - fp.logits[np.arange(len(targets)), targets]))
    if prior is not None and lam != 0.0:
        means = [monitored_activation(fp, lid, net.num_layers).mean(axis=0)
                 for lid in prior.layers]
        total += lam * coact_penalty(means, prior)
    return total


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]


def backward(net: NetState, batch: np.ndarray, targets=None,
             prior: CoactPrior | None = None, lam: float = 0.0) -> Gradients:
    """Exact gradients of ``loss`` for every layer.

    ``targets=None`` drops the cross-entropy term (penalty-only gradients,
    the unsupervised adaptation case).  Non-trainable layers report zero
    parameter gradients but still propagate signal downward.
    """
    fp = forward(net, batch)
    n = batch.shape[0]
    num_layers = net.num_layers

    # penalty gradient w.r.t. each monitored activation: (2 lam / N) P (m - mu),
    # identical for every row of the batch
    extra: dict[int, np.ndarray] = {}
    if prior is not None and lam != 0.0:
        for k, layer_id in enumerate(prior.layers):
            a = monitored_activation(fp, layer_id, num_layers)
            d = a.mean(axis=0) - prior.means[k]
            if d.shape != prior.means[k].shape:
                raise ShapeMismatch("prior dims do not match layer %d" % layer_id)
            extra[layer_id] = (2.0 * lam / n) * (prior.precisions[k] @ d)

    if targets is None:
        dz = np.zeros_like(fp.posteriors)
    else:
        targets = _check_targets(targets, net.layer_dims[-1])
        if len(targets) != n:
            raise ShapeMismatch("targets must match the batch rows")
        onehot = np.zeros_like(fp.posteriors)
        onehot[np.arange(n), targets] = 1.0
        dz = (fp.posteriors - onehot) / n  # joint softmax + CE gradient
    if num_layers in extra:
        dpost = np.broadcast_to(extra[num_layers], fp.posteriors.shape)
        inner = np.sum(dpost * fp.posteriors, axis=1, keepdims=True)
        dz = dz + fp.posteriors * (dpost - inner)

    grad_w: list[np.ndarray] = [np.empty(0)] * num_layers
    grad_b: list[np.ndarray] = [np.empty(0)] * num_layers
    for i in range(num_layers - 1, -1, -1):
        if net.trainable[i]:
            grad_w[i] = fp.activations[i].T @ dz
            grad_b[i] = dz.sum(axis=0)
        else:
            grad_w[i] = np.zeros_like(net.weights[i])
            grad_b[i] = np.zeros_like(net.biases[i])
        if i > 0:
            da = dz @ net.weights[i].T
            if i in extra:
                da = da + extra[i]
            a = fp.activations[i]
            dz = da * a * (1.0 - a)
    return Gradients(grad_w, grad_b)


@dataclass
class EpochMetrics:
    epoch: int
    loss: float
    accuracy: float


@dataclass
class TrainResult:
    net: NetState
    metrics: list[EpochMetrics] = field(default_factory=list)


def predict(net: NetState, batch: np.ndarray) -> np.ndarray:
    return np.argmax(forward(net, batch).posteriors, axis=1)


def accuracy(net: NetState, batch: np.ndarray, targets) -> float:
    return float(np.mean(predict(net, batch) == np.asarray(targets)))


def train(net: NetState, features: np.ndarray, labels, *, epochs: int, lr: float,
          batch_size: int = 32, lam: float = 0.0, prior: CoactPrior | None = None,
          seed: int = 0) -> TrainResult:
    """Mini-batch gradient descent, deterministic given the seed.

    Returns a new NetState; per-epoch metrics report full-set loss and
    frame accuracy after that epoch's updates.
    """
    features = np.asarray(features, dtype=np.float64)
    labels = _check_targets(labels, net.layer_dims[-1])
    net = net.copy()
    rng = np.random.default_rng(seed)
    metrics: list[EpochMetrics] = []
    for epoch in range(epochs):
        order = rng.permutation(len(features))
        for start in range(0, len(order), batch_size):
            idx = order[start:start + batch_size]
            grads = backward(net, features[idx], labels[idx], prior, lam)
            for i in range(net.num_layers):
                if net.trainable[i]:
                    net.weights[i] -= lr * grads.weights[i]
                    net.biases[i] -= lr * grads.biases[i]
        metrics.append(EpochMetrics(
            epoch,
            loss(net, features, labels, prior, lam),
            accuracy(net, features, labels),
        ))
    return TrainResult(net, metrics)


@dataclass
class AdaptResult:
    net: NetState
    penalty_trace: list[float] = field(default_factory=list)


def adapt(net: NetState, batches, prior: CoactPrior, *, lam: float, steps: int,
          lr: float, layer_schedule: list[list[int]] | None = None) -> AdaptResult:
    """Unsupervised adaptation: gradient steps on the penalty alone.

    ``layer_schedule`` is a list of phases, each naming the layers to update;
    steps divide evenly across phases (earlier phases take the remainder).
    The default is one phase covering every trainable layer.  The trace
    records the penalty of the step's batch before each update, plus the
    final value.
    """
    if isinstance(batches, np.ndarray):
        batches = [batches]
    if not batches:
        raise ShapeMismatch("need at least one adaptation batch")
    if layer_schedule is None:
        layer_schedule = [[i for i in range(net.num_layers) if net.trainable[i]]]
    net = net.copy()
    trace: list[float] = []
    phase_steps = [steps // len(layer_schedule)] * len(layer_schedule)
    for k in range(steps % len(layer_schedule)):
        phase_steps[k] += 1
    step = 0
    for phase, layers in enumerate(layer_schedule):
        unfrozen = [i for i in layers if net.trainable[i]]
        for _ in range(phase_steps[phase]):
            batch = np.asarray(batches[step % len(batches)], dtype=np.float64)
            trace.append(batch_penalty(net, batch, prior))
            grads = backward(net, batch, None, prior, lam)
            for i in unfrozen:
                net.weights[i] -= lr * grads.weights[i]
                net.biases[i] -= lr * grads.biases[i]
            step += 1
    if step:
        final_batch = np.asarray(batches[(step - 1) % len(batches)], dtype=np.float64)
        trace.append(batch_penalty(net, final_batch, prior))
    return AdaptResult(net, trace)
