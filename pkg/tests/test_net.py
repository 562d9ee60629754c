import math

import numpy as np
import pytest

from vaani.errors import ShapeMismatch
from vaani.net import (
    CoactPrior,
    NetSpec,
    NetState,
    accuracy,
    adapt,
    backward,
    batch_penalty,
    coact_penalty,
    coact_stats,
    collect_prior,
    cross_entropy,
    default_spec,
    forward,
    init_net,
    loss,
    set_input_normalization,
    train,
)


def small_random_net(rng, max_dim=8, max_depth=4):
    depth = int(rng.integers(2, max_depth + 1))
    dims = [int(rng.integers(1, max_dim + 1)) for _ in range(depth + 1)]
    trainable = [bool(rng.integers(0, 2)) for _ in range(depth)]
    if not any(trainable):
        trainable[int(rng.integers(0, depth))] = True
    net = init_net(dims, trainable, seed=int(rng.integers(0, 2**31)))
    return net


def numeric_gradients(objective, net, h=1e-5):
    """Central finite differences over every trainable parameter."""
    grad_w = [np.zeros_like(w) for w in net.weights]
    grad_b = [np.zeros_like(b) for b in net.biases]
    for i in range(net.num_layers):
        if not net.trainable[i]:
            continue
        w = net.weights[i]
        for idx in np.ndindex(w.shape):
            orig = w[idx]
            w[idx] = orig + h
            hi = objective(net)
            w[idx] = orig - h
            lo = objective(net)
            w[idx] = orig
            grad_w[i][idx] = (hi - lo) / (2.0 * h)
        b = net.biases[i]
        for idx in np.ndindex(b.shape):
            orig = b[idx]
            b[idx] = orig + h
            hi = objective(net)
            b[idx] = orig - h
            lo = objective(net)
            b[idx] = orig
            grad_b[i][idx] = (hi - lo) / (2.0 * h)
    return grad_w, grad_b


def assert_gradients_close(analytic, numeric, tol=1e-4):
    for a, n in zip(analytic, numeric):
        denom = np.maximum(1e-6, np.abs(a) + np.abs(n))
        rel = np.abs(a - n) / denom
        assert np.max(rel, initial=0.0) <= tol


class TestSpec:
    def test_default_spec(self):
        spec = default_spec(30)
        assert spec.layer_dims == (24, 64, 64, 64, 64, 64, 64, 30)
        assert spec.trainable == (False, True, True, True, True, True, True)
        net = spec.build(seed=1)
        assert net.num_layers == 7
        assert net.layer_dims == spec.layer_dims

    def test_rejects_wrong_layer_count(self):
        with pytest.raises(ValueError):
            NetSpec((24, 64, 30), (False, True))

    def test_rejects_all_trainable(self):
        with pytest.raises(ValueError):
            NetSpec((24,) + (64,) * 6 + (30,), (True,) * 7)
        with pytest.raises(ValueError):
            NetSpec((24,) + (64,) * 6 + (30,), (False,) * 7)

    def test_netstate_shape_validation(self):
        with pytest.raises(ShapeMismatch):
            NetState([np.zeros((2, 3)), np.zeros((4, 2))],
                     [np.zeros(3), np.zeros(2)], (True, True))


class TestForward:
    def test_zero_net_gives_half_and_uniform(self):
        net = NetState([np.zeros((3, 4)), np.zeros((4, 5))],
                       [np.zeros(4), np.zeros(5)], (True, True))
        fp = forward(net, np.ones((2, 3)))
        assert np.all(fp.activations[1] == 0.5)
        assert np.allclose(fp.posteriors, 0.2)

    def test_posterior_rows_sum_to_one(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            net = small_random_net(rng)
            batch = rng.normal(size=(4, net.layer_dims[0]))
            fp = forward(net, batch)
            assert np.allclose(fp.posteriors.sum(axis=1), 1.0, atol=1e-12)
            for h in fp.hidden:
                assert np.all((h > 0.0) & (h < 1.0))

    def test_toy_net_matches_manual_arithmetic(self):
        net = NetState(
            [np.array([[0.1, -0.2], [0.3, 0.4]]), np.array([[0.2, -0.1], [-0.3, 0.5]])],
            [np.array([0.05, -0.05]), np.array([0.0, 0.1])],
            (True, True),
        )
        fp = forward(net, np.array([[1.0, 2.0]]))
        # scalar arithmetic, no linear algebra
        z1 = (1.0 * 0.1 + 2.0 * 0.3 + 0.05, 1.0 * -0.2 + 2.0 * 0.4 - 0.05)
        a1 = tuple(1.0 / (1.0 + math.exp(-z)) for z in z1)
        z2 = (a1[0] * 0.2 + a1[1] * -0.3 + 0.0, a1[0] * -0.1 + a1[1] * 0.5 + 0.1)
        denom = math.exp(z2[0]) + math.exp(z2[1])
        assert np.allclose(fp.activations[1][0], a1, atol=1e-12)
        assert np.allclose(fp.posteriors[0],
                           (math.exp(z2[0]) / denom, math.exp(z2[1]) / denom),
                           atol=1e-12)

    def test_shape_mismatch(self):
        net = init_net([3, 4, 2], (True, True))
        with pytest.raises(ShapeMismatch):
            forward(net, np.zeros((2, 5)))
        with pytest.raises(ShapeMismatch):
            forward(net, np.zeros(3))

    def test_extreme_logits_stable(self):
        net = NetState([np.full((2, 2), 500.0)], [np.zeros(2)], (True,))
        fp = forward(net, np.array([[1.0, 1.0], [-1.0, -1.0]]))
        assert np.all(np.isfinite(fp.posteriors))


class TestInputNormalization:
    def test_whitens_training_stats(self):
        rng = np.random.default_rng(5)
        data = rng.normal(3.0, 2.5, size=(500, 6))
        net = init_net([6, 8, 3], (False, True), seed=2)
        set_input_normalization(net, data.mean(axis=0), data.std(axis=0))
        # pre-activations of layer 0 should be near zero-mean unit-variance
        z = data @ net.weights[0] + net.biases[0]
        assert np.all(np.abs(z.mean(axis=0)) < 0.2)
        assert np.all((z.std(axis=0) > 0.3) & (z.std(axis=0) < 3.0))

    def test_stat_shape_checked(self):
        net = init_net([6, 8, 3], (False, True))
        with pytest.raises(ShapeMismatch):
            set_input_normalization(net, np.zeros(4), np.ones(4))


class TestCoactStats:
    def test_identical_vectors_give_ridge_inverse(self):
        a = np.tile([0.3, 0.7], (10, 1))
        mean, precision = coact_stats(a, ridge=1e-3)
        assert np.allclose(mean, [0.3, 0.7])
        assert np.allclose(precision, np.eye(2) / 1e-3)

    def test_single_row(self):
        mean, precision = coact_stats(np.array([[0.2, 0.9, 0.5]]), ridge=0.5)
        assert np.allclose(mean, [0.2, 0.9, 0.5])
        assert np.allclose(precision, np.eye(3) / 0.5)

    def test_two_by_two_closed_form(self):
        a = np.array([[1.0, 2.0], [3.0, 5.0]])
        mean, precision = coact_stats(a, ridge=0.1)
        # biased covariance of two points: quarter of the squared diff
        d = a[1] - a[0]
        cov = np.array([[d[0] * d[0], d[0] * d[1]], [d[0] * d[1], d[1] * d[1]]]) / 4.0
        cov += 0.1 * np.eye(2)
        det = cov[0, 0] * cov[1, 1] - cov[0, 1] * cov[1, 0]
        inv = np.array([[cov[1, 1], -cov[0, 1]], [-cov[1, 0], cov[0, 0]]]) / det
        assert np.allclose(precision, inv)

    def test_symmetric(self):
        rng = np.random.default_rng(11)
        a = rng.normal(size=(50, 7))
        _, precision = coact_stats(a)
        assert np.array_equal(precision, precision.T)

    def test_ridge_must_be_positive(self):
        with pytest.raises(ValueError):
            coact_stats(np.ones((3, 2)), ridge=0.0)


class TestCoactPenalty:
    def prior_eye(self, dims):
        return CoactPrior(
            tuple(range(1, len(dims) + 1)),
            tuple(np.zeros(d) for d in dims),
            tuple(np.eye(d) for d in dims),
        )

    def test_zero_at_prior_mean(self):
        prior = self.prior_eye([3, 4])
        assert coact_penalty([np.zeros(3), np.zeros(4)], prior) == 0.0

    def test_identity_precision_is_squared_norm(self):
        prior = self.prior_eye([2])
        assert coact_penalty([np.array([3.0, 4.0])], prior) == pytest.approx(25.0)

    def test_matches_triple_product_loops(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            h = int(rng.integers(1, 6))
            mu = rng.normal(size=h)
            m = rng.normal(size=h)
            _, p = coact_stats(rng.normal(size=(12, h)))
            prior = CoactPrior((1,), (mu,), (p,))
            expected = sum(
                (m[i] - mu[i]) * p[i, j] * (m[j] - mu[j])
                for i in range(h) for j in range(h)
            )
            assert coact_penalty([m], prior) == pytest.approx(expected, rel=1e-10)

    def test_nonnegative(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            h = int(rng.integers(1, 6))
            _, p = coact_stats(rng.normal(size=(8, h)), ridge=1e-3)
            prior = CoactPrior((1,), (rng.normal(size=h),), (p,))
            assert coact_penalty([rng.normal(size=h)], prior) >= 0.0

    def test_shape_mismatch(self):
        prior = self.prior_eye([3])
        with pytest.raises(ShapeMismatch):
            coact_penalty([np.zeros(3), np.zeros(3)], prior)
        with pytest.raises(ShapeMismatch):
            coact_penalty([np.zeros(4)], prior)


class TestLoss:
    def test_perfect_one_hot_posteriors(self):
        post = np.array([[1.0, 0.0], [0.0, 1.0]])
        assert cross_entropy(post, np.array([0, 1])) == 0.0

    def test_lambda_zero_is_plain_ce(self):
        rng = np.random.default_rng(2)
        net = init_net([3, 5, 4], (True, True), seed=1)
        batch = rng.normal(size=(6, 3))
        targets = rng.integers(0, 4, size=6)
        prior = collect_prior(net, batch)
        fp = forward(net, batch)
        plain = cross_entropy(fp.posteriors, targets)
        assert loss(net, batch, targets) == pytest.approx(plain, rel=1e-12)
        assert loss(net, batch, targets, prior, 0.0) == pytest.approx(plain, rel=1e-12)

    def test_penalty_term_added(self):
        rng = np.random.default_rng(6)
        net = init_net([3, 5, 4], (True, True), seed=1)
        ref = rng.normal(size=(40, 3))
        prior = collect_prior(net, ref)
        batch = rng.normal(size=(6, 3)) + 2.0
        targets = rng.integers(0, 4, size=6)
        expected = loss(net, batch, targets) + 0.7 * batch_penalty(net, batch, prior)
        assert loss(net, batch, targets, prior, 0.7) == pytest.approx(expected, rel=1e-12)

    def test_target_validation(self):
        net = init_net([3, 5, 4], (True, True))
        with pytest.raises(ShapeMismatch):
            loss(net, np.zeros((2, 3)), np.array([0, 4]))
        with pytest.raises(ShapeMismatch):
            loss(net, np.zeros((2, 3)), np.array([0.5, 1.5]))


class TestBackward:
    def test_gradients_match_finite_differences(self):
        rng = np.random.default_rng(13)
        for lam in (0.0, 0.1, 1.0):
            for _ in range(4):
                net = small_random_net(rng)
                n = int(rng.integers(1, 6))
                batch = rng.normal(size=(n, net.layer_dims[0]))
                targets = rng.integers(0, net.layer_dims[-1], size=n)
                prior = collect_prior(net, rng.normal(size=(15, net.layer_dims[0])))
                grads = backward(net, batch, targets, prior, lam)
                num_w, num_b = numeric_gradients(
                    lambda m: loss(m, batch, targets, prior, lam), net
                )
                assert_gradients_close(grads.weights, num_w)
                assert_gradients_close(grads.biases, num_b)

    def test_output_layer_monitoring_gradient(self):
        rng = np.random.default_rng(14)
        net = init_net([3, 4, 3], (True, True), seed=3)
        prior = collect_prior(net, rng.normal(size=(20, 3)), include_output=True)
        assert prior.layers == (1, 2)
        batch = rng.normal(size=(4, 3))
        targets = rng.integers(0, 3, size=4)
        grads = backward(net, batch, targets, prior, 0.5)
        num_w, num_b = numeric_gradients(
            lambda m: loss(m, batch, targets, prior, 0.5), net
        )
        assert_gradients_close(grads.weights, num_w)
        assert_gradients_close(grads.biases, num_b)

    def test_penalty_only_gradients(self):
        rng = np.random.default_rng(15)
        net = init_net([3, 4, 2], (True, True), seed=4)
        prior = collect_prior(net, rng.normal(size=(20, 3)))
        batch = rng.normal(size=(5, 3)) + 1.0
        grads = backward(net, batch, None, prior, 0.8)
        num_w, num_b = numeric_gradients(
            lambda m: 0.8 * batch_penalty(m, batch, prior), net
        )
        assert_gradients_close(grads.weights, num_w)
        assert_gradients_close(grads.biases, num_b)

    def test_lambda_zero_equals_prior_free_run(self):
        rng = np.random.default_rng(16)
        net = init_net([3, 4, 2], (True, True), seed=5)
        batch = rng.normal(size=(4, 3))
        targets = rng.integers(0, 2, size=4)
        prior = collect_prior(net, batch)
        with_prior = backward(net, batch, targets, prior, 0.0)
        without = backward(net, batch, targets)
        for a, b in zip(with_prior.weights + with_prior.biases,
                        without.weights + without.biases):
            assert np.array_equal(a, b)

    def test_frozen_layer_zero_gradients(self):
        rng = np.random.default_rng(17)
        net = init_net([3, 4, 4, 2], (False, True, False), seed=6)
        batch = rng.normal(size=(4, 3))
        targets = rng.integers(0, 2, size=4)
        grads = backward(net, batch, targets)
        assert np.all(grads.weights[0] == 0.0) and np.all(grads.biases[0] == 0.0)
        assert np.all(grads.weights[2] == 0.0) and np.all(grads.biases[2] == 0.0)
        assert np.any(grads.weights[1] != 0.0)

    def test_signal_propagates_through_frozen_layer(self):
        # a frozen middle layer must not block gradients below it
        rng = np.random.default_rng(18)
        net = init_net([3, 4, 4, 2], (True, False, True), seed=7)
        batch = rng.normal(size=(4, 3))
        targets = rng.integers(0, 2, size=4)
        grads = backward(net, batch, targets)
        num_w, num_b = numeric_gradients(
            lambda m: loss(m, batch, targets), net
        )
        assert np.any(grads.weights[0] != 0.0)
        assert_gradients_close(grads.weights, num_w)
        assert_gradients_close(grads.biases, num_b)


def reference_train(features, labels, hidden, epochs, lr, seed):
    """From-first-principles full-batch softmax net, loops only."""
    rng = np.random.default_rng(seed)
    d, k = features.shape[1], int(labels.max()) + 1
    w0 = rng.normal(0, 0.5, (d, hidden))
    b0 = np.zeros(hidden)
    w1 = rng.normal(0, 0.5, (hidden, k))
    b1 = np.zeros(k)
    n = len(features)
    for _ in range(epochs):
        z1 = features @ w0 + b0
        a1 = 1.0 / (1.0 + np.exp(-z1))
        z2 = a1 @ w1 + b1
        e = np.exp(z2 - z2.max(axis=1, keepdims=True))
        p = e / e.sum(axis=1, keepdims=True)
        dz2 = p.copy()
        dz2[np.arange(n), labels] -= 1.0
        dz2 /= n
        gw1 = a1.T @ dz2
        gb1 = dz2.sum(axis=0)
        da1 = dz2 @ w1.T
        dz1 = da1 * a1 * (1 - a1)
        gw0 = features.T @ dz1
        gb0 = dz1.sum(axis=0)
        w1 -= lr * gw1
        b1 -= lr * gb1
        w0 -= lr * gw0
        b0 -= lr * gb0
    z1 = features @ w0 + b0
    a1 = 1.0 / (1.0 + np.exp(-z1))
    return np.argmax(a1 @ w1 + b1, axis=1)


def two_blob_problem(seed=0, n=60):
    rng = np.random.default_rng(seed)
    a = rng.normal((-2.0, -2.0), 0.4, size=(n, 2))
    b = rng.normal((2.0, 2.0), 0.4, size=(n, 2))
    feats = np.vstack([a, b])
    labels = np.array([0] * n + [1] * n)
    return feats, labels


class TestTrain:
    def test_zero_learning_rate_is_identity(self):
        feats, labels = two_blob_problem()
        net = init_net([2, 6, 2], (True, True), seed=1)
        before = net.copy()
        result = train(net, feats, labels, epochs=3, lr=0.0, seed=0)
        for a, b in zip(before.weights + before.biases,
                        result.net.weights + result.net.biases):
            assert np.array_equal(a, b)

    def test_separable_problem_reaches_99_percent(self):
        feats, labels = two_blob_problem()
        # a loop-style reference net confirms the problem is learnable
        ref_pred = reference_train(feats, labels, hidden=6, epochs=200, lr=0.5, seed=2)
        assert np.mean(ref_pred == labels) >= 0.99
        net = init_net([2, 6, 2], (True, True), seed=1)
        result = train(net, feats, labels, epochs=200, lr=0.5, batch_size=16, seed=0)
        assert result.metrics[-1].accuracy >= 0.99
        assert accuracy(result.net, feats, labels) >= 0.99

    def test_same_seed_bit_identical_metrics(self):
        feats, labels = two_blob_problem()
        net = init_net([2, 6, 2], (True, True), seed=1)
        r1 = train(net, feats, labels, epochs=5, lr=0.3, batch_size=8, seed=42)
        r2 = train(net, feats, labels, epochs=5, lr=0.3, batch_size=8, seed=42)
        assert [(m.loss, m.accuracy) for m in r1.metrics] == \
               [(m.loss, m.accuracy) for m in r2.metrics]
        for a, b in zip(r1.net.weights, r2.net.weights):
            assert np.array_equal(a, b)

    def test_frozen_layer_bit_identical_after_training(self):
        feats, labels = two_blob_problem()
        net = init_net([2, 6, 6, 2], (False, True, True), seed=3)
        frozen_w = net.weights[0].copy()
        frozen_b = net.biases[0].copy()
        result = train(net, feats, labels, epochs=10, lr=0.5, seed=0)
        assert np.array_equal(result.net.weights[0], frozen_w)
        assert np.array_equal(result.net.biases[0], frozen_b)

    def test_input_net_not_mutated(self):
        feats, labels = two_blob_problem()
        net = init_net([2, 6, 2], (True, True), seed=1)
        snapshot = net.copy()
        train(net, feats, labels, epochs=2, lr=0.5, seed=0)
        for a, b in zip(net.weights + net.biases,
                        snapshot.weights + snapshot.biases):
            assert np.array_equal(a, b)

    def test_per_epoch_metrics_emitted(self):
        feats, labels = two_blob_problem()
        net = init_net([2, 6, 2], (True, True), seed=1)
        result = train(net, feats, labels, epochs=4, lr=0.1, seed=0)
        assert [m.epoch for m in result.metrics] == [0, 1, 2, 3]
        assert all(np.isfinite(m.loss) for m in result.metrics)


class TestAdapt:
    def setup_prior(self, seed=0):
        rng = np.random.default_rng(seed)
        net = init_net([4, 6, 6, 3], (False, True, True), seed=1)
        matched = rng.normal(size=(100, 4))
        prior = collect_prior(net, matched)
        return net, matched, prior, rng

    def test_matched_batch_is_fixed_point(self):
        net, matched, prior, _ = self.setup_prior()
        result = adapt(net, matched, prior, lam=0.5, steps=5, lr=0.1)
        for a, b in zip(net.weights + net.biases,
                        result.net.weights + result.net.biases):
            assert np.allclose(a, b, atol=1e-12)
        assert result.penalty_trace[0] == pytest.approx(0.0, abs=1e-18)

    def test_lambda_zero_is_identity(self):
        net, matched, prior, rng = self.setup_prior()
        shifted = matched + 1.0
        result = adapt(net, shifted, prior, lam=0.0, steps=5, lr=0.1)
        for a, b in zip(net.weights + net.biases,
                        result.net.weights + result.net.biases):
            assert np.array_equal(a, b)

    def test_penalty_non_increasing_with_small_steps(self):
        # precision entries scale like 1/ridge, so the stable step is small
        net, matched, prior, rng = self.setup_prior()
        shifted = matched + 0.8
        result = adapt(net, shifted, prior, lam=1.0, steps=40, lr=0.001)
        trace = result.penalty_trace
        assert len(trace) == 41
        assert trace[-1] < trace[0]
        drops = sum(1 for a, b in zip(trace, trace[1:]) if b <= a + 1e-12)
        assert drops == len(trace) - 1

    def test_schedule_only_touches_named_layers(self):
        # the penalty never reaches weights above the last monitored
        # activation, so the output layer is not a useful schedule target
        net, matched, prior, rng = self.setup_prior()
        shifted = matched + 0.8
        result = adapt(net, shifted, prior, lam=1.0, steps=10, lr=0.001,
                       layer_schedule=[[1]])
        assert not np.array_equal(result.net.weights[1], net.weights[1])
        assert np.array_equal(result.net.weights[2], net.weights[2])
        # frozen layer 0 stays put even if scheduled
        result2 = adapt(net, shifted, prior, lam=1.0, steps=10, lr=0.001,
                        layer_schedule=[[0, 1]])
        assert np.array_equal(result2.net.weights[0], net.weights[0])
        assert np.array_equal(result2.net.biases[0], net.biases[0])

    def test_steps_split_across_phases(self):
        net, matched, prior, rng = self.setup_prior()
        shifted = matched + 0.5
        result = adapt(net, shifted, prior, lam=1.0, steps=7, lr=0.01,
                       layer_schedule=[[1], [2]])
        assert len(result.penalty_trace) == 8
