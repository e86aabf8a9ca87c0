"""Network assembly, loss, training loop, and checkpoint container tests.

Gradient checks compare analytic backprop against central finite
differences at the largest-magnitude analytic entries, where the O(eps^2)
truncation error is small relative to the derivative being measured.
"""

import numpy as np
import pytest

from kidspeech.nnet.checkpoint import (
    CheckpointError,
    load_network,
    pack_container,
    save_network,
    unpack_container,
)
from kidspeech.nnet.network import (
    CLASSIFIER_COEFFS,
    CLASSIFIER_FRAMES,
    DivergenceError,
    LayerSpec,
    Network,
    TrainConfig,
    build_word_classifier,
    cross_entropy,
    cross_entropy_grad,
    train,
)

EPS = 1e-3
TOL = 1e-4


def tiny_network(rng=None):
    specs = [
        LayerSpec("dense", in_features=4, units=8),
        LayerSpec("relu"),
        LayerSpec("dense", in_features=8, units=3),
        LayerSpec("softmax"),
    ]
    return Network(specs, rng=rng)


class TestLayerSpec:
    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="unknown layer kind"):
            LayerSpec("batch_norm")

    def test_dropout_rate_bounds(self):
        with pytest.raises(ValueError):
            LayerSpec("dropout", dropout_rate=1.0)
        with pytest.raises(ValueError):
            LayerSpec("dropout", dropout_rate=-0.1)

    def test_kernel_and_stride_validation(self):
        with pytest.raises(ValueError):
            LayerSpec("conv1d", in_channels=1, channels=1, kernel=0)
        with pytest.raises(ValueError):
            LayerSpec("conv1d", in_channels=1, channels=1, kernel=3, stride=0)

    def test_dict_round_trip_drops_defaults(self):
        spec = LayerSpec("conv1d", in_channels=13, channels=32, kernel=3)
        d = spec.to_dict()
        assert "stride" not in d and "padding" not in d and "groups" not in d
        assert LayerSpec.from_dict(d) == spec

    def test_dict_round_trip_keeps_non_defaults(self):
        spec = LayerSpec("conv1d", in_channels=4, channels=4, kernel=5,
                         stride=2, padding=2, groups=2)
        assert LayerSpec.from_dict(spec.to_dict()) == spec


class TestNetwork:
    def test_forward_matches_manual_composition(self):
        net = tiny_network(np.random.default_rng(3))
        x = np.random.default_rng(4).normal(size=4)
        y = net.forward(x)
        h = x
        for layer in net.layers:
            h = layer.forward(h)
        np.testing.assert_array_equal(y, h)

    def test_parameters_enumerates_all_tensors(self):
        net = tiny_network()
        # two dense layers, each weight + bias
        assert len(net.parameters()) == 4

    def test_sgd_step_applies_gradients(self):
        net = tiny_network()
        for p in net.parameters():
            p.grad[...] = 1.0
        before = [p.value.copy() for p in net.parameters()]
        net.sgd_step(0.5)
        for b, p in zip(before, net.parameters()):
            np.testing.assert_allclose(p.value, b - 0.5, atol=1e-15)

    def test_zero_grad(self):
        net = tiny_network()
        for p in net.parameters():
            p.grad[...] = 7.0
        net.zero_grad()
        assert all(np.all(p.grad == 0.0) for p in net.parameters())

    def test_backward_through_stack_matches_fd(self):
        rng = np.random.default_rng(11)
        net = tiny_network(rng)
        x = rng.normal(size=4)
        target = 1

        def loss_fn():
            return cross_entropy(net.forward(x), target)

        net.zero_grad()
        probs = net.forward(x)
        net.backward(cross_entropy_grad(probs, target))
        for p in net.parameters():
            flat_grad = p.grad.reshape(-1)
            idx = int(np.argmax(np.abs(flat_grad)))
            flat_val = p.value.reshape(-1)
            orig = flat_val[idx]
            flat_val[idx] = orig + EPS
            up = loss_fn()
            flat_val[idx] = orig - EPS
            down = loss_fn()
            flat_val[idx] = orig
            fd = (up - down) / (2 * EPS)
            assert abs(flat_grad[idx] - fd) <= TOL * max(1.0, abs(fd)), p.name


class TestCrossEntropy:
    def test_known_value(self):
        probs = np.array([0.1, 0.7, 0.2])
        assert cross_entropy(probs, 1) == pytest.approx(-np.log(0.7), abs=1e-12)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError, match="sum to"):
            cross_entropy(np.array([0.5, 0.6]), 0)

    def test_rejects_bad_class(self):
        with pytest.raises(IndexError):
            cross_entropy(np.array([0.5, 0.5]), 2)

    def test_grad_structure(self):
        probs = np.array([0.25, 0.25, 0.5])
        g = cross_entropy_grad(probs, 2)
        np.testing.assert_allclose(g, [0.0, 0.0, -2.0], atol=1e-12)

    def test_grad_through_softmax_matches_fd(self):
        """Chain rule through the softmax layer against FD over logits."""
        from kidspeech.nnet.layers import Softmax

        rng = np.random.default_rng(5)
        logits = rng.normal(size=6)
        target = 3
        sm = Softmax()
        probs = sm.forward(logits)
        analytic = sm.backward(cross_entropy_grad(probs, target))
        for j in range(6):
            pert = logits.copy()
            pert[j] += EPS
            up = cross_entropy(Softmax().forward(pert), target)
            pert[j] -= 2 * EPS
            down = cross_entropy(Softmax().forward(pert), target)
            fd = (up - down) / (2 * EPS)
            assert abs(analytic[j] - fd) <= TOL * max(1.0, abs(fd))


class TestClassifierArchitecture:
    def test_requires_two_classes(self):
        with pytest.raises(ValueError, match="at least 2"):
            build_word_classifier(1)

    def test_output_is_distribution(self):
        net = build_word_classifier(4, rng=np.random.default_rng(0))
        x = np.random.default_rng(1).normal(size=(CLASSIFIER_FRAMES, CLASSIFIER_COEFFS))
        probs = net.forward(x)
        assert probs.shape == (4,)
        assert probs.sum() == pytest.approx(1.0, abs=1e-9)
        assert np.all(probs > 0)

    def test_parameter_tensor_count(self):
        net = build_word_classifier(3)
        # three convs and two dense layers, weight + bias each
        assert len(net.parameters()) == 10

    def test_full_classifier_gradients_match_fd(self):
        """Probe high-gradient entries of every parameter tensor.

        Central differences are only valid where the network is locally
        smooth, so candidate entries whose perturbation flips a relu sign
        anywhere are skipped; crossing a kink injects an O(eps) error
        unrelated to backprop correctness.
        """
        from kidspeech.nnet.layers import Relu

        rng = np.random.default_rng(9)
        net = build_word_classifier(3, rng=rng)
        x = rng.normal(size=(CLASSIFIER_FRAMES, CLASSIFIER_COEFFS)) * 0.5
        target = 2

        def relu_masks():
            return [layer._cache.copy() for layer in net.layers
                    if isinstance(layer, Relu)]

        def masks_equal(a, b):
            return all(np.array_equal(m, n) for m, n in zip(a, b))

        net.zero_grad()
        probs = net.forward(x)
        net.backward(cross_entropy_grad(probs, target))
        net.forward(x)
        base_masks = relu_masks()
        for p in net.parameters():
            flat_grad = p.grad.reshape(-1)
            order = np.argsort(np.abs(flat_grad))[::-1]
            flat_val = p.value.reshape(-1)
            checked = 0
            for idx in order:
                orig = flat_val[idx]
                flat_val[idx] = orig + EPS
                up = cross_entropy(net.forward(x), target)
                up_masks = relu_masks()
                flat_val[idx] = orig - EPS
                down = cross_entropy(net.forward(x), target)
                down_masks = relu_masks()
                flat_val[idx] = orig
                if not (masks_equal(base_masks, up_masks)
                        and masks_equal(base_masks, down_masks)):
                    continue
                fd = (up - down) / (2 * EPS)
                rel = abs(flat_grad[idx] - fd) / max(1.0, abs(fd))
                assert rel <= TOL, f"{p.name}[{idx}]: {rel:.2e}"
                checked += 1
                if checked == 3:
                    break
            assert checked > 0, f"no kink-stable probe found for {p.name}"


def blob_dataset(n_per_class=8, seed=0):
    """Two well-separated Gaussian blobs in 4-d."""
    rng = np.random.default_rng(seed)
    data = []
    for label, center in enumerate(([2.0, 2.0, -2.0, -2.0], [-2.0, -2.0, 2.0, 2.0])):
        for _ in range(n_per_class):
            data.append((np.asarray(center) + 0.3 * rng.normal(size=4), label))
    return data


def blob_network(seed=0):
    specs = [
        LayerSpec("dense", in_features=4, units=8),
        LayerSpec("relu"),
        LayerSpec("dense", in_features=8, units=2),
        LayerSpec("softmax"),
    ]
    return Network(specs, rng=np.random.default_rng(seed))


class TestTraining:
    def test_learns_separable_blobs(self):
        net = blob_network()
        history = train(net, blob_dataset(), TrainConfig(learning_rate=0.1, epochs=30))
        assert history.accuracies[-1] == 1.0
        assert history.losses[-1] < history.losses[0] * 0.5

    def test_histories_have_epoch_length(self):
        history = train(blob_network(), blob_dataset(),
                        TrainConfig(learning_rate=0.05, epochs=7))
        assert len(history.losses) == 7
        assert len(history.accuracies) == 7

    def test_deterministic_given_seed(self):
        cfg = TrainConfig(learning_rate=0.1, epochs=10, rng_seed=42)
        h1 = train(blob_network(3), blob_dataset(), cfg)
        h2 = train(blob_network(3), blob_dataset(), cfg)
        assert h1.losses == h2.losses
        assert h1.accuracies == h2.accuracies

    def test_no_shuffle_is_reproducible_without_rng_dependence(self):
        cfg_a = TrainConfig(learning_rate=0.1, epochs=5, rng_seed=1, shuffle=False)
        cfg_b = TrainConfig(learning_rate=0.1, epochs=5, rng_seed=99, shuffle=False)
        h1 = train(blob_network(3), blob_dataset(), cfg_a)
        h2 = train(blob_network(3), blob_dataset(), cfg_b)
        # identical because neither shuffling nor dropout consumes the rng
        assert h1.losses == h2.losses

    def test_empty_dataset_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            train(blob_network(), [], TrainConfig())

    def test_non_finite_loss_raises_with_epoch(self):
        net = blob_network()
        net.parameters()[2].value[0, 0] = np.nan
        with np.errstate(all="ignore"), pytest.raises(DivergenceError) as exc:
            train(net, blob_dataset(2), TrainConfig(learning_rate=0.1, epochs=5))
        assert exc.value.epoch == 0

    def test_config_validation(self):
        with pytest.raises(ValueError):
            TrainConfig(learning_rate=0.0)
        with pytest.raises(ValueError):
            TrainConfig(batch_size=0)


class TestContainerFormat:
    def test_round_trip_preserves_everything(self):
        config = {"kind": "demo", "note": "پایا", "n": 3}
        tensors = [np.arange(6, dtype=np.float64).reshape(2, 3),
                   np.array(5.0),
                   np.random.default_rng(0).normal(size=(4, 1, 2))]
        blob = pack_container(config, tensors)
        config2, tensors2 = unpack_container(blob)
        assert config2 == config
        assert len(tensors2) == 3
        for a, b in zip(tensors, tensors2):
            np.testing.assert_array_equal(a, b)
            assert b.dtype == np.float64

    def test_pack_is_deterministic(self):
        config = {"b": 1, "a": 2}
        t = [np.ones((2, 2))]
        assert pack_container(config, t) == pack_container(config, t)

    def test_bad_magic_rejected(self):
        with pytest.raises(CheckpointError, match="magic"):
            unpack_container(b"NOTMAGIC" + b"\x00" * 20)

    def test_truncated_config_rejected(self):
        blob = pack_container({"kind": "x"}, [])
        with pytest.raises(CheckpointError, match="truncated config"):
            unpack_container(blob[:14])

    def test_truncated_tensor_stream_rejected(self):
        blob = pack_container({"kind": "x"}, [np.zeros((3, 3))])
        with pytest.raises(CheckpointError, match="truncated tensor"):
            unpack_container(blob[:-8])
        with pytest.raises(CheckpointError, match="truncated tensor"):
            unpack_container(blob[: len(blob) - 9 * 8 - 4])


class TestNetworkCheckpoint:
    def test_round_trip_is_bit_identical(self, tmp_path):
        net = tiny_network(np.random.default_rng(8))
        path = tmp_path / "model.bin"
        save_network(path, net, extra={"labels": ["a", "b", "c"]})
        loaded, extra = load_network(path)
        assert extra == {"labels": ["a", "b", "c"]}
        assert loaded.specs == net.specs
        x = np.random.default_rng(9).normal(size=4)
        np.testing.assert_array_equal(loaded.forward(x), net.forward(x))

    def test_tensor_count_mismatch_rejected(self, tmp_path):
        net = tiny_network()
        config = {"format": 1, "kind": "classifier",
                  "specs": [s.to_dict() for s in net.specs], "extra": {}}
        tensors = [p.value for p in net.parameters()][:-1]
        path = tmp_path / "short.bin"
        path.write_bytes(pack_container(config, tensors))
        with pytest.raises(CheckpointError, match="tensors"):
            load_network(path)

    def test_shape_mismatch_rejected(self, tmp_path):
        net = tiny_network()
        config = {"format": 1, "kind": "classifier",
                  "specs": [s.to_dict() for s in net.specs], "extra": {}}
        tensors = [p.value for p in net.parameters()]
        tensors[0] = np.zeros((2, 2))
        path = tmp_path / "warped.bin"
        path.write_bytes(pack_container(config, tensors))
        with pytest.raises(CheckpointError, match="shape mismatch"):
            load_network(path)

    def test_missing_extra_defaults_to_empty(self, tmp_path):
        net = tiny_network()
        config = {"format": 1, "kind": "classifier",
                  "specs": [s.to_dict() for s in net.specs]}
        path = tmp_path / "bare.bin"
        path.write_bytes(pack_container(config, [p.value for p in net.parameters()]))
        _, extra = load_network(path)
        assert extra == {}
