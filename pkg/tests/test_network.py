import numpy as np
import pytest

from spder.activations import ActivationSpec, DampingKind
from spder.encoding import EncodingSpec, encoded_width
from spder.network import (MlpConfig, MlpParams, ForwardCache, backward,
                           backward_to_input, forward, init_mlp,
                           input_gradient, load_checkpoint, save_checkpoint,
                           with_seed)
from spder.tensor import ShapeError


def small_config(**kw):
    defaults = dict(in_dim=2, out_dim=1, hidden_width=8, depth=3, seed=0)
    defaults.update(kw)
    return MlpConfig(**defaults)


def test_layer_dims_counts_affine_layers():
    cfg = small_config(depth=5, hidden_width=16)
    dims = cfg.layer_dims()
    assert len(dims) == 5
    assert dims[0] == (2, 16)
    assert dims[-1] == (16, 1)


def test_layer_dims_uses_encoded_width():
    enc = EncodingSpec(kind="positional", num_bands=4)
    cfg = small_config(activation=ActivationSpec(kind="relu"), encoding=enc)
    assert cfg.layer_dims()[0][0] == encoded_width(enc, 2)


def test_depth_below_two_rejected():
    with pytest.raises(ValueError):
        small_config(depth=1)


def test_init_deterministic_in_seed():
    a = init_mlp(small_config(seed=11))
    b = init_mlp(small_config(seed=11))
    c = init_mlp(small_config(seed=12))
    for wa, wb in zip(a.weights, b.weights):
        assert np.array_equal(wa, wb)
    assert not np.array_equal(a.weights[0], c.weights[0])


def test_init_bounds_semiperiodic():
    cfg = small_config(hidden_width=64, depth=4)
    params = init_mlp(cfg)
    omega0 = cfg.activation.omega0
    assert np.max(np.abs(params.weights[0])) <= 1.0 / 2
    for w in params.weights[1:]:
        fan_in = w.shape[0]
        assert np.max(np.abs(w)) <= np.sqrt(6.0 / fan_in) / omega0 + 1e-15


def test_init_bounds_relu():
    cfg = small_config(activation=ActivationSpec(kind="relu"), hidden_width=64)
    params = init_mlp(cfg)
    for w in params.weights:
        fan_in = w.shape[0]
        bound = np.sqrt(6.0 / fan_in)
        assert np.max(np.abs(w)) <= bound
        # a 64-wide draw should come close to its bound
        if fan_in >= 64:
            assert np.max(np.abs(w)) > 0.8 * bound


def test_init_bounds_within_envelope():
    cfg = small_config()
    for w, (fan_in, _) in zip(init_mlp(cfg).weights, cfg.layer_dims()):
        assert np.max(np.abs(w)) <= np.sqrt(6.0 / fan_in)


def test_biases_start_zero():
    params = init_mlp(small_config())
    for b in params.biases:
        assert np.all(b == 0.0)


def test_forward_output_shape():
    cfg = small_config(out_dim=3)
    params = init_mlp(cfg)
    out, cache = forward(params, cfg, np.zeros((5, 2)))
    assert out.shape == (5, 3)
    assert len(cache.pre_activations) == cfg.depth
    assert len(cache.post_activations) == cfg.depth - 1


def test_forward_rejects_wrong_width():
    cfg = small_config()
    params = init_mlp(cfg)
    with pytest.raises(ShapeError):
        forward(params, cfg, np.zeros((5, 3)))


def _loss_and_grads(cfg, params, coords, target):
    out, cache = forward(params, cfg, coords)
    diff = out - target
    loss = float(np.mean(diff ** 2))
    dL = 2.0 * diff / diff.size
    return loss, backward(params, cfg, cache, dL), cache


@pytest.mark.parametrize("activation,encoding", [
    (ActivationSpec(kind="relu"), EncodingSpec()),
    (ActivationSpec(kind="relu"), EncodingSpec(kind="positional", num_bands=3)),
    (ActivationSpec(kind="relu"), EncodingSpec(kind="fourier", num_features=4)),
    (ActivationSpec(damping=DampingKind.SQRT_ABS), EncodingSpec()),
    (ActivationSpec(damping=DampingKind.CONST1), EncodingSpec()),
    (ActivationSpec(damping=DampingKind.ARCTAN), EncodingSpec()),
])
def test_backward_matches_finite_differences(activation, encoding):
    cfg = small_config(hidden_width=6, activation=activation, encoding=encoding)
    rng = np.random.default_rng(5)
    params = init_mlp(cfg)
    # nudge biases off zero so relu kinks are not sampled exactly
    params = MlpParams(params.weights,
                       [rng.normal(0, 0.05, b.shape) for b in params.biases])
    coords = rng.uniform(-1, 1, (12, 2))
    target = rng.uniform(-1, 1, (12, 1))
    _, grads, _ = _loss_and_grads(cfg, params, coords, target)

    eps = 1e-6
    for li in range(len(params.weights)):
        num = np.zeros_like(params.weights[li])
        for idx in np.ndindex(*num.shape):
            for sgn, store in ((1, 0), (-1, 1)):
                p = params.copy()
                p.weights[li][idx] += sgn * eps
                out, _ = forward(p, cfg, coords)
                val = float(np.mean((out - target) ** 2))
                if store == 0:
                    plus = val
                else:
                    num[idx] = (plus - val) / (2 * eps)
        denom = max(np.linalg.norm(num), 1e-12)
        assert np.linalg.norm(num - grads.weights[li]) / denom < 1e-4


def test_bias_gradients_match_finite_differences():
    cfg = small_config(hidden_width=5)
    rng = np.random.default_rng(3)
    params = init_mlp(cfg)
    coords = rng.uniform(-1, 1, (9, 2))
    target = rng.uniform(-1, 1, (9, 1))
    _, grads, _ = _loss_and_grads(cfg, params, coords, target)
    eps = 1e-6
    for li in range(len(params.biases)):
        num = np.zeros_like(params.biases[li])
        for j in range(num.size):
            vals = []
            for sgn in (1, -1):
                p = params.copy()
                p.biases[li][j] += sgn * eps
                out, _ = forward(p, cfg, coords)
                vals.append(float(np.mean((out - target) ** 2)))
            num[j] = (vals[0] - vals[1]) / (2 * eps)
        denom = max(np.linalg.norm(num), 1e-12)
        assert np.linalg.norm(num - grads.biases[li]) / denom < 1e-4


def test_input_gradient_matches_finite_differences():
    cfg = small_config(hidden_width=6)
    rng = np.random.default_rng(8)
    params = init_mlp(cfg)
    coords = rng.uniform(-1, 1, (6, 2))
    grad = input_gradient(params, cfg, coords)
    assert grad.shape == coords.shape
    h = 1e-6
    for i in range(6):
        for j in range(2):
            cp, cm = coords.copy(), coords.copy()
            cp[i, j] += h
            cm[i, j] -= h
            op, _ = forward(params, cfg, cp)
            om, _ = forward(params, cfg, cm)
            num = (op[i, 0] - om[i, 0]) / (2 * h)
            assert grad[i, j] == pytest.approx(num, rel=1e-4, abs=1e-8)


def test_input_gradient_requires_scalar_output():
    cfg = small_config(out_dim=2)
    with pytest.raises(ValueError):
        input_gradient(init_mlp(cfg), cfg, np.zeros((3, 2)))


def test_checkpoint_round_trip(tmp_path):
    cfg = small_config(hidden_width=7, depth=4,
                       activation=ActivationSpec(damping=DampingKind.ARCTAN,
                                                 omega0=25.0),
                       encoding=EncodingSpec())
    params = init_mlp(cfg)
    path = tmp_path / "net.spdr"
    save_checkpoint(path, cfg, params)
    cfg2, params2 = load_checkpoint(path)
    assert cfg2 == cfg
    for w, w2 in zip(params.weights, params2.weights):
        assert np.array_equal(w, w2)
    for b, b2 in zip(params.biases, params2.biases):
        assert np.array_equal(b, b2)


def test_checkpoint_preserves_outputs(tmp_path):
    cfg = small_config()
    params = init_mlp(cfg)
    coords = np.random.default_rng(0).uniform(-1, 1, (10, 2))
    out, _ = forward(params, cfg, coords)
    path = tmp_path / "net.spdr"
    save_checkpoint(path, cfg, params)
    cfg2, params2 = load_checkpoint(path)
    out2, _ = forward(params2, cfg2, coords)
    assert np.array_equal(out, out2)


def test_checkpoint_rejects_garbage(tmp_path):
    path = tmp_path / "bad.spdr"
    path.write_bytes(b"not a checkpoint at all")
    with pytest.raises(ValueError):
        load_checkpoint(path)


def test_checkpoint_rejects_truncation(tmp_path):
    cfg = small_config()
    path = tmp_path / "net.spdr"
    save_checkpoint(path, cfg, init_mlp(cfg))
    raw = path.read_bytes()
    path.write_bytes(raw[:-8])
    with pytest.raises(Exception):
        load_checkpoint(path)


def test_with_seed_changes_only_seed():
    cfg = small_config(seed=1)
    cfg2 = with_seed(cfg, 9)
    assert cfg2.seed == 9
    assert cfg2.hidden_width == cfg.hidden_width
