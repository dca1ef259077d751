"""The coordinate MLP: init, batched forward, backprop, input gradients.

A depth-d network is (d-1) activated affine layers followed by one linear
output layer.  Weights are drawn uniformly under a seeded PCG64 generator
with per-layer bounds never exceeding sqrt(6/fan_in); biases start at
zero.  See init_mlp for the exact bounds per activation family.
"""

import struct
from dataclasses import dataclass, field, replace

import numpy as np

from spder.activations import (ActivationSpec, DampingKind,
                               act_derivative_from, act_forward_full)
from spder.encoding import EncodingSpec, encode, encode_backward, encoded_width
from spder.tensor import ShapeError, as_matrix, check_finite

PRNG_ALGORITHM = "numpy-pcg64"


@dataclass(frozen=True)
class MlpConfig:
    in_dim: int
    out_dim: int
    hidden_width: int = 256
    depth: int = 5  # total affine layers, last one linear
    activation: ActivationSpec = field(default_factory=ActivationSpec)
    encoding: EncodingSpec = field(default_factory=EncodingSpec)
    seed: int = 0

    def __post_init__(self):
        if self.depth < 2:
            raise ValueError("depth must be at least 2")
        if min(self.in_dim, self.out_dim, self.hidden_width) < 1:
            raise ValueError("dimensions must be positive")

    def layer_dims(self):
        """(fan_in, fan_out) per affine layer, encoding included."""
        first = encoded_width(self.encoding, self.in_dim)
        widths = [first] + [self.hidden_width] * (self.depth - 1) + [self.out_dim]
        return list(zip(widths[:-1], widths[1:]))


@dataclass
class MlpParams:
    weights: list  # per layer, (fan_in x fan_out)
    biases: list   # per layer, (fan_out,)

    def copy(self):
        return MlpParams([w.copy() for w in self.weights],
                         [b.copy() for b in self.biases])


@dataclass
class ForwardCache:
    encoded: np.ndarray
    pre_activations: list   # z_l, one per hidden layer plus the output layer
    post_activations: list  # a_l, one per hidden layer
    act_extras: list = None  # per hidden layer, reused by the backward pass


def init_mlp(config: MlpConfig) -> MlpParams:
    """Draw uniform weights, zero biases.

    Sine-based nets use the frequency-aware scheme that keeps layer outputs
    in the activation's useful range: the first layer is drawn from
    U(-1/fan_in, 1/fan_in) and every later layer from
    U(-sqrt(6/fan_in)/omega0, sqrt(6/fan_in)/omega0).  ReLU nets use plain
    U(-sqrt(6/fan_in), sqrt(6/fan_in)) throughout.  All bounds stay within
    the sqrt(6/fan_in) envelope.
    """
    rng = np.random.default_rng(config.seed)
    semiperiodic = config.activation.kind == "semiperiodic"
    weights, biases = [], []
    for idx, (fan_in, fan_out) in enumerate(config.layer_dims()):
        bound = np.sqrt(6.0 / fan_in)
        if semiperiodic:
            if idx == 0:
                bound = 1.0 / fan_in
            else:
                bound = bound / config.activation.omega0
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpParams(weights, biases)


def forward(params: MlpParams, config: MlpConfig, coords):
    coords = as_matrix(coords)
    if coords.shape[1] != config.in_dim:
        raise ShapeError(
            f"coords width {coords.shape[1]} != in_dim {config.in_dim}")
    a = encode(config.encoding, coords)
    encoded = a
    pre, post, extras = [], [], []
    n_layers = len(params.weights)
    for ell in range(n_layers - 1):
        z = a @ params.weights[ell] + params.biases[ell]
        pre.append(z)
        a, extra = act_forward_full(config.activation, z)
        post.append(a)
        extras.append(extra)
    out = a @ params.weights[-1] + params.biases[-1]
    pre.append(out)
    check_finite(out, "network output")
    return out, ForwardCache(encoded, pre, post, extras)


def backward(params: MlpParams, config: MlpConfig, cache: ForwardCache,
             dL_dout) -> MlpParams:
    """Reverse-mode gradients w.r.t. every weight and bias.

    dL_dout is the gradient of the scalar loss w.r.t. the forward output.
    Returns gradients in MlpParams shape.
    """
    dL_dout = as_matrix(dL_dout)
    n_layers = len(params.weights)
    if dL_dout.shape != cache.pre_activations[-1].shape:
        raise ShapeError(
            f"dL_dout shape {dL_dout.shape} != output shape "
            f"{cache.pre_activations[-1].shape}")
    grads_w = [None] * n_layers
    grads_b = [None] * n_layers
    delta = dL_dout
    for ell in range(n_layers - 1, -1, -1):
        a_prev = cache.encoded if ell == 0 else cache.post_activations[ell - 1]
        grads_w[ell] = a_prev.T @ delta
        grads_b[ell] = delta.sum(axis=0)
        if ell > 0:
            da = delta @ params.weights[ell].T
            delta = da * act_derivative_from(config.activation,
                                             cache.pre_activations[ell - 1],
                                             cache.act_extras[ell - 1])
    return MlpParams(grads_w, grads_b)


def backward_to_input(params: MlpParams, config: MlpConfig,
                      cache: ForwardCache, dL_dout, coords) -> np.ndarray:
    """Like backward but returns the gradient w.r.t. the raw coordinates."""
    dL_dout = as_matrix(dL_dout)
    n_layers = len(params.weights)
    delta = dL_dout
    for ell in range(n_layers - 1, 0, -1):
        da = delta @ params.weights[ell].T
        delta = da * act_derivative_from(config.activation,
                                         cache.pre_activations[ell - 1],
                                         cache.act_extras[ell - 1])
    d_encoded = delta @ params.weights[0].T
    return encode_backward(config.encoding, coords, d_encoded)


def input_gradient(params: MlpParams, config: MlpConfig, coords) -> np.ndarray:
    """Per-row gradient of the scalar output w.r.t. each input coordinate."""
    if config.out_dim != 1:
        raise ValueError("input_gradient supports single-channel outputs only")
    coords = as_matrix(coords)
    out, cache = forward(params, config, coords)
    ones = np.ones_like(out)
    return backward_to_input(params, config, cache, ones, coords)


# --- checkpoint container -------------------------------------------------
#
# Layout (little-endian):
#   magic   4s   "SPDR"
#   version u32  (1)
#   in_dim, out_dim, hidden_width, depth           u32 x4
#   seed                                           i64
#   activation: kind u8 (0 relu, 1 semiperiodic), damping u8 (DampingKind
#     order), omega0 f64, clamp_eps f64
#   encoding: kind u8 (0 none, 1 positional, 2 fourier), num_bands u32,
#     base_omega f64, num_features u32, scale f64, seed i64
#   then per layer: weight block then bias block, row-major f64.

CHECKPOINT_MAGIC = b"SPDR"
CHECKPOINT_VERSION = 1
_DAMPING_ORDER = list(DampingKind)
_HEADER = struct.Struct("<4sIIIIIqBBddBIdIdq")


def save_checkpoint(path, config: MlpConfig, params: MlpParams):
    act = config.activation
    enc = config.encoding
    header = _HEADER.pack(
        CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
        config.in_dim, config.out_dim, config.hidden_width, config.depth,
        config.seed,
        0 if act.kind == "relu" else 1,
        _DAMPING_ORDER.index(act.damping), act.omega0, act.clamp_eps,
        {"none": 0, "positional": 1, "fourier": 2}[enc.kind],
        enc.num_bands, enc.base_omega, enc.num_features, enc.scale, enc.seed,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        for w, b in zip(params.weights, params.biases):
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_checkpoint(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size or raw[:4] != CHECKPOINT_MAGIC:
        raise ValueError(f"{path}: not a SPDR checkpoint")
    (_, version, in_dim, out_dim, hidden, depth, seed,
     act_kind, damping_idx, omega0, clamp_eps,
     enc_kind, num_bands, base_omega, num_features, scale,
     enc_seed) = _HEADER.unpack_from(raw)
    if version != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {version}")
    activation = (ActivationSpec(kind="relu") if act_kind == 0 else
                  ActivationSpec(kind="semiperiodic",
                                 damping=_DAMPING_ORDER[damping_idx],
                                 omega0=omega0, clamp_eps=clamp_eps))
    encoding = EncodingSpec(kind=["none", "positional", "fourier"][enc_kind],
                            num_bands=num_bands, base_omega=base_omega,
                            num_features=num_features, scale=scale,
                            seed=enc_seed)
    config = MlpConfig(in_dim=in_dim, out_dim=out_dim, hidden_width=hidden,
                       depth=depth, activation=activation, encoding=encoding,
                       seed=seed)
    offset = _HEADER.size
    weights, biases = [], []
    for fan_in, fan_out in config.layer_dims():
        n = fan_in * fan_out
        w = np.frombuffer(raw, dtype="<f8", count=n, offset=offset)
        offset += 8 * n
        b = np.frombuffer(raw, dtype="<f8", count=fan_out, offset=offset)
        offset += 8 * fan_out
        weights.append(w.reshape(fan_in, fan_out).copy())
        biases.append(b.copy())
    if offset != len(raw):
        raise ValueError(f"{path}: trailing bytes after parameter blocks")
    return config, MlpParams(weights, biases)


def with_seed(config: MlpConfig, seed: int) -> MlpConfig:
    return replace(config, seed=seed)
