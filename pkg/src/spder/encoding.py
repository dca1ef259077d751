"""Input featurizations for the ReLU baselines.

Positional encoding appends sin/cos pairs at geometrically spaced
frequencies; Fourier features append sin/cos of Gaussian random
projections.  Both keep the raw coordinates as the leading columns.
"""

from dataclasses import dataclass

import numpy as np

from spder.tensor import as_matrix, check_finite


@dataclass(frozen=True)
class EncodingSpec:
    """kind is one of "none", "positional", "fourier"."""

    kind: str = "none"
    # positional encoding
    num_bands: int = 10
    base_omega: float = np.pi
    # fourier features
    num_features: int = 20
    scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "positional", "fourier"):
            raise ValueError(f"unknown encoding kind {self.kind!r}")
        if self.kind == "positional" and self.num_bands < 1:
            raise ValueError("need at least one frequency band")
        if self.kind == "fourier" and self.num_features < 1:
            raise ValueError("need at least one fourier feature")


def encoded_width(spec: EncodingSpec, in_dim: int) -> int:
    if spec.kind == "none":
        return in_dim
    if spec.kind == "positional":
        return in_dim * (1 + 2 * spec.num_bands)
    return in_dim + 2 * spec.num_features


def fourier_matrix(spec: EncodingSpec, in_dim: int) -> np.ndarray:
    """The (num_features x in_dim) Gaussian projection, fixed by seed."""
    rng = np.random.default_rng(spec.seed)
    return rng.normal(0.0, spec.scale, size=(spec.num_features, in_dim))


def encode(spec: EncodingSpec, coords) -> np.ndarray:
    coords = as_matrix(coords)
    check_finite(coords, "coordinates")
    if spec.kind == "none":
        return coords
    if spec.kind == "positional":
        blocks = [coords]
        for k in range(spec.num_bands):
            w = spec.base_omega * (2.0 ** k)
            blocks.append(np.sin(w * coords))
            blocks.append(np.cos(w * coords))
        return np.concatenate(blocks, axis=1)
    b = fourier_matrix(spec, coords.shape[1])
    proj = 2.0 * np.pi * (coords @ b.T)
    return np.concatenate([coords, np.sin(proj), np.cos(proj)], axis=1)


def encode_backward(spec: EncodingSpec, coords, d_encoded) -> np.ndarray:
    """Chain an upstream gradient w.r.t. encode(coords) back to coords."""
    coords = as_matrix(coords)
    d_encoded = as_matrix(d_encoded)
    in_dim = coords.shape[1]
    if spec.kind == "none":
        return d_encoded
    if spec.kind == "positional":
        grad = d_encoded[:, :in_dim].copy()
        col = in_dim
        for k in range(spec.num_bands):
            w = spec.base_omega * (2.0 ** k)
            d_sin = d_encoded[:, col:col + in_dim]
            d_cos = d_encoded[:, col + in_dim:col + 2 * in_dim]
            grad += w * (d_sin * np.cos(w * coords) - d_cos * np.sin(w * coords))
            col += 2 * in_dim
        return grad
    b = fourier_matrix(spec, in_dim)
    proj = 2.0 * np.pi * (coords @ b.T)
    nf = spec.num_features
    d_sin = d_encoded[:, in_dim:in_dim + nf]
    d_cos = d_encoded[:, in_dim + nf:in_dim + 2 * nf]
    grad = d_encoded[:, :in_dim].copy()
    grad += (d_sin * np.cos(proj)) @ (2.0 * np.pi * b)
    grad -= (d_cos * np.sin(proj)) @ (2.0 * np.pi * b)
    return grad
