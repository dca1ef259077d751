"""Coordinate grids and ground-truth signals.

Signals live in [-1, 1]; grids are align-corners lattices (linspace
including both endpoints per dimension, row-major flattening).
"""

from dataclasses import dataclass

import numpy as np

from spder.tensor import ShapeError

DEFAULT_BOUNDS = (-1.0, 1.0)
AUDIO_BOUNDS = (-100.0, 100.0)


@dataclass
class CoordGrid:
    shape: tuple        # per-dim sample counts
    bounds: tuple       # per-dim (lo, hi)
    coords: np.ndarray  # (prod(shape) x dims) flattened lattice

    @property
    def dims(self) -> int:
        return len(self.shape)

    @property
    def num_points(self) -> int:
        return int(np.prod(self.shape))


@dataclass
class Signal:
    values: np.ndarray  # shaped array in [-1, 1]
    source_bit_depth: int | None = None

    @property
    def shape(self) -> tuple:
        return self.values.shape

    @property
    def dims(self) -> int:
        return self.values.ndim

    def flat(self) -> np.ndarray:
        """Row-major column vector matching make_grid ordering."""
        return self.values.reshape(-1, 1)


def axis_coords(n: int, lo: float, hi: float) -> np.ndarray:
    if n < 1:
        raise ShapeError("zero-size grid dimension")
    if n == 1:
        return np.array([lo])
    return np.linspace(lo, hi, n)


def make_grid(shape, bounds=None) -> CoordGrid:
    shape = tuple(int(n) for n in shape)
    if bounds is None:
        bounds = tuple(DEFAULT_BOUNDS for _ in shape)
    elif len(bounds) == 2 and np.isscalar(bounds[0]):
        bounds = tuple(tuple(bounds) for _ in shape)
    else:
        bounds = tuple(tuple(b) for b in bounds)
    if len(bounds) != len(shape):
        raise ShapeError("bounds/shape dimension mismatch")
    for lo, hi in bounds:
        if not lo < hi:
            raise ValueError("bounds must satisfy lo < hi")
    axes = [axis_coords(n, lo, hi) for n, (lo, hi) in zip(shape, bounds)]
    mesh = np.meshgrid(*axes, indexing="ij")
    coords = np.stack([m.reshape(-1) for m in mesh], axis=1)
    return CoordGrid(shape=shape, bounds=bounds, coords=coords)


def normalize_u8(pixels) -> Signal:
    """Map 8-bit pixel values to [-1, 1]: y = 2p/255 - 1."""
    p = np.asarray(pixels)
    if p.min() < 0 or p.max() > 255:
        raise ValueError("pixel values must lie in 0..255")
    return Signal(values=2.0 * p.astype(np.float64) / 255.0 - 1.0,
                  source_bit_depth=8)


def denormalize_u8(signal) -> np.ndarray:
    """Back to integers 0..255 with half-to-even rounding.

    Uses the exact affine inverse when values stay inside [-1, 1]; falls
    back to min-max rescaling when predictions overshoot the range.
    """
    y = signal.values if isinstance(signal, Signal) else np.asarray(signal)
    lo, hi = y.min(), y.max()
    if lo >= -1.0 and hi <= 1.0:
        p = (y + 1.0) * 255.0 / 2.0
    else:
        span = hi - lo
        p = np.zeros_like(y) if span == 0 else (y - lo) * 255.0 / span
    return np.round(p).astype(np.uint8)


def bilinear_resize(signal: Signal, new_shape) -> Signal:
    """Align-corners bilinear resampling of a 2-D signal."""
    if signal.dims != 2:
        raise ValueError("bilinear_resize supports 2-D signals only")
    src = signal.values
    new_shape = tuple(int(n) for n in new_shape)
    out = src
    for axis, n_new in enumerate(new_shape):
        out = _resize_axis(out, axis, n_new)
    return Signal(values=out, source_bit_depth=signal.source_bit_depth)


def _resize_axis(a: np.ndarray, axis: int, n_new: int) -> np.ndarray:
    n_src = a.shape[axis]
    if n_new == n_src:
        return a
    if n_new < 1:
        raise ShapeError("zero-size resize target")
    a = np.moveaxis(a, axis, 0)
    if n_src == 1:
        out = np.repeat(a, n_new, axis=0)
    else:
        pos = (np.linspace(0.0, 1.0, n_new) * (n_src - 1) if n_new > 1
               else np.array([0.0]))
        i0 = np.minimum(pos.astype(int), n_src - 2)
        frac = (pos - i0).reshape(-1, *([1] * (a.ndim - 1)))
        out = a[i0] * (1.0 - frac) + a[i0 + 1] * frac
    return np.moveaxis(out, 0, axis)


def downsample_1d(signal: Signal, factor: int) -> Signal:
    """Strided decimation: keep every factor-th sample starting at 0."""
    if signal.dims != 1:
        raise ValueError("downsample_1d supports 1-D signals only")
    factor = int(factor)
    if factor <= 0:
        raise ValueError("factor must be positive")
    return Signal(values=signal.values[::factor].copy(),
                  source_bit_depth=signal.source_bit_depth)
