"""Coordinate-MLP signal representation toolkit.

Trains small MLPs that map coordinate grids to signals (images, audio,
video) using semiperiodic sin(u)*delta(u) activations (u = w0*x) and the
usual baselines (ReLU, positional encoding, Fourier features, pure
sine), and ships the Fourier analysis used to score them.
"""

from spder.activations import ActivationSpec, DampingKind
from spder.encoding import EncodingSpec
from spder.network import (MlpConfig, MlpParams, forward, init_mlp,
                           load_checkpoint, save_checkpoint)
from spder.optim import AdamHyper, TrainReport, fit
from spder.signals import CoordGrid, Signal, make_grid, normalize_u8
from spder.spectral import amplitude_spectrum, rho_ag
from spder.tensor import NumericError, ShapeError

__all__ = [
    "ActivationSpec", "DampingKind", "EncodingSpec",
    "MlpConfig", "MlpParams", "forward", "init_mlp",
    "load_checkpoint", "save_checkpoint",
    "AdamHyper", "TrainReport", "fit",
    "CoordGrid", "Signal", "make_grid", "normalize_u8",
    "amplitude_spectrum", "rho_ag",
    "NumericError", "ShapeError",
]
__version__ = "0.1.0"
