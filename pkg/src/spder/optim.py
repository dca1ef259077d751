"""Full-batch Adam training loop over a single coordinate grid.

Each fit owns its parameters; loss is recorded every step, spectrum
similarity only at checkpoint steps (FFT cost).  The minimum-loss
parameter snapshot is retained alongside the final parameters because the
late loss curve can spike.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from spder.metrics import MetricSnapshot, psnr_from_mse
from spder.network import MlpConfig, MlpParams, backward, forward, init_mlp
from spder.signals import CoordGrid, Signal
from spder.spectral import amplitude_spectrum, rho_ag
from spder.tensor import NumericError, ShapeError, as_matrix

DEFAULT_CHECKPOINTS = (25, 100, 500, 1000)


@dataclass(frozen=True)
class AdamHyper:
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("betas must lie in [0, 1)")


@dataclass
class AdamState:
    t: int
    m: MlpParams
    v: MlpParams

    @classmethod
    def zeros_like(cls, params: MlpParams):
        zero = lambda arrs: [np.zeros_like(a) for a in arrs]
        return cls(t=0,
                   m=MlpParams(zero(params.weights), zero(params.biases)),
                   v=MlpParams(zero(params.weights), zero(params.biases)))


@dataclass
class TrainReport:
    steps: int
    loss_curve: list = field(default_factory=list)
    psnr_curve: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)  # MetricSnapshot
    final_rho_ag: float | None = None
    final_loss: float | None = None
    wall_ms: float = 0.0
    min_loss: float = float("inf")
    min_loss_step: int = -1


def mse_loss_and_grad(pred, target):
    pred = as_matrix(pred)
    target = as_matrix(target)
    if pred.shape != target.shape:
        raise ShapeError(f"loss shape mismatch: {pred.shape} vs {target.shape}")
    diff = pred - target
    n = diff.size
    loss = float(np.mean(diff * diff))
    return loss, 2.0 * diff / n


def adam_step(params: MlpParams, grads: MlpParams, state: AdamState,
              hyper: AdamHyper):
    """One bias-corrected Adam update; returns fresh params and state."""
    for g in grads.weights + grads.biases:
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient at step {state.t}")
    t = state.t + 1
    c1 = 1.0 - hyper.beta1 ** t
    c2 = 1.0 - hyper.beta2 ** t
    new_w, new_b = [], []
    new_m = MlpParams([], [])
    new_v = MlpParams([], [])
    for group in ("weights", "biases"):
        for p, g, m, v in zip(getattr(params, group), getattr(grads, group),
                              getattr(state.m, group), getattr(state.v, group)):
            m = hyper.beta1 * m + (1.0 - hyper.beta1) * g
            v = hyper.beta2 * v + (1.0 - hyper.beta2) * g * g
            step = hyper.lr * (m / c1) / (np.sqrt(v / c2) + hyper.eps)
            (new_w if group == "weights" else new_b).append(p - step)
            getattr(new_m, group).append(m)
            getattr(new_v, group).append(v)
    return MlpParams(new_w, new_b), AdamState(t=t, m=new_m, v=new_v)


def fit(config: MlpConfig, grid: CoordGrid, target: Signal, steps: int,
        hyper: AdamHyper | None = None, checkpoints=DEFAULT_CHECKPOINTS,
        on_checkpoint=None):
    """Train on the full batch for `steps` iterations.

    Returns (final params, min-loss params, TrainReport).  Numeric
    failure raises NumericError with the partial TrainReport attached as
    ``err.report`` so the last-good state stays reachable.
    `on_checkpoint(step, params, pred)` fires after metrics at each
    checkpoint step.
    """
    if hyper is None:
        hyper = AdamHyper()
    if grid.num_points != int(np.prod(target.shape)):
        raise ShapeError(
            f"grid has {grid.num_points} points, target has "
            f"{int(np.prod(target.shape))} samples")
    target_mat = target.flat()
    target_amp = None
    params = init_mlp(config)
    state = AdamState.zeros_like(params)
    report = TrainReport(steps=steps)
    best_params = params.copy()
    checkpoints = sorted(set(int(c) for c in checkpoints if c <= steps))
    t0 = time.perf_counter()
    try:
        for step in range(1, steps + 1):
            pred, cache = forward(params, config, grid.coords)
            loss, dL = mse_loss_and_grad(pred, target_mat)
            report.loss_curve.append(loss)
            report.psnr_curve.append(psnr_from_mse(loss))
            if loss < report.min_loss:
                report.min_loss = loss
                report.min_loss_step = step
                best_params = params.copy()
            grads = backward(params, config, cache, dL)
            params, state = adam_step(params, grads, state, hyper)
            if step in checkpoints:
                rho = None
                if target.dims <= 2:
                    if target_amp is None:
                        target_amp = amplitude_spectrum(target)
                    rho = rho_ag(amplitude_spectrum(
                        pred.reshape(target.shape)), target_amp)
                report.snapshots.append(
                    MetricSnapshot.from_mse(step, loss, rho))
                if on_checkpoint is not None:
                    on_checkpoint(step, params, pred)
    except NumericError as err:
        err.report = report
        raise
    finally:
        report.wall_ms = (time.perf_counter() - t0) * 1000.0
    pred, _ = forward(params, config, grid.coords)
    final_loss, _ = mse_loss_and_grad(pred, target_mat)
    report.final_rho_ag = _final_rho(pred, target)
    report.final_loss = final_loss
    return params, best_params, report


def _final_rho(pred, target: Signal):
    if target.dims > 2:
        return None
    return rho_ag(amplitude_spectrum(np.asarray(pred).reshape(target.shape)),
                  amplitude_spectrum(target))


def report_csv_lines(report: TrainReport):
    """CSV rows (step,loss,psnr) with locale-independent formatting."""
    yield "step,loss,psnr"
    for i, (loss, psnr) in enumerate(zip(report.loss_curve,
                                         report.psnr_curve), start=1):
        yield f"{i},{loss!r},{psnr!r}"
