"""End-to-end experiment drivers at desk scale.

Every task resolves an architecture preset, trains with the full-batch
Adam loop, and writes its outputs under <outdir>/<task>/<preset>/:
report.csv, meta.json, checkpoint.spdr and task artifacts.
"""

import hashlib
import json
import math
import os
import time
from dataclasses import dataclass, replace

import numpy as np

from spder import fileio
from spder.activations import ActivationSpec, DampingKind
from spder.encoding import EncodingSpec
from spder.metrics import MetricSnapshot, mse_8bit, psnr_from_mse
from spder.network import (MlpConfig, PRNG_ALGORITHM, forward, input_gradient,
                           load_checkpoint, save_checkpoint)
from spder.optim import (AdamHyper, TrainReport, fit, mse_loss_and_grad,
                         report_csv_lines)
from spder.signals import (AUDIO_BOUNDS, CoordGrid, Signal, bilinear_resize,
                           denormalize_u8, make_grid, normalize_u8)
from spder.spectral import amplitude_spectrum, rho_ag
from spder.tensor import NumericError

PRESET_NAMES = ("relu", "relu_pe", "relu_ffn", "siren", "spder")
IMAGE_CHECKPOINTS = (25, 100, 500)
AUDIO_CHECKPOINTS = (25, 100, 500, 1000)
DESK_VIDEO_POINT_CAP = 65536

_DAMPING_BY_NAME = {k.value: k for k in DampingKind}


@dataclass(frozen=True)
class Preset:
    name: str
    activation: ActivationSpec
    encoding: EncodingSpec


def resolve_preset(name: str, task: str = "image", seed: int = 0) -> Preset:
    """Map a preset string (e.g. "spder:sqrtabs") to concrete specs."""
    base, _, damping_name = name.partition(":")
    if base == "relu":
        return Preset(name, ActivationSpec(kind="relu"), EncodingSpec())
    if base == "relu_pe":
        return Preset(name, ActivationSpec(kind="relu"),
                      EncodingSpec(kind="positional"))
    if base == "relu_ffn":
        return Preset(name, ActivationSpec(kind="relu"),
                      EncodingSpec(kind="fourier", seed=seed))
    if base == "siren":
        return Preset(name, ActivationSpec(damping=DampingKind.CONST1),
                      EncodingSpec())
    if base == "spder":
        if damping_name:
            damping = _DAMPING_BY_NAME.get(damping_name)
            if damping is None:
                raise ValueError(f"unknown damping {damping_name!r}")
        else:
            # audio favors arctan; everything else sqrt|x|
            damping = (DampingKind.ARCTAN if task == "audio"
                       else DampingKind.SQRT_ABS)
        return Preset(name, ActivationSpec(damping=damping), EncodingSpec())
    raise ValueError(f"unknown preset {name!r}")


def task_hyper(task: str, paper_scale: bool = False):
    """(hidden_width, depth, AdamHyper) frozen per task family."""
    if task in ("image", "ablate"):
        return 256, 5, AdamHyper(lr=1e-4)
    if task == "audio":
        return 256, 5, AdamHyper(lr=5e-5)
    if task == "video":
        if paper_scale:
            return 1024, 12, AdamHyper(lr=5e-6)
        return 256, 6, AdamHyper(lr=1e-4)
    raise ValueError(f"unknown task family {task!r}")


def _task_dir(outdir, task, preset_name):
    d = os.path.join(outdir, task, preset_name.replace(":", "_"))
    os.makedirs(d, exist_ok=True)
    return d


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def _write_manifest(directory, meta, status):
    meta = dict(meta, status=status, prng=PRNG_ALGORITHM, optimizer="adam")
    fileio.atomic_write(os.path.join(directory, "meta.json"),
                        json.dumps(meta, indent=2, sort_keys=True).encode())


def _write_report(directory, report: TrainReport):
    body = "\n".join(report_csv_lines(report)) + "\n"
    fileio.atomic_write(os.path.join(directory, "report.csv"), body.encode())


def _snapshot_meta(report: TrainReport):
    return [
        {"step": s.step, "mse": s.mse, "psnr_db": s.psnr_db,
         "mse_8bit": s.mse_8bit, "rho_ag": s.rho_ag}
        for s in report.snapshots
    ]


def _run_fit(config, grid, signal, steps, hyper, checkpoints, directory,
             meta, on_checkpoint=None):
    _write_manifest(directory, meta, "running")
    t0 = time.perf_counter()
    params, best_params, report = fit(config, grid, signal, steps,
                                      hyper, checkpoints, on_checkpoint)
    meta = dict(meta,
                wall_ms=(time.perf_counter() - t0) * 1000.0,
                final_loss=report.final_loss,
                final_rho_ag=report.final_rho_ag,
                min_loss=report.min_loss,
                min_loss_step=report.min_loss_step,
                checkpoints=_snapshot_meta(report))
    _write_report(directory, report)
    save_checkpoint(os.path.join(directory, "checkpoint.spdr"),
                    config, params)
    _write_manifest(directory, meta, "done")
    return params, best_params, report


def _image_config(shape_or_dim2, preset: Preset, width, depth, seed):
    return MlpConfig(in_dim=2, out_dim=1, hidden_width=width, depth=depth,
                     activation=preset.activation, encoding=preset.encoding,
                     seed=seed)


def task_image_fit(image_path, preset_name="spder", steps=500, seed=0,
                   outdir="out", checkpoints=IMAGE_CHECKPOINTS):
    """Fit one grayscale image; writes reconstructions at checkpoints."""
    preset = resolve_preset(preset_name, "image", seed)
    width, depth, hyper = task_hyper("image")
    pixels = fileio.read_pgm(image_path)
    signal = normalize_u8(pixels)
    grid = make_grid(signal.shape)
    config = _image_config(signal.shape, preset, width, depth, seed)
    directory = _task_dir(outdir, "fit", preset_name)
    meta = {"task": "fit", "preset": preset_name, "seed": seed,
            "steps": steps, "input": os.path.basename(str(image_path)),
            "input_sha256": _sha256(image_path), "lr": hyper.lr,
            "shape": list(signal.shape)}

    def write_recon(step, params, pred):
        img = denormalize_u8(pred.reshape(signal.shape))
        fileio.write_pgm(img, os.path.join(directory, f"recon_{step:05d}.pgm"))

    params, best, report = _run_fit(config, grid, signal, steps, hyper,
                                    checkpoints, directory, meta, write_recon)
    pred, _ = forward(params, config, grid.coords)
    fileio.write_pgm(denormalize_u8(pred.reshape(signal.shape)),
                     os.path.join(directory, "recon_final.pgm"))
    return config, params, best, report


def task_gradient_image(checkpoint_path, shape, out_path, chunk=8192):
    """Render per-pixel gradient magnitude of a trained model to a PGM."""
    config, params = load_checkpoint(checkpoint_path)
    if config.out_dim != 1:
        raise ValueError("gradient images need a single-channel model")
    grid = make_grid(shape)
    mags = np.empty(grid.num_points)
    for start in range(0, grid.num_points, chunk):
        block = grid.coords[start:start + chunk]
        g = input_gradient(params, config, block)
        mags[start:start + chunk] = np.linalg.norm(g, axis=1)
    mags = mags.reshape(shape)
    peak = mags.max()
    scaled = mags / peak if peak > 0 else mags
    fileio.write_pgm(np.round(scaled * 255.0).astype(np.uint8), out_path)
    return mags


def task_superresolve(image_path, preset_name="spder", srf=2, steps=100,
                      seed=0, outdir="out", truth_path=None):
    """Train at base resolution, query an srf-times denser grid.

    The query uses the minimum-loss snapshot of the weights rather than
    the final iterate, so a late loss spike cannot degrade the output.
    When ``truth_path`` names a higher-resolution version of the same
    image, metrics are computed against it (bilinear-resized to the
    target shape); otherwise the base image itself is bilinear-resized,
    which measures interpolation smoothness rather than recovered detail.
    """
    if srf not in (2, 4, 8):
        raise ValueError("srf must be one of 2, 4, 8")
    preset = resolve_preset(preset_name, "image", seed)
    width, depth, hyper = task_hyper("image")
    pixels = fileio.read_pgm(image_path)
    base = normalize_u8(pixels)
    grid = make_grid(base.shape)
    config = _image_config(base.shape, preset, width, depth, seed)
    directory = _task_dir(outdir, "superres", preset_name)
    meta = {"task": "superres", "preset": preset_name, "seed": seed,
            "steps": steps, "srf": srf,
            "input": os.path.basename(str(image_path)),
            "input_sha256": _sha256(image_path), "lr": hyper.lr}
    if truth_path is not None:
        meta["truth"] = os.path.basename(str(truth_path))
    _, best_params, report = _run_fit(config, grid, base, steps, hyper, (),
                                      directory, meta)
    target_shape = tuple(srf * n for n in base.shape)
    query = make_grid(target_shape)
    truth_base = (base if truth_path is None
                  else normalize_u8(fileio.read_pgm(truth_path)))
    truth = bilinear_resize(truth_base, target_shape)
    pred, _ = forward(best_params, config, query.coords)
    mse, _ = mse_loss_and_grad(pred, truth.flat())
    rho = rho_ag(amplitude_spectrum(pred.reshape(target_shape)),
                 amplitude_spectrum(truth))
    snapshot = MetricSnapshot.from_mse(steps, mse, rho)
    fileio.write_pgm(denormalize_u8(pred.reshape(target_shape)),
                     os.path.join(directory, f"superres_{srf}x.pgm"))
    _write_manifest(directory, dict(meta, superres_mse=mse,
                                    superres_psnr=snapshot.psnr_db,
                                    superres_rho=rho), "done")
    return snapshot, report


def task_audio_fit(wav_path, preset_name="spder", steps=1000, seed=0,
                   outdir="out", checkpoints=AUDIO_CHECKPOINTS):
    """Fit one mono clip on a 1-D grid with bounds [-100, 100]."""
    preset = resolve_preset(preset_name, "audio", seed)
    width, depth, hyper = task_hyper("audio")
    signal, rate = fileio.read_wav(wav_path)
    grid = make_grid(signal.shape, (AUDIO_BOUNDS,))
    config = MlpConfig(in_dim=1, out_dim=1, hidden_width=width, depth=depth,
                       activation=preset.activation, encoding=preset.encoding,
                       seed=seed)
    directory = _task_dir(outdir, "audio", preset_name)
    meta = {"task": "audio", "preset": preset_name, "seed": seed,
            "steps": steps, "input": os.path.basename(str(wav_path)),
            "input_sha256": _sha256(wav_path), "lr": hyper.lr,
            "sample_rate": rate, "samples": signal.shape[0]}
    params, best, report = _run_fit(config, grid, signal, steps, hyper,
                                    checkpoints, directory, meta)
    pred, _ = forward(params, config, grid.coords)
    fileio.write_wav(np.clip(pred.reshape(-1), -1.0, 1.0), rate,
                     os.path.join(directory, "recon.wav"))
    return config, params, best, report


def task_audio_interpolate(wav_path, preset_name="spder", steps=250, seed=0,
                           outdir="out", train_decimation=8):
    """Train on an 8x-decimated clip, score against denser ground truths.

    Upsampling factor u evaluates on every (8/u)-th sample of the ground
    truth; u = 8 is the full clip.  Training coordinates are a subset of
    every evaluation grid by construction.
    """
    preset = resolve_preset(preset_name, "audio", seed)
    width, depth, hyper = task_hyper("audio")
    signal, rate = fileio.read_wav(wav_path)
    n = signal.shape[0]
    if n < 2 * train_decimation:
        raise ValueError("clip too short for the decimation factor")
    full_grid = make_grid(signal.shape, (AUDIO_BOUNDS,))
    train_coords = full_grid.coords[::train_decimation]
    train_values = signal.values[::train_decimation]
    train_grid = CoordGrid(shape=(train_values.shape[0],),
                           bounds=full_grid.bounds, coords=train_coords)
    config = MlpConfig(in_dim=1, out_dim=1, hidden_width=width, depth=depth,
                       activation=preset.activation, encoding=preset.encoding,
                       seed=seed)
    directory = _task_dir(outdir, "audio_interp", preset_name)
    meta = {"task": "audio_interp", "preset": preset_name, "seed": seed,
            "steps": steps, "input": os.path.basename(str(wav_path)),
            "input_sha256": _sha256(wav_path), "lr": hyper.lr,
            "sample_rate": rate, "samples": n,
            "train_decimation": train_decimation}
    params, _, report = _run_fit(config, train_grid, Signal(train_values),
                                 steps, hyper, (), directory, meta)
    table = {}
    for uf in (2, 4, 8):
        stride = train_decimation // uf
        coords = full_grid.coords[::stride]
        target = signal.values[::stride].reshape(-1, 1)
        pred, _ = forward(params, config, coords)
        mse, _ = mse_loss_and_grad(pred, target)
        table[uf] = mse
    lines = ["uf,mse"] + [f"{uf},{mse!r}" for uf, mse in sorted(table.items())]
    fileio.atomic_write(os.path.join(directory, "uf_table.csv"),
                        ("\n".join(lines) + "\n").encode())
    _write_manifest(directory, dict(meta, uf_table={str(k): v for k, v
                                                    in table.items()}), "done")
    return table, report


def read_video(frames_dir):
    """Load a numbered-PGM frame stack described by manifest.json."""
    manifest_path = os.path.join(frames_dir, "manifest.json")
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    frames = [fileio.read_pgm(os.path.join(frames_dir, name))
              for name in manifest["frames"]]
    return normalize_u8(np.stack(frames))


def write_video(signal: Signal, frames_dir, prefix="frame"):
    os.makedirs(frames_dir, exist_ok=True)
    names = []
    for i in range(signal.shape[0]):
        name = f"{prefix}_{i:04d}.pgm"
        fileio.write_pgm(denormalize_u8(signal.values[i]),
                         os.path.join(frames_dir, name))
        names.append(name)
    fileio.atomic_write(os.path.join(frames_dir, "manifest.json"),
                        json.dumps({"frames": names}, indent=2).encode())


def task_video_fit(frames_dir, preset_name="spder", steps=400, seed=0,
                   outdir="out", paper_scale=False):
    """Fit a (frame, row, col) grid over [-1, 1]^3."""
    preset = resolve_preset(preset_name, "video", seed)
    width, depth, hyper = task_hyper("video", paper_scale)
    video = read_video(frames_dir)
    if not paper_scale and video.values.size > DESK_VIDEO_POINT_CAP:
        raise ValueError(
            f"video has {video.values.size} samples, above the desk cap "
            f"{DESK_VIDEO_POINT_CAP}; pass paper_scale to override")
    grid = make_grid(video.shape)
    config = MlpConfig(in_dim=3, out_dim=1, hidden_width=width, depth=depth,
                       activation=preset.activation, encoding=preset.encoding,
                       seed=seed)
    directory = _task_dir(outdir, "video", preset_name)
    meta = {"task": "video", "preset": preset_name, "seed": seed,
            "steps": steps, "input": os.path.basename(os.path.abspath(frames_dir)),
            "lr": hyper.lr, "shape": list(video.shape),
            "paper_scale": paper_scale}
    params, best, report = _run_fit(config, grid, video, steps, hyper,
                                    (25, 100, steps), directory, meta)
    return config, params, best, report


def task_frame_interpolate(checkpoint_path, video_shape, outdir="out"):
    """Query half-step frame coordinates and write the in-between frames."""
    config, params = load_checkpoint(checkpoint_path)
    frames, h, w = video_shape
    grid = make_grid(video_shape)
    frame_axis = np.linspace(-1.0, 1.0, frames)
    mid = 0.5 * (frame_axis[:-1] + frame_axis[1:])
    plane = make_grid((h, w))
    directory = os.path.join(outdir, "frame_interp")
    os.makedirs(directory, exist_ok=True)
    out_frames = []
    for i, t in enumerate(mid):
        coords = np.concatenate(
            [np.full((plane.num_points, 1), t), plane.coords], axis=1)
        pred, _ = forward(params, config, coords)
        out_frames.append(pred.reshape(h, w))
    stack = Signal(np.stack(out_frames))
    write_video(Signal(np.clip(stack.values, -1.0, 1.0)), directory,
                prefix="interp")
    return stack


def task_ablate_delta(image_path, deltas=None, steps=250, seed=0,
                      outdir="out"):
    """One fit per damping function, shared seed; CSV of log10 losses.

    A run that goes numerically unstable keeps its curve, padded with inf:
    divergence is a legitimate ablation outcome for superlinear dampings.
    """
    if deltas is None:
        deltas = [DampingKind.SQRT_ABS, DampingKind.LOG_ABS,
                  DampingKind.ARCTAN, DampingKind.CONST1,
                  DampingKind.IDENTITY, DampingKind.SQUARE]
    width, depth, hyper = task_hyper("ablate")
    pixels = fileio.read_pgm(image_path)
    signal = normalize_u8(pixels)
    grid = make_grid(signal.shape)
    directory = os.path.join(outdir, "ablate")
    os.makedirs(directory, exist_ok=True)
    curves = {}
    for damping in deltas:
        config = MlpConfig(
            in_dim=2, out_dim=1, hidden_width=width, depth=depth,
            activation=ActivationSpec(damping=damping),
            encoding=EncodingSpec(), seed=seed)
        try:
            _, _, report = fit(config, grid, signal, steps, hyper, ())
            curve = list(report.loss_curve)
        except NumericError as err:
            curve = list(err.report.loss_curve)
        curves[damping.value] = curve + [math.inf] * (steps - len(curve))
    header = "step," + ",".join(d.value for d in deltas)
    lines = [header]
    for i in range(steps):
        row = [str(i + 1)]
        for d in deltas:
            loss = curves[d.value][i]
            row.append(repr(math.log10(loss)) if 0 < loss < math.inf
                       else "inf")
        lines.append(",".join(row))
    fileio.atomic_write(os.path.join(directory, "delta_losses.csv"),
                        ("\n".join(lines) + "\n").encode())
    _write_manifest(directory, {"task": "ablate", "seed": seed,
                                "steps": steps, "lr": hyper.lr,
                                "input_sha256": _sha256(image_path),
                                "deltas": [d.value for d in deltas]}, "done")
    return curves
