"""Command-line surface.

stdout carries only the final metric line; diagnostics go to stderr.
Exit codes: 0 success, 1 numeric/task failure, 2 usage error.

SPDER_THREADS caps BLAS parallelism; it must be applied before numpy
loads, so the heavy imports happen inside main().
"""

import argparse
import os
import sys


def _apply_thread_cap():
    cap = os.environ.get("SPDER_THREADS")
    if not cap:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS"):
        os.environ.setdefault(var, cap)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spder",
        description="Train coordinate MLPs with semiperiodic activations")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_steps):
        p.add_argument("--preset", default="spder",
                       help="relu | relu_pe | relu_ffn | siren | "
                            "spder[:damping]")
        p.add_argument("--steps", type=int, default=default_steps)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="out")
        p.add_argument("--paper-scale", action="store_true")

    p = sub.add_parser("fit", help="fit one grayscale image")
    p.add_argument("--image", required=True)
    common(p, 500)

    p = sub.add_parser("superres", help="super-resolve a fitted image")
    p.add_argument("--image", required=True)
    p.add_argument("--srf", type=int, default=2, choices=(2, 4, 8))
    p.add_argument("--truth", default=None,
                   help="higher-resolution ground truth image")
    common(p, 100)

    p = sub.add_parser("grad", help="gradient image from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--shape", required=True,
                   help="ROWSxCOLS of the query grid, e.g. 64x64")
    p.add_argument("--out", default="out")

    p = sub.add_parser("audio", help="fit one mono PCM16 clip")
    p.add_argument("--wav", required=True)
    common(p, 1000)

    p = sub.add_parser("audio-interp",
                       help="train on a decimated clip, score UF 2/4/8")
    p.add_argument("--wav", required=True)
    common(p, 250)

    p = sub.add_parser("video", help="fit a PGM frame stack")
    p.add_argument("--frames", required=True,
                   help="directory with manifest.json and PGM frames")
    common(p, 400)

    p = sub.add_parser("ablate", help="loss curves per damping function")
    p.add_argument("--image", required=True)
    common(p, 250)

    p = sub.add_parser("spectrum", help="dump an amplitude spectrum as CSV")
    p.add_argument("--input", required=True, help="PGM or WAV file")
    p.add_argument("--out", default="out")
    return parser


def _metric_line(step, mse, psnr, rho):
    rho_s = "nan" if rho is None else repr(rho)
    return f"step={step} mse={mse!r} psnr={psnr!r} rho={rho_s}"


def main(argv=None) -> int:
    _apply_thread_cap()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)

    from spder import fileio, tasks
    from spder.metrics import psnr_from_mse
    from spder.spectral import amplitude_spectrum
    from spder.tensor import NumericError

    try:
        if args.command == "fit":
            _, _, _, report = tasks.task_image_fit(
                args.image, args.preset, args.steps, args.seed, args.out)
            print(_metric_line(args.steps, report.final_loss,
                               psnr_from_mse(report.final_loss),
                               report.final_rho_ag))
        elif args.command == "superres":
            snap, _ = tasks.task_superresolve(
                args.image, args.preset, args.srf, args.steps, args.seed,
                args.out, truth_path=args.truth)
            print(_metric_line(snap.step, snap.mse, snap.psnr_db,
                               snap.rho_ag))
        elif args.command == "grad":
            shape = tuple(int(n) for n in args.shape.lower().split("x"))
            out_path = os.path.join(args.out, "gradient.pgm")
            tasks.task_gradient_image(args.checkpoint, shape, out_path)
            print(f"wrote {out_path}", file=sys.stderr)
        elif args.command == "audio":
            _, _, _, report = tasks.task_audio_fit(
                args.wav, args.preset, args.steps, args.seed, args.out)
            print(_metric_line(args.steps, report.final_loss,
                               psnr_from_mse(report.final_loss),
                               report.final_rho_ag))
        elif args.command == "audio-interp":
            table, report = tasks.task_audio_interpolate(
                args.wav, args.preset, args.steps, args.seed, args.out)
            mse = table[8]
            print(_metric_line(args.steps, mse, psnr_from_mse(mse), None))
        elif args.command == "video":
            _, _, _, report = tasks.task_video_fit(
                args.frames, args.preset, args.steps, args.seed, args.out,
                args.paper_scale)
            print(_metric_line(args.steps, report.final_loss,
                               psnr_from_mse(report.final_loss),
                               report.final_rho_ag))
        elif args.command == "ablate":
            tasks.task_ablate_delta(args.image, None, args.steps, args.seed,
                                    args.out)
            print(f"wrote {os.path.join(args.out, 'ablate')}",
                  file=sys.stderr)
        elif args.command == "spectrum":
            _dump_spectrum(args.input, args.out, fileio, amplitude_spectrum)
    except NumericError as err:
        print(f"numeric failure: {err}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


def _dump_spectrum(input_path, outdir, fileio, amplitude_spectrum):
    from spder.signals import normalize_u8

    if input_path.lower().endswith(".pgm"):
        signal = normalize_u8(fileio.read_pgm(input_path))
    else:
        signal, _ = fileio.read_wav(input_path)
    amp = amplitude_spectrum(signal)
    rows = amp.reshape(amp.shape[0], -1)
    body = "\n".join(",".join(repr(v) for v in row) for row in rows) + "\n"
    os.makedirs(outdir, exist_ok=True)
    fileio.atomic_write(os.path.join(outdir, "spectrum.csv"), body.encode())
    print(f"wrote {os.path.join(outdir, 'spectrum.csv')}", file=sys.stderr)


def console_entry():
    raise SystemExit(main())


if __name__ == "__main__":
    console_entry()
