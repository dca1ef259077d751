#!/usr/bin/env python3
"""Regenerate the bundled fixture corpus under fixtures/.

Synthetic images/audio/video are computed here; the natural images are
64x64 and 128x128 bilinear reductions of the public-domain photographs
bundled with scikit-image (camera, moon).  Run from the repo root; commits the
exact bytes plus a SHA256SUMS manifest.
"""

import hashlib
import json
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from spder.fileio import write_pgm, write_wav
from spder.signals import Signal, bilinear_resize

FIXDIR = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def save_image(name, pixels):
    write_pgm(pixels.astype(np.uint8), os.path.join(FIXDIR, name))


def synth_images():
    n = 64
    r = np.arange(n)
    ramp = np.round(np.linspace(0, 255, n))[None, :].repeat(n, axis=0)
    save_image("ramp64.pgm", ramp)

    checker = 255 * ((r[:, None] // 8 + r[None, :] // 8) % 2)
    save_image("checker64.pgm", checker)

    yy, xx = np.meshgrid(r, r, indexing="ij")
    cosine = 127.5 * (1 + np.cos(2 * np.pi * 3 * xx / n)
                      * np.cos(2 * np.pi * 2 * yy / n))
    save_image("cosine64.pgm", np.round(cosine))

    edge = np.where(xx < n // 2, 40, 215).astype(float)
    save_image("edge64.pgm", edge)


def natural_images():
    import skimage.data

    for name, img in (("natural64_camera.pgm", skimage.data.camera()),
                      ("natural64_moon.pgm", skimage.data.moon())):
        sig = Signal(img.astype(np.float64))
        small = bilinear_resize(sig, (64, 64)).values
        save_image(name, np.clip(np.round(small), 0, 255))
        # 128x128 reductions of the same photographs serve as ground
        # truth at the 2x super-resolution target resolution.
        big = bilinear_resize(sig, (128, 128)).values
        save_image(name.replace("64", "128"), np.clip(np.round(big), 0, 255))


def synth_audio():
    rate = 8000
    n = 4000  # 0.5 s keeps the CPU suite quick
    t = np.arange(n) / rate
    tone = 0.8 * np.sin(2 * np.pi * 440.0 * t)
    write_wav(tone, rate, os.path.join(FIXDIR, "tone440.wav"))

    # harmonic chirp: fundamental sweeps 100 -> 200 Hz linearly with
    # five partials, a naturalistic pitch glide rather than a bare sweep
    f0, f1 = 100.0, 200.0
    phase = 2 * np.pi * (f0 * t + 0.5 * (f1 - f0) / t[-1] * t * t)
    partials = (0.45, 0.25, 0.15, 0.1, 0.05)
    rich = sum(a * np.sin((k + 1) * phase) for k, a in enumerate(partials))
    write_wav(rich, rate, os.path.join(FIXDIR, "chirp.wav"))

    # two-tone chord, below the Nyquist rate of an 8x decimated clip
    chord = 0.4 * np.sin(2 * np.pi * 220.0 * t) + 0.3 * np.sin(
        2 * np.pi * 330.0 * t)
    write_wav(chord, rate, os.path.join(FIXDIR, "chord.wav"))


def synth_video():
    frames, h, w = 8, 16, 16
    stack = np.zeros((frames, h, w))
    for f in range(frames):
        x0 = 2 + f
        stack[f, 5:11, x0:x0 + 4] = 255.0
        stack[f] += 20.0
    outdir = os.path.join(FIXDIR, "video_square")
    os.makedirs(outdir, exist_ok=True)
    names = []
    for i in range(frames):
        name = f"frame_{i:04d}.pgm"
        write_pgm(np.clip(stack[i], 0, 255).astype(np.uint8),
                  os.path.join(outdir, name))
        names.append(name)
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump({"frames": names}, fh, indent=2)


def checksums():
    lines = []
    for root, _, files in sorted(os.walk(FIXDIR)):
        for name in sorted(files):
            if name == "SHA256SUMS":
                continue
            path = os.path.join(root, name)
            rel = os.path.relpath(path, FIXDIR)
            digest = hashlib.sha256(open(path, "rb").read()).hexdigest()
            lines.append(f"{digest}  {rel}")
    with open(os.path.join(FIXDIR, "SHA256SUMS"), "w") as fh:
        fh.write("\n".join(lines) + "\n")


def main():
    os.makedirs(FIXDIR, exist_ok=True)
    synth_images()
    natural_images()
    synth_audio()
    synth_video()
    checksums()
    print(f"fixtures written to {FIXDIR}")


if __name__ == "__main__":
    main()
