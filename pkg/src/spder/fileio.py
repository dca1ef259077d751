"""File codecs: binary PGM (P5, maxval 255) and RIFF/WAVE PCM16.

All writes go through a temp-file-plus-rename so partially written
artifacts never appear under their final name.
"""

import os
import struct
import tempfile
import warnings

import numpy as np

from spder.signals import Signal


class PgmParseError(ValueError):
    """Malformed PGM input; message carries the byte offset."""


class WavFormatError(ValueError):
    """Unsupported or malformed WAV input."""


def atomic_write(path, data: bytes):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _next_token(data: bytes, offset: int):
    n = len(data)
    while offset < n:
        c = data[offset:offset + 1]
        if c == b"#":
            while offset < n and data[offset:offset + 1] != b"\n":
                offset += 1
        elif c.isspace():
            offset += 1
        else:
            break
    start = offset
    while offset < n and not data[offset:offset + 1].isspace():
        offset += 1
    if start == offset:
        raise PgmParseError(f"unexpected end of header at byte {start}")
    return data[start:offset], offset


def read_pgm(path) -> np.ndarray:
    """Parse a binary PGM into a (rows x cols) uint8 array."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic, offset = _next_token(data, 0)
    if magic != b"P5":
        raise PgmParseError(f"bad magic {magic!r} at byte 0 (want P5)")
    fields = []
    for name in ("width", "height", "maxval"):
        tok, offset = _next_token(data, offset)
        try:
            fields.append(int(tok))
        except ValueError:
            raise PgmParseError(
                f"non-numeric {name} {tok!r} near byte {offset}") from None
    width, height, maxval = fields
    if maxval != 255:
        raise PgmParseError(f"unsupported maxval {maxval} (only 255)")
    offset += 1  # exactly one whitespace byte separates header and raster
    expected = width * height
    raster = data[offset:offset + expected]
    if len(raster) != expected:
        raise PgmParseError(
            f"raster truncated at byte {offset + len(raster)}: "
            f"want {expected} bytes, have {len(raster)}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width)


def write_pgm(image, path):
    img = np.asarray(image)
    if img.ndim != 2 or img.dtype != np.uint8:
        raise ValueError("write_pgm expects a 2-D uint8 array")
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii")
    atomic_write(path, header + img.tobytes())


_RIFF = struct.Struct("<4sI4s")
_CHUNK = struct.Struct("<4sI")
_FMT = struct.Struct("<HHIIHH")


def read_wav(path):
    """Read a PCM16 WAV file into (Signal in [-1, 1], sample_rate).

    Stereo input is averaged down to mono with a warning.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12:
        raise WavFormatError("file too short for a RIFF header")
    tag, _, wave = _RIFF.unpack_from(data, 0)
    if tag != b"RIFF" or wave != b"WAVE":
        raise WavFormatError("not a RIFF/WAVE file")
    offset = 12
    fmt = None
    frames = None
    while offset + _CHUNK.size <= len(data):
        cid, size = _CHUNK.unpack_from(data, offset)
        body = data[offset + _CHUNK.size:offset + _CHUNK.size + size]
        if cid == b"fmt ":
            fmt = _FMT.unpack_from(body, 0)
        elif cid == b"data":
            frames = body
        offset += _CHUNK.size + size + (size & 1)
    if fmt is None or frames is None:
        raise WavFormatError("missing fmt or data chunk")
    audio_format, channels, rate, _, _, bits = fmt
    if audio_format != 1:
        raise WavFormatError(f"unsupported (compressed) format tag {audio_format}")
    if bits != 16:
        raise WavFormatError(f"unsupported bit depth {bits} (only PCM16)")
    samples = np.frombuffer(frames, dtype="<i2").astype(np.float64) / 32768.0
    if channels == 2:
        warnings.warn("stereo input averaged to mono")
        samples = samples.reshape(-1, 2).mean(axis=1)
    elif channels != 1:
        raise WavFormatError(f"unsupported channel count {channels}")
    return Signal(values=samples, source_bit_depth=16), rate


def write_wav(signal, rate: int, path):
    values = signal.values if isinstance(signal, Signal) else np.asarray(signal)
    pcm = np.clip(np.round(values * 32768.0), -32768, 32767).astype("<i2")
    body = pcm.tobytes()
    fmt = _FMT.pack(1, 1, rate, rate * 2, 2, 16)
    payload = (b"WAVE"
               + _CHUNK.pack(b"fmt ", len(fmt)) + fmt
               + _CHUNK.pack(b"data", len(body)) + body
               + (b"\x00" if len(body) & 1 else b""))
    atomic_write(path, _CHUNK.pack(b"RIFF", len(payload)) + payload)
