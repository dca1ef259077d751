"""Discrete Fourier machinery: FFT, amplitude spectra, spectrum cosine.

fft_1d computes the unnormalized forward transform
    X_n = sum_k s_k exp(-i 2 pi n k / N)
with a vectorized radix-2 path for power-of-two lengths, a chunked naive
DFT for other lengths below 4096, and Bluestein's chirp algorithm above.
fft_2d additionally carries the 1/(M*N) normalization used for image
spectra.
"""

import numpy as np

from spder.signals import Signal

_NAIVE_LIMIT = 4096
_NAIVE_CHUNK = 256


class UndefinedSimilarityError(ValueError):
    """Cosine similarity is undefined for a zero-norm spectrum."""


def _fft_radix2(x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    out = x.reshape(n, 1).astype(np.complex128)
    # bit-reversal by repeated even/odd interleave
    levels = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=int)
    for b in range(levels):
        rev |= ((idx >> b) & 1) << (levels - 1 - b)
    out = out[rev]
    size = 1
    while size < n:
        half = size
        size *= 2
        tw = np.exp(-2j * np.pi * np.arange(half) / size).reshape(-1, 1)
        out = out.reshape(n // size, size, -1)
        even = out[:, :half]
        odd = out[:, half:] * tw
        out = np.concatenate([even + odd, even - odd], axis=1)
    return out.reshape(n)


def _dft_naive(x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    k = np.arange(n)
    out = np.empty(n, dtype=np.complex128)
    for start in range(0, n, _NAIVE_CHUNK):
        rows = np.arange(start, min(start + _NAIVE_CHUNK, n))
        out[rows] = np.exp(-2j * np.pi * np.outer(rows, k) / n) @ x
    return out


def _fft_bluestein(x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    m = 1 << (2 * n - 1).bit_length()
    chirp = np.exp(-1j * np.pi * (np.arange(n) ** 2) / n)
    a = np.zeros(m, dtype=np.complex128)
    a[:n] = x * chirp
    b = np.zeros(m, dtype=np.complex128)
    conj = np.conj(chirp)
    b[:n] = conj
    b[m - n + 1:] = conj[1:][::-1]
    conv = _ifft_unscaled(_fft_radix2(a) * _fft_radix2(b)) / m
    return conv[:n] * chirp


def _ifft_unscaled(x: np.ndarray) -> np.ndarray:
    return np.conj(_fft_radix2(np.conj(x)))


def fft_1d(values) -> np.ndarray:
    """Unnormalized forward DFT of a 1-D sequence."""
    x = np.asarray(values, dtype=np.complex128).reshape(-1)
    n = x.shape[0]
    if n == 0:
        raise ValueError("empty signal")
    if n == 1:
        return x.copy()
    if n & (n - 1) == 0:
        return _fft_radix2(x)
    if n < _NAIVE_LIMIT:
        return _dft_naive(x)
    return _fft_bluestein(x)


def ifft_1d(spectrum) -> np.ndarray:
    x = np.asarray(spectrum, dtype=np.complex128).reshape(-1)
    return np.conj(fft_1d(np.conj(x))) / x.shape[0]


def fft_2d(values) -> np.ndarray:
    """2-D transform with the 1/(M*N) normalization built in."""
    a = np.asarray(values, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError("fft_2d expects a 2-D array")
    m, n = a.shape
    rows = np.stack([fft_1d(a[i]) for i in range(m)])
    cols = np.stack([fft_1d(rows[:, j]) for j in range(n)], axis=1)
    return cols / (m * n)


def ifft_2d(spectrum) -> np.ndarray:
    a = np.asarray(spectrum, dtype=np.complex128)
    m, n = a.shape
    return np.conj(fft_2d(np.conj(a))) * (m * n) ** 2 / (m * n)


def amplitude_spectrum(signal) -> np.ndarray:
    """Zero-centered magnitude spectrum (DC bin zeroed).

    1-D signals use the (2/N)|X_n| convention; 2-D signals use the
    1/(M*N)-normalized transform magnitude.
    """
    values = signal.values if isinstance(signal, Signal) else np.asarray(signal)
    if values.ndim == 1:
        n = values.shape[0]
        amp = (2.0 / n) * np.abs(fft_1d(values))
        amp[0] = 0.0
        return amp
    if values.ndim == 2:
        amp = np.abs(fft_2d(values))
        amp[0, 0] = 0.0
        return amp
    raise ValueError("amplitude_spectrum supports 1-D and 2-D signals only")


def rho_ag(a, g) -> float:
    """Cosine similarity between two amplitude spectra."""
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    g = np.asarray(g, dtype=np.float64).reshape(-1)
    if a.shape != g.shape:
        raise ValueError(f"spectrum shape mismatch: {a.shape} vs {g.shape}")
    na = np.linalg.norm(a)
    ng = np.linalg.norm(g)
    if na == 0.0 or ng == 0.0:
        raise UndefinedSimilarityError("zero-norm amplitude spectrum")
    return float(np.dot(a, g) / (na * ng))


def signed_angular_frequencies(n: int) -> np.ndarray:
    """omega_k = 2 pi k / N for k < N/2, shifted negative above."""
    k = np.arange(n)
    k = np.where(k < (n + 1) // 2, k, k - n)
    return 2.0 * np.pi * k / n


def fourier_gradient_1d(spectrum, omega=None) -> np.ndarray:
    """Spectrum of the derivative: multiply bin k by i*omega_k."""
    x = np.asarray(spectrum, dtype=np.complex128).reshape(-1)
    if omega is None:
        omega = signed_angular_frequencies(x.shape[0])
    return 1j * np.asarray(omega) * x
