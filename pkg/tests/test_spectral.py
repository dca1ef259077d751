import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spder.signals import Signal
from spder.spectral import (UndefinedSimilarityError, amplitude_spectrum,
                            fft_1d, fft_2d, fourier_gradient_1d, ifft_1d,
                            ifft_2d, rho_ag, signed_angular_frequencies)


def dft_oracle(x):
    """Textbook O(N^2) DFT, written independently of the library path."""
    x = np.asarray(x, dtype=np.complex128)
    n = len(x)
    out = np.zeros(n, dtype=np.complex128)
    for m in range(n):
        for k in range(n):
            out[m] += x[k] * np.exp(-2j * np.pi * m * k / n)
    return out


@pytest.mark.parametrize("n", [1, 2, 3, 4, 7, 8, 12, 16, 31, 64, 100])
def test_fft_matches_oracle(n):
    rng = np.random.default_rng(n)
    x = rng.normal(size=n) + 1j * rng.normal(size=n)
    assert np.allclose(fft_1d(x), dft_oracle(x), atol=1e-9)


def test_fft_matches_oracle_large_pow2():
    rng = np.random.default_rng(0)
    x = rng.normal(size=256)
    assert np.allclose(fft_1d(x), dft_oracle(x), atol=1e-8)


def test_bluestein_path_matches_naive():
    # 5000 > naive limit and not a power of two, so this exercises Bluestein
    rng = np.random.default_rng(1)
    x = rng.normal(size=5000)
    got = fft_1d(x)
    want = np.fft.fft(x)  # oracle only; library never calls numpy.fft
    assert np.allclose(got, want, atol=1e-7)


def test_empty_rejected():
    with pytest.raises(ValueError):
        fft_1d([])


@pytest.mark.parametrize("n", [4, 10, 16, 33])
def test_ifft_round_trip(n):
    rng = np.random.default_rng(n)
    x = rng.normal(size=n) + 1j * rng.normal(size=n)
    assert np.allclose(ifft_1d(fft_1d(x)), x, atol=1e-10)


def test_parseval_1d():
    rng = np.random.default_rng(3)
    x = rng.normal(size=240)
    spec = fft_1d(x)
    lhs = np.sum(np.abs(x) ** 2)
    rhs = np.sum(np.abs(spec) ** 2) / 240
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_fft_2d_normalization():
    # constant image: all energy in the DC bin, value equal to the constant
    img = np.full((8, 8), 0.7)
    spec = fft_2d(img)
    assert spec[0, 0] == pytest.approx(0.7)
    assert np.allclose(spec.reshape(-1)[1:], 0.0, atol=1e-12)


def test_fft_2d_matches_separable_oracle():
    rng = np.random.default_rng(5)
    img = rng.normal(size=(12, 16))
    want = np.zeros((12, 16), dtype=np.complex128)
    for i in range(12):
        want[i] = dft_oracle(img[i])
    for j in range(16):
        want[:, j] = dft_oracle(want[:, j])
    want /= 12 * 16
    assert np.allclose(fft_2d(img), want, atol=1e-9)


def test_ifft_2d_round_trip():
    rng = np.random.default_rng(6)
    img = rng.normal(size=(8, 10))
    assert np.allclose(ifft_2d(fft_2d(img)), img, atol=1e-10)


def test_amplitude_spectrum_1d_tone():
    # cos(2 pi m t / N) has amplitude 1 at bin m under the 2/N convention
    n, m = 64, 5
    t = np.arange(n)
    amp = amplitude_spectrum(np.cos(2 * np.pi * m * t / n))
    assert amp[m] == pytest.approx(1.0)
    assert amp[n - m] == pytest.approx(1.0)
    assert amp[0] == 0.0
    mask = np.ones(n, bool)
    mask[[m, n - m, 0]] = False
    assert np.max(amp[mask]) < 1e-10


def test_amplitude_spectrum_zeroes_dc():
    amp = amplitude_spectrum(np.full((4, 4), 0.9))
    assert np.all(amp == 0.0)


def test_amplitude_spectrum_accepts_signal():
    s = Signal(values=np.random.default_rng(0).uniform(-1, 1, (8, 8)))
    assert np.array_equal(amplitude_spectrum(s), amplitude_spectrum(s.values))


def test_rho_ag_self_similarity():
    a = np.abs(np.random.default_rng(1).normal(size=32))
    assert rho_ag(a, a) == pytest.approx(1.0)


def test_rho_ag_scale_invariant():
    a = np.abs(np.random.default_rng(2).normal(size=32))
    b = np.abs(np.random.default_rng(3).normal(size=32))
    assert rho_ag(a, b) == pytest.approx(rho_ag(7.5 * a, b))


def test_rho_ag_zero_norm_raises():
    with pytest.raises(UndefinedSimilarityError):
        rho_ag(np.zeros(8), np.ones(8))


def test_rho_ag_shape_mismatch():
    with pytest.raises(ValueError):
        rho_ag(np.ones(8), np.ones(9))


@pytest.mark.parametrize("n,want_at", [
    (8, {0: 0.0, 1: 2 * np.pi / 8, 4: -np.pi, 7: -2 * np.pi / 8}),
    (5, {2: 4 * np.pi / 5, 3: -4 * np.pi / 5}),
])
def test_signed_angular_frequencies(n, want_at):
    w = signed_angular_frequencies(n)
    for k, v in want_at.items():
        assert w[k] == pytest.approx(v)


def test_fourier_gradient_identity_on_tone():
    # derivative of sin(m x) sampled on [0, 2 pi) is m cos(m x); the
    # spectrum relation F(f') = i omega F(f) must reproduce this exactly
    n, m = 64, 3
    x = 2 * np.pi * np.arange(n) / n
    f = np.sin(m * x)
    want = fft_1d(m * np.cos(m * x))
    got = fourier_gradient_1d(fft_1d(f), omega=signed_angular_frequencies(n) * n / (2 * np.pi))
    assert np.allclose(got, want, atol=1e-8)


@given(st.integers(2, 64))
@settings(max_examples=30, deadline=None)
def test_linearity(n):
    rng = np.random.default_rng(n)
    a = rng.normal(size=n)
    b = rng.normal(size=n)
    assert np.allclose(fft_1d(a + 2.0 * b), fft_1d(a) + 2.0 * fft_1d(b),
                       atol=1e-9)
