import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spder.metrics import MetricSnapshot, mse_8bit, psnr_from_mse


def test_psnr_forty_db_point():
    assert psnr_from_mse(4e-4) == pytest.approx(40.0, abs=1e-9)


def test_psnr_at_full_range_error():
    # mse equal to the squared peak gives exactly 0 dB
    assert psnr_from_mse(4.0) == pytest.approx(0.0, abs=1e-12)


def test_psnr_perfect_fit_is_infinite():
    assert psnr_from_mse(0.0) == math.inf


def test_psnr_rejects_negative():
    with pytest.raises(ValueError):
        psnr_from_mse(-1e-9)


def test_mse_8bit_scale():
    assert mse_8bit(4.0 / 255.0 ** 2) == pytest.approx(1.0)


def test_mse_8bit_paper_scale_point():
    # 6.7e-8 on the [-1, 1] scale is about a thousandth of a pixel squared
    assert 0.00105 <= mse_8bit(6.7e-8) <= 0.00115


@given(st.floats(1e-12, 4.0))
@settings(max_examples=80, deadline=None)
def test_psnr_monotone_decreasing(mse):
    assert psnr_from_mse(mse) >= psnr_from_mse(mse * 1.5)


@given(st.floats(0.0, 10.0))
@settings(max_examples=40, deadline=None)
def test_mse_8bit_linear(mse):
    assert mse_8bit(2.0 * mse) == pytest.approx(2.0 * mse_8bit(mse))


def test_snapshot_from_mse_consistent():
    snap = MetricSnapshot.from_mse(100, 1e-4, rho=0.5)
    assert snap.step == 100
    assert snap.psnr_db == pytest.approx(psnr_from_mse(1e-4))
    assert snap.mse_8bit == pytest.approx(mse_8bit(1e-4))
    assert snap.rho_ag == 0.5


def test_snapshot_rejects_inconsistent_psnr():
    with pytest.raises(ValueError):
        MetricSnapshot(step=1, mse=1e-4, psnr_db=10.0, mse_8bit=mse_8bit(1e-4))
