"""Scalar quality metrics: PSNR and the 8-bit MSE correspondence.

Signals occupy [-1, 1], so the PSNR peak is fixed at 2 and never
recomputed from data.
"""

import math
from dataclasses import dataclass

SIGNAL_RANGE = 2.0


def psnr_from_mse(mse: float) -> float:
    """10*log10(4/mse) in dB; +inf for a perfect fit."""
    if mse < 0:
        raise ValueError("mse must be non-negative")
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(SIGNAL_RANGE ** 2 / mse)


def mse_8bit(mse: float) -> float:
    """Training-scale MSE expressed in squared 8-bit pixel units."""
    if mse < 0:
        raise ValueError("mse must be non-negative")
    return mse * (255.0 / 2.0) ** 2


@dataclass(frozen=True)
class MetricSnapshot:
    step: int
    mse: float
    psnr_db: float
    mse_8bit: float
    rho_ag: float | None = None

    def __post_init__(self):
        expected = psnr_from_mse(self.mse)
        if math.isfinite(expected) and abs(self.psnr_db - expected) > 1e-9:
            raise ValueError("psnr_db inconsistent with mse")

    @classmethod
    def from_mse(cls, step: int, mse: float, rho: float | None = None):
        return cls(step=step, mse=mse, psnr_db=psnr_from_mse(mse),
                   mse_8bit=mse_8bit(mse), rho_ag=rho)
