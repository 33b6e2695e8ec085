"""Bundled per-index scaling estimates for 31 equity indices.

These are the published roughness/multiscaling estimates (breakpoint lag,
price and realized-variance scaling exponents and proxies at the 10-minute
RV specification) used to parameterize simulations that mirror the
cross-section of real markets, and as fixtures for the dependence tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class IndexCalibration:
    symbol: str
    tau_star: int
    h_price: float
    b_price: float
    h_vol: float
    b_vol: float


INDEX_CALIBRATIONS: tuple[IndexCalibration, ...] = tuple(
    IndexCalibration(*row)
    for row in [
        ("AEX", 516, 0.523, -0.027, 0.130, -0.008),
        ("AORD", 507, 0.510, -0.004, 0.061, -0.007),
        ("BFX", 446, 0.542, -0.032, 0.136, -0.006),
        ("BSESN", 326, 0.535, -0.005, 0.104, -0.007),
        ("BVLG", 461, 0.472, -0.023, 0.107, -0.006),
        ("BVSP", 335, 0.504, -0.023, 0.109, -0.004),
        ("DJI", 445, 0.479, -0.030, 0.105, -0.005),
        ("FCHI", 578, 0.499, -0.032, 0.123, -0.012),
        ("FTMIB", 256, 0.485, -0.026, 0.112, -0.005),
        ("FTSE", 486, 0.485, -0.022, 0.105, -0.009),
        ("GDAXI", 502, 0.519, -0.033, 0.131, -0.011),
        ("GSPTSE", 337, 0.512, -0.022, 0.092, -0.002),
        ("HSI", 669, 0.503, -0.024, 0.083, -0.008),
        ("IBEX", 1070, 0.520, -0.030, 0.137, -0.010),
        ("IXIC", 927, 0.529, -0.016, 0.103, -0.009),
        ("KS11", 985, 0.509, -0.014, 0.088, -0.007),
        ("KSE", 103, 0.582, -0.024, 0.112, -0.000),
        ("MXX", 1096, 0.540, -0.039, 0.075, -0.017),
        ("N225", 344, 0.517, -0.017, 0.096, -0.003),
        ("NSEI", 477, 0.531, -0.014, 0.104, -0.005),
        ("OMXC20", 439, 0.517, -0.020, 0.104, -0.007),
        ("OMXHPI", 371, 0.514, -0.017, 0.117, -0.008),
        ("OMXSPI", 444, 0.506, -0.015, 0.124, -0.007),
        ("OSEAX", 332, 0.531, -0.014, 0.093, -0.008),
        ("RUT", 229, 0.470, -0.005, 0.110, -0.002),
        ("SMSI", 643, 0.523, -0.032, 0.128, -0.012),
        ("SPX", 477, 0.496, -0.029, 0.115, -0.002),
        ("SSEC", 511, 0.570, -0.020, 0.114, -0.007),
        ("SSMI", 528, 0.510, -0.025, 0.135, -0.004),
        ("STI", 598, 0.557, -0.018, 0.072, -0.009),
        ("STOXX50E", 504, 0.504, -0.035, 0.118, -0.019),
    ]
)

SYMBOLS: tuple[str, ...] = tuple(c.symbol for c in INDEX_CALIBRATIONS)


def column(name: str) -> np.ndarray:
    """One calibration column ('tau_star', 'h_price', 'b_price', 'h_vol', 'b_vol')."""
    return np.array([getattr(c, name) for c in INDEX_CALIBRATIONS])
