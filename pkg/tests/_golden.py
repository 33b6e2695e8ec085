"""Builder for the committed synthetic 31-index golden dataset.

One price/variance pair is simulated per bundled index calibration (its
roughness as the model input, fixed price/vol correlation), and the library
columns are derived from the paths: close prices from the price path,
open-to-close returns from its log increments, and the four variance
measures as the variance path under independent multiplicative lognormal
measurement noise. Values are rounded to six significant digits before
writing so the committed file stays compact; the frozen expectations in
``golden_expected.json`` were produced from the committed file itself.

Regenerate with:  python -m tests._golden <out.csv.gz>
"""

from __future__ import annotations

import sys

import numpy as np

from roughscale.dataio import MarketLibrary, MarketSeries, save_library_csv
from roughscale.pathgen import RBergomiParams, simulate_rbergomi
from roughscale.reference import INDEX_CALIBRATIONS
from roughscale.rng import substream

GOLDEN_SEED = 20240501
GOLDEN_LAMBDA = -0.4
GOLDEN_STEPS = 3000
_MEASURE_NOISE = {"rv10": 0.20, "rv5": 0.15, "rsv": 0.25, "bv": 0.18}
_MEASURE_SCALE = {"rv10": 1.0, "rv5": 1.0, "rsv": 0.5, "bv": 0.95}
_NS_PATH = 7
_NS_NOISE = 8


def _sig6(values: np.ndarray) -> np.ndarray:
    return np.array([float(f"{v:.6g}") for v in values])


def build_golden_library(
    n_steps: int = GOLDEN_STEPS,
    seed: int = GOLDEN_SEED,
    lam: float = GOLDEN_LAMBDA,
) -> MarketLibrary:
    dates = np.busday_offset(
        np.datetime64("2000-01-03"), np.arange(n_steps), roll="forward"
    ).astype("datetime64[D]")
    library = MarketLibrary()
    for idx, cal in enumerate(INDEX_CALIBRATIONS):
        params = RBergomiParams(
            hurst=cal.h_vol,
            correlation=lam,
            n_steps=n_steps,
            seed=seed,
        )
        pair = simulate_rbergomi(params, substream(seed, _NS_PATH, idx))
        noise_rng = substream(seed, _NS_NOISE, idx)
        close = pair.price[1:]
        o2c = np.diff(np.log(pair.price))
        v = pair.variance[1:]
        measures = {}
        for name, sigma in _MEASURE_NOISE.items():
            z = noise_rng.standard_normal(n_steps)
            noisy = _MEASURE_SCALE[name] * v * np.exp(sigma * z - 0.5 * sigma * sigma)
            measures[name] = _sig6(noisy)
        library[cal.symbol] = MarketSeries(
            symbol=cal.symbol,
            dates=dates,
            close_price=_sig6(close),
            open_to_close=_sig6(o2c),
            **measures,
        )
    return library


def main(out_path: str) -> None:
    library = build_golden_library()
    save_library_csv(library, out_path)
    total = sum(len(s) for s in library.values())
    print(f"wrote {len(library)} symbols, {total} rows -> {out_path}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/golden_library.csv.gz")
