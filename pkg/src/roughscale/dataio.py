"""Ingestion of daily realized-volatility library CSV files.

The expected layout is one row per (symbol, date) with a header naming a
symbol column, a date column, and any subset of the measure columns

    close_price, open_to_close, open_price, rv10, rv5, rsv, bv.

Missing numeric cells are repaired at load time: interior gaps by linear
interpolation on the date axis, leading/trailing gaps by the nearest valid
value. Every repair is recorded so ingestion is auditable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import DataError, SchemaError

MEASURES = ("close_price", "open_to_close", "rv10", "rv5", "rsv", "bv")
_OPTIONAL_COLUMNS = MEASURES + ("open_price",)
_SYMBOL_NAMES = ("symbol", "Symbol", "SYMBOL")
_DATE_NAMES = ("date", "Date", "DATE", "Unnamed: 0", "")


@dataclass(frozen=True)
class RepairRecord:
    """One repaired cell: where it was and what value was filled in."""

    symbol: str
    date: str
    column: str
    value: float
    method: str  # "interpolated" or "edge"


@dataclass(frozen=True)
class MarketSeries:
    """All measure series of one index on a common, strictly increasing date grid."""

    symbol: str
    dates: np.ndarray  # datetime64[D]
    close_price: np.ndarray | None = None
    open_to_close: np.ndarray | None = None
    rv10: np.ndarray | None = None
    rv5: np.ndarray | None = None
    rsv: np.ndarray | None = None
    bv: np.ndarray | None = None
    open_price: np.ndarray | None = None

    def available_measures(self) -> tuple[str, ...]:
        return tuple(m for m in MEASURES if getattr(self, m) is not None)

    def __len__(self) -> int:
        return int(self.dates.size)


class MarketLibrary(dict):
    """symbol -> MarketSeries mapping that remembers its ingestion repairs."""

    def __init__(self, *args, repairs=None, **kwargs):
        super().__init__(*args, **kwargs)
        self.repairs: list[RepairRecord] = list(repairs or [])

    def repairs_to_json(self, **kwargs) -> str:
        return json.dumps(
            [
                {"symbol": r.symbol, "date": r.date, "column": r.column,
                 "value": r.value, "method": r.method}
                for r in self.repairs
            ],
            **kwargs,
        )


def normalize_symbol(raw: str) -> str:
    """Strip leading punctuation from index symbols ('.AEX' -> 'AEX')."""
    return str(raw).lstrip(".^#@ ").strip()


def _find_column(columns, candidates, what: str) -> str:
    for name in candidates:
        if name in columns:
            return name
    raise SchemaError(f"no {what} column found among {list(columns)}")


def _parse_dates(raw: pd.Series) -> np.ndarray:
    values = raw.astype(str).str.strip()
    try:
        parsed = pd.to_datetime(values, format="ISO8601", utc=True)
    except (ValueError, TypeError):
        try:
            parsed = pd.to_datetime(values, format="%d/%m/%Y")
        except (ValueError, TypeError) as exc:
            bad = None
            for i, v in enumerate(values):
                try:
                    pd.to_datetime(v, format="ISO8601")
                except (ValueError, TypeError):
                    bad = i
                    break
            row = bad + 2 if bad is not None else "?"
            raise DataError(f"unparseable date at data row {row}: {exc}") from exc
    return parsed.dt.tz_localize(None).values.astype("datetime64[D]")


def _repair_column(
    dates: np.ndarray, values: np.ndarray, symbol: str, column: str,
    repairs: list[RepairRecord],
) -> np.ndarray:
    out = values.astype(float).copy()
    missing = ~np.isfinite(out)
    if not missing.any():
        return out
    valid = np.where(~missing)[0]
    if valid.size == 0:
        raise DataError(f"column {column} of {symbol} has no valid values")
    day = dates.astype("datetime64[D]").astype(np.int64).astype(float)
    idx = np.where(missing)[0]
    interior = (idx > valid[0]) & (idx < valid[-1])
    filled = np.interp(day[idx], day[valid], out[valid])
    # np.interp clamps beyond the valid range, which is exactly the
    # nearest-value extension wanted at the edges
    out[idx] = filled
    for i, pos in enumerate(idx):
        repairs.append(
            RepairRecord(
                symbol=symbol,
                date=str(dates[pos]),
                column=column,
                value=float(filled[i]),
                method="interpolated" if interior[i] else "edge",
            )
        )
    return out


def load_library_csv(path) -> MarketLibrary:
    """Load a realized-volatility library CSV into per-symbol series.

    Returns a :class:`MarketLibrary` (a dict keyed by normalized symbol)
    whose ``repairs`` attribute lists every cell filled during ingestion.

    Raises
    ------
    SchemaError
        If the symbol column or every measure column is missing.
    DataError
        On unreadable files, unparseable dates, or duplicate dates.
    """
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except FileNotFoundError:
        raise
    except (OSError, pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if frame.empty:
        raise DataError(f"{path} contains no rows")

    symbol_col = _find_column(frame.columns, _SYMBOL_NAMES, "symbol")
    date_col = _find_column(frame.columns, _DATE_NAMES, "date")
    present = [c for c in _OPTIONAL_COLUMNS if c in frame.columns]
    if not any(c in MEASURES for c in present):
        raise SchemaError(
            f"no measure column among {MEASURES} present in {path}"
        )

    repairs: list[RepairRecord] = []
    library = MarketLibrary(repairs=repairs)
    for raw_symbol, group in frame.groupby(symbol_col, sort=True):
        symbol = normalize_symbol(raw_symbol)
        dates = _parse_dates(group[date_col])
        order = np.argsort(dates, kind="stable")
        dates = dates[order]
        if np.any(np.diff(dates.astype(np.int64)) == 0):
            dup = dates[np.where(np.diff(dates.astype(np.int64)) == 0)[0][0]]
            raise DataError(f"duplicate date {dup} for symbol {symbol}")
        columns = {}
        for col in present:
            vals = pd.to_numeric(group[col], errors="coerce").to_numpy()[order]
            columns[col] = _repair_column(dates, vals, symbol, col, repairs)
        library[symbol] = MarketSeries(symbol=symbol, dates=dates, **columns)
    library.repairs = repairs
    return library


def select_measure(series: MarketSeries, measure: str) -> np.ndarray:
    """Return one measure column, deriving open-to-close returns if needed."""
    if measure not in MEASURES:
        raise SchemaError(f"unknown measure {measure!r}; expected one of {MEASURES}")
    values = getattr(series, measure)
    if values is not None:
        return values
    if measure == "open_to_close":
        if series.open_price is not None and series.close_price is not None:
            if np.any(series.open_price <= 0.0) or np.any(series.close_price <= 0.0):
                raise DataError(
                    f"nonpositive open/close prices for {series.symbol}"
                )
            return np.log(series.close_price / series.open_price)
        raise SchemaError(
            f"{series.symbol} lacks open_to_close and the open/close prices "
            "needed to derive it"
        )
    raise SchemaError(f"{series.symbol} lacks measure {measure!r}")


def save_library_csv(library: dict, path) -> None:
    """Write per-symbol series back to the library CSV layout.

    Values are formatted with full round-trip precision so a load of the
    written file reproduces every number bit-exactly.
    """
    rows = []
    for symbol in sorted(library):
        series = library[symbol]
        cols = [c for c in _OPTIONAL_COLUMNS if getattr(series, c) is not None]
        for i in range(len(series)):
            row = {"Symbol": symbol, "date": str(series.dates[i])}
            for c in cols:
                row[c] = repr(float(getattr(series, c)[i]))
            rows.append(row)
    frame = pd.DataFrame(rows)
    frame.to_csv(path, index=False)
