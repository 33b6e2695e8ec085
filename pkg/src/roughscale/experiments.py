"""Experiment harnesses: synthetic grids, cross-sectional replication, real data.

Three studies are orchestrated here:

* a grid over (hurst, correlation) where each cell simulates price/variance
  pairs and records the four scaling estimates, with bucketed cross-cell
  correlations between any two of them;
* a cross-sectional experiment that re-simulates a panel of indices with
  prescribed per-index roughness and aggregation horizons, correlating the
  estimates across the panel for each correlation parameter;
* the real-data pipeline: per index, breakpoint selection on absolute
  returns, scaling estimation of prices and of a volatility measure at that
  horizon, then raw/robust dependence across indices with cross-measure
  outlier intersection.

Cells derive their random substream from the base seed and their integer
coordinates, so results are identical for any worker count.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import reference
from .acsr import select_tau_max
from .dataio import MarketSeries, select_measure
from .depmeas import pearson, spearman
from .errors import DataError, ParameterError
from .ghe import estimate_scaling, estimate_scaling_from_returns, log_returns
from .pathgen import RBergomiParams, simulate_rbergomi
from .rng import substream
from .robust import RobustCorrelationResult, bivariate_outliers, intersect_outliers, robust_correlation

ESTIMATE_NAMES = ("h_vol", "b_vol", "h_price", "b_price")

# namespace tags keeping substreams of different experiment kinds disjoint
_NS_GRID = 1
_NS_PANEL = 2
_NS_OUTLIER = 3


@dataclass(frozen=True)
class RBergomiBase:
    """Model template shared by every simulated cell (all but hurst/correlation)."""

    vol_of_vol: float = 1.9
    forward_variance: float = 0.1
    dt: float = 1.0 / 252.0
    spot: float = 100.0


@dataclass(frozen=True)
class GridConfig:
    h_values: tuple
    lambda_values: tuple
    replications: int
    n_steps: int = 5000
    base: RBergomiBase = RBergomiBase()
    base_seed: int = 0
    tau_max_mode: str = "fixed"  # "fixed" or "acsr"
    tau_max_value: int = 500
    increments: str = "log"
    proxy_test: str = "line-fit"

    def __post_init__(self):
        if len(self.h_values) == 0 or len(self.lambda_values) == 0:
            raise ParameterError("h and lambda grids must be nonempty")
        if any(not 0.0 < h < 1.0 for h in self.h_values):
            raise ParameterError("every h must lie in (0, 1)")
        if any(not -1.0 <= l <= 1.0 for l in self.lambda_values):
            raise ParameterError("every lambda must lie in [-1, 1]")
        if self.replications < 1:
            raise ParameterError("replications must be >= 1")
        if self.tau_max_mode not in ("fixed", "acsr"):
            raise ParameterError(f"unknown tau_max_mode {self.tau_max_mode!r}")

    def to_dict(self) -> dict:
        return {
            "h_values": list(self.h_values),
            "lambda_values": list(self.lambda_values),
            "replications": self.replications,
            "n_steps": self.n_steps,
            "vol_of_vol": self.base.vol_of_vol,
            "forward_variance": self.base.forward_variance,
            "dt": self.base.dt,
            "spot": self.base.spot,
            "base_seed": self.base_seed,
            "tau_max_mode": self.tau_max_mode,
            "tau_max_value": self.tau_max_value,
            "increments": self.increments,
            "proxy_test": self.proxy_test,
        }


@dataclass(frozen=True)
class GridRecord:
    h_index: int
    lambda_index: int
    replication: int
    hurst: float
    lam: float
    tau_max_used: int
    h_vol: float
    b_vol: float
    h_price: float
    b_price: float
    p_vol: float
    p_price: float


@dataclass(frozen=True)
class GridFailure:
    h_index: int
    lambda_index: int
    replication: int
    message: str


@dataclass(frozen=True)
class GridResult:
    config: GridConfig
    records: tuple
    failures: tuple

    def estimates(self, name: str) -> np.ndarray:
        if name not in ESTIMATE_NAMES:
            raise ParameterError(f"unknown estimate {name!r}")
        return np.array([getattr(r, name) for r in self.records])


def _params_for(config: GridConfig, hurst: float, lam: float) -> RBergomiParams:
    return RBergomiParams(
        hurst=hurst,
        vol_of_vol=config.base.vol_of_vol,
        forward_variance=config.base.forward_variance,
        correlation=lam,
        n_steps=config.n_steps,
        dt=config.base.dt,
        spot=config.base.spot,
        seed=config.base_seed,
    )


def _estimate_pair(config: GridConfig, pair) -> tuple[int, dict]:
    """Scaling estimates of one simulated price/variance pair."""
    if config.tau_max_mode == "fixed":
        tau_max = config.tau_max_value
    else:
        fit = select_tau_max(log_returns(pair.price))
        tau_max = fit.tau_star
    price_rep = estimate_scaling(
        pair.price, tau_max, increments="log", proxy_test=config.proxy_test
    )
    vol_rep = estimate_scaling(
        pair.variance, tau_max, increments=config.increments,
        proxy_test=config.proxy_test,
    )
    return tau_max, {
        "h_vol": vol_rep.hurst,
        "b_vol": vol_rep.multiscaling_proxy,
        "h_price": price_rep.hurst,
        "b_price": price_rep.multiscaling_proxy,
        "p_vol": vol_rep.proxy_pvalue,
        "p_price": price_rep.proxy_pvalue,
    }


def _grid_cell(task) -> GridRecord | GridFailure:
    config, hi, li, rep = task
    hurst = config.h_values[hi]
    lam = config.lambda_values[li]
    try:
        rng = substream(config.base_seed, _NS_GRID, hi, li, rep)
        pair = simulate_rbergomi(_params_for(config, hurst, lam), rng)
        tau_max, est = _estimate_pair(config, pair)
        return GridRecord(
            h_index=hi, lambda_index=li, replication=rep,
            hurst=hurst, lam=lam, tau_max_used=tau_max, **est,
        )
    except Exception as exc:  # cell failures must not abort the sweep
        return GridFailure(h_index=hi, lambda_index=li, replication=rep,
                           message=f"{type(exc).__name__}: {exc}")


def _run_tasks(worker, tasks, workers: int) -> list:
    if workers <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves task order, keeping assembly deterministic
        return list(pool.map(worker, tasks, chunksize=max(1, len(tasks) // (8 * workers))))


def synthetic_grid(config: GridConfig, workers: int = 1) -> GridResult:
    """Run every (h, lambda, replication) cell of the grid.

    Failed cells are recorded with their diagnostics and do not stop the
    remaining cells. Output is identical for any ``workers`` value.
    """
    tasks = [
        (config, hi, li, rep)
        for hi in range(len(config.h_values))
        for li in range(len(config.lambda_values))
        for rep in range(config.replications)
    ]
    outcomes = _run_tasks(_grid_cell, tasks, workers)
    records = tuple(o for o in outcomes if isinstance(o, GridRecord))
    failures = tuple(o for o in outcomes if isinstance(o, GridFailure))
    return GridResult(config=config, records=records, failures=failures)


@dataclass(frozen=True)
class BucketCorrelation:
    low: float
    high: float
    n_reps_used: int
    pairs_per_rep: float
    pearson_mean: float
    pearson_se: float
    pearson_pvalue: float
    spearman_mean: float
    spearman_se: float
    spearman_pvalue: float
    insufficient: bool


def _mean_se_pvalue(values: np.ndarray) -> tuple[float, float, float]:
    """One-sample two-sided t test of the mean against zero."""
    m = float(values.mean())
    if values.size < 2:
        return m, float("nan"), float("nan")
    se = float(values.std(ddof=1) / np.sqrt(values.size))
    if se == 0.0:
        return m, 0.0, (1.0 if m == 0.0 else 0.0)
    t = m / se
    p = float(2.0 * stats.t.sf(abs(t), values.size - 1))
    return m, se, p


def bucket_correlations(
    result: GridResult,
    x_measure: str = "h_vol",
    y_measure: str = "b_price",
    bucket_width: float = 0.1,
    pool_replications: bool = False,
) -> list[BucketCorrelation]:
    """Correlation between two estimates inside each hurst bucket.

    Buckets partition (0, 1] into intervals of ``bucket_width``; a grid cell
    belongs to the bucket containing its input hurst. By default the
    correlation is computed per replication across the cells of the bucket
    and then averaged over replications, with significance from the
    one-sample t test of the per-replication coefficients; with
    ``pool_replications`` every (cell, replication) pair enters one pooled
    correlation whose own t-test p-value is reported.
    """
    if not 0.0 < bucket_width <= 1.0:
        raise ParameterError("bucket_width must lie in (0, 1]")
    for name in (x_measure, y_measure):
        if name not in ESTIMATE_NAMES:
            raise ParameterError(f"unknown estimate {name!r}")
    n_buckets = int(np.ceil(1.0 / bucket_width))
    reps = result.config.replications
    out = []
    for b in range(n_buckets):
        low = b * bucket_width
        high = min(1.0, (b + 1) * bucket_width)
        in_bucket = [r for r in result.records if low < r.hurst <= high]
        if not in_bucket:
            continue
        if pool_replications:
            x = np.array([getattr(r, x_measure) for r in in_bucket])
            y = np.array([getattr(r, y_measure) for r in in_bucket])
            if x.size < 3 or np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
                out.append(BucketCorrelation(low, high, 0, float(x.size),
                                             np.nan, np.nan, np.nan,
                                             np.nan, np.nan, np.nan, True))
                continue
            pr = pearson(x, y)
            sr = spearman(x, y)
            out.append(BucketCorrelation(
                low, high, reps, x.size / reps,
                pr.coefficient, float("nan"), pr.pvalue,
                sr.coefficient, float("nan"), sr.pvalue, False,
            ))
            continue
        p_coeffs, s_coeffs, sizes = [], [], []
        for rep in range(reps):
            sub = [r for r in in_bucket if r.replication == rep]
            x = np.array([getattr(r, x_measure) for r in sub])
            y = np.array([getattr(r, y_measure) for r in sub])
            if x.size < 3 or np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
                continue
            p_coeffs.append(pearson(x, y).coefficient)
            s_coeffs.append(spearman(x, y).coefficient)
            sizes.append(x.size)
        if len(p_coeffs) < 2:
            out.append(BucketCorrelation(low, high, len(p_coeffs), 0.0,
                                         np.nan, np.nan, np.nan,
                                         np.nan, np.nan, np.nan, True))
            continue
        pm, pse, pp = _mean_se_pvalue(np.array(p_coeffs))
        sm, sse_, sp = _mean_se_pvalue(np.array(s_coeffs))
        out.append(BucketCorrelation(
            low, high, len(p_coeffs), float(np.mean(sizes)),
            pm, pse, pp, sm, sse_, sp, False,
        ))
    return out


@dataclass(frozen=True)
class PanelRecord:
    lambda_index: int
    replication: int
    index: int
    symbol: str
    hurst_in: float
    tau_max: int
    h_vol: float
    b_vol: float
    h_price: float
    b_price: float


@dataclass(frozen=True)
class EmpiricalHResult:
    lambda_values: tuple
    pair: tuple
    replications: int
    pearson_mean: np.ndarray
    pearson_se: np.ndarray
    spearman_mean: np.ndarray
    spearman_se: np.ndarray
    pearson_by_rep: np.ndarray  # (n_lambda, reps)
    spearman_by_rep: np.ndarray
    records: tuple


def _panel_cell(task) -> PanelRecord:
    (base, n_steps, base_seed, proxy_test, h_list, tau_list, symbols,
     lambda_values, li, rep, idx) = task
    params = RBergomiParams(
        hurst=h_list[idx],
        vol_of_vol=base.vol_of_vol,
        forward_variance=base.forward_variance,
        correlation=lambda_values[li],
        n_steps=n_steps,
        dt=base.dt,
        spot=base.spot,
        seed=base_seed,
    )
    rng = substream(base_seed, _NS_PANEL, li, rep, idx)
    pair = simulate_rbergomi(params, rng)
    tau_max = tau_list[idx]
    price_rep = estimate_scaling(pair.price, tau_max, proxy_test=proxy_test)
    vol_rep = estimate_scaling(pair.variance, tau_max, proxy_test=proxy_test)
    return PanelRecord(
        lambda_index=li, replication=rep, index=idx, symbol=symbols[idx],
        hurst_in=h_list[idx], tau_max=tau_max,
        h_vol=vol_rep.hurst, b_vol=vol_rep.multiscaling_proxy,
        h_price=price_rep.hurst, b_price=price_rep.multiscaling_proxy,
    )


def empirical_h_experiment(
    h_list,
    tau_max_list,
    lambda_values,
    replications: int,
    base: RBergomiBase = RBergomiBase(),
    n_steps: int = 5000,
    base_seed: int = 0,
    pair: tuple = ("h_vol", "b_price"),
    proxy_test: str = "line-fit",
    symbols=None,
    workers: int = 1,
) -> EmpiricalHResult:
    """Cross-sectional correlation curves against the price/vol correlation.

    For every lambda and replication, one path pair is simulated per panel
    entry with that entry's hurst, estimated at that entry's aggregation
    horizon, and the chosen pair of estimates is correlated across the panel.
    Means and standard errors aggregate over replications.
    """
    h_list = tuple(float(h) for h in h_list)
    tau_list = tuple(int(t) for t in tau_max_list)
    if len(h_list) != len(tau_list):
        raise ParameterError(
            f"h_list ({len(h_list)}) and tau_max_list ({len(tau_list)}) "
            "must have equal length"
        )
    for name in pair:
        if name not in ESTIMATE_NAMES:
            raise ParameterError(f"unknown estimate {name!r}")
    lambda_values = tuple(float(l) for l in lambda_values)
    if symbols is None:
        symbols = tuple(str(i) for i in range(len(h_list)))
    else:
        symbols = tuple(symbols)
        if len(symbols) != len(h_list):
            raise ParameterError("symbols must align with h_list")

    tasks = [
        (base, n_steps, base_seed, proxy_test, h_list, tau_list, symbols,
         lambda_values, li, rep, idx)
        for li in range(len(lambda_values))
        for rep in range(replications)
        for idx in range(len(h_list))
    ]
    records = tuple(_run_tasks(_panel_cell, tasks, workers))

    n_lam = len(lambda_values)
    pearson_by_rep = np.full((n_lam, replications), np.nan)
    spearman_by_rep = np.full((n_lam, replications), np.nan)
    by_cell = {}
    for r in records:
        by_cell.setdefault((r.lambda_index, r.replication), []).append(r)
    for (li, rep), cell in by_cell.items():
        cell.sort(key=lambda r: r.index)
        x = np.array([getattr(r, pair[0]) for r in cell])
        y = np.array([getattr(r, pair[1]) for r in cell])
        pearson_by_rep[li, rep] = pearson(x, y).coefficient
        spearman_by_rep[li, rep] = spearman(x, y).coefficient

    if replications > 1:
        pearson_se = pearson_by_rep.std(axis=1, ddof=1) / np.sqrt(replications)
        spearman_se = spearman_by_rep.std(axis=1, ddof=1) / np.sqrt(replications)
    else:  # standard error undefined from a single replication
        pearson_se = np.full(n_lam, np.nan)
        spearman_se = np.full(n_lam, np.nan)
    return EmpiricalHResult(
        lambda_values=lambda_values,
        pair=tuple(pair),
        replications=replications,
        pearson_mean=pearson_by_rep.mean(axis=1),
        pearson_se=pearson_se,
        spearman_mean=spearman_by_rep.mean(axis=1),
        spearman_se=spearman_se,
        pearson_by_rep=pearson_by_rep,
        spearman_by_rep=spearman_by_rep,
        records=records,
    )


@dataclass(frozen=True)
class TableRow:
    symbol: str
    tau_star: int
    h_price: float
    b_price: float
    h_vol: float
    b_vol: float
    p_price: float
    p_vol: float


@dataclass(frozen=True)
class RealDataResult:
    measure: str
    return_kind: str
    pair: tuple
    rows: tuple
    dependence: RobustCorrelationResult
    outlier_sets: dict
    intersection: tuple
    failures: dict

    def table_column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])


def _index_returns(series: MarketSeries, return_kind: str) -> np.ndarray:
    if return_kind == "open_to_close":
        return np.asarray(select_measure(series, "open_to_close"), dtype=float)
    if return_kind == "close_to_close":
        return log_returns(select_measure(series, "close_price"), 1)
    raise ParameterError(f"unknown return_kind {return_kind!r}")


def _real_data_row(task):
    (symbol, series, measure, return_kind, increments, proxy_test,
     acsr_mode, extra_measures) = task
    try:
        returns = _index_returns(series, return_kind)
        fit = select_tau_max(returns, mode=acsr_mode)
        tau_star = fit.tau_star
        price_rep = estimate_scaling_from_returns(returns, tau_star, proxy_test=proxy_test)
        vol_rep = estimate_scaling(
            select_measure(series, measure), tau_star,
            increments=increments, proxy_test=proxy_test,
        )
        row = TableRow(
            symbol=symbol, tau_star=tau_star,
            h_price=price_rep.hurst, b_price=price_rep.multiscaling_proxy,
            h_vol=vol_rep.hurst, b_vol=vol_rep.multiscaling_proxy,
            p_price=price_rep.proxy_pvalue, p_vol=vol_rep.proxy_pvalue,
        )
        extra = {}
        for m in extra_measures:
            rep = estimate_scaling(
                select_measure(series, m), tau_star,
                increments=increments, proxy_test=proxy_test,
            )
            extra[m] = (rep.hurst, rep.multiscaling_proxy)
        return symbol, row, extra, None
    except Exception as exc:
        return symbol, None, None, f"{type(exc).__name__}: {exc}"


def real_data_pipeline(
    dataset: dict,
    measure: str = "rv10",
    return_kind: str = "open_to_close",
    pair: tuple = ("h_vol", "b_price"),
    increments: str = "log",
    proxy_test: str = "subsample",
    metric: str = "mahalanobis",
    outlier_seed: int = 0,
    intersection_measures: tuple = ("rv10", "rv5", "rsv", "bv"),
    acsr_mode: str = "free",
    workers: int = 1,
) -> RealDataResult:
    """Per-index scaling table plus cross-sectional dependence analysis.

    Per index: the breakpoint on absolute returns fixes the aggregation
    horizon, then both the return series and the chosen volatility measure
    are estimated at that horizon. Across indices: raw and outlier-robust
    correlation between the chosen pair of estimates, and per-measure outlier
    sets intersected over every available measure in
    ``intersection_measures``.

    Indices whose estimation fails are excluded from the cross-sectional
    stage and reported in ``failures``.
    """
    if not dataset:
        raise DataError("dataset is empty")
    for name in pair:
        if name not in ESTIMATE_NAMES:
            raise ParameterError(f"unknown estimate {name!r}")
    symbols = sorted(dataset)
    extra_measures = tuple(
        m for m in intersection_measures
        if m != measure and all(
            getattr(dataset[s], m, None) is not None for s in symbols
        )
    )
    tasks = [
        (s, dataset[s], measure, return_kind, increments, proxy_test,
         acsr_mode, extra_measures)
        for s in symbols
    ]
    outcomes = _run_tasks(_real_data_row, tasks, workers)

    rows, extras, failures = [], {}, {}
    for symbol, row, extra, error in outcomes:
        if error is not None:
            failures[symbol] = error
        else:
            rows.append(row)
            extras[symbol] = extra
    if len(rows) < 5:
        raise DataError(
            f"only {len(rows)} indices usable after failures {sorted(failures)}"
        )
    rows = tuple(rows)
    ok_symbols = [r.symbol for r in rows]

    def points_for(m: str) -> np.ndarray:
        cols = {}
        for axis in pair:
            if axis in ("h_price", "b_price") or m == measure:
                cols[axis] = np.array([getattr(r, axis) for r in rows])
            else:
                key = "h_vol" if axis == "h_vol" else "b_vol"
                pos = 0 if key == "h_vol" else 1
                cols[axis] = np.array([extras[s][m][pos] for s in ok_symbols])
        return np.column_stack([cols[pair[0]], cols[pair[1]]])

    dependence = robust_correlation(
        points_for(measure),
        rng=substream(outlier_seed, _NS_OUTLIER, 0),
        metric=metric,
    )
    outlier_sets = {
        measure: tuple(ok_symbols[i] for i in dependence.report.outlier_indices)
    }
    for k, m in enumerate(extra_measures, start=1):
        report = bivariate_outliers(
            points_for(m),
            rng=substream(outlier_seed, _NS_OUTLIER, k),
            metric=metric,
        )
        outlier_sets[m] = tuple(ok_symbols[i] for i in report.outlier_indices)
    intersection = tuple(sorted(intersect_outliers(outlier_sets.values())))

    return RealDataResult(
        measure=measure,
        return_kind=return_kind,
        pair=tuple(pair),
        rows=rows,
        dependence=dependence,
        outlier_sets=outlier_sets,
        intersection=intersection,
        failures=failures,
    )


# ---------------------------------------------------------------------------
# tabular output (CSV with 6 significant digits, JSON at full precision)

def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{x:.6g}"


def grid_records_json(result: GridResult, path) -> None:
    payload = {
        "config": result.config.to_dict(),
        "records": [
            {
                "h_index": r.h_index, "lambda_index": r.lambda_index,
                "replication": r.replication, "hurst": r.hurst, "lam": r.lam,
                "tau_max_used": r.tau_max_used,
                "h_vol": r.h_vol, "b_vol": r.b_vol,
                "h_price": r.h_price, "b_price": r.b_price,
                "p_vol": r.p_vol, "p_price": r.p_price,
            }
            for r in result.records
        ],
        "failures": [
            {"h_index": f.h_index, "lambda_index": f.lambda_index,
             "replication": f.replication, "message": f.message}
            for f in result.failures
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def grid_records_csv(result: GridResult, path) -> None:
    cols = ("h_index", "lambda_index", "replication", "hurst", "lam",
            "tau_max_used", "h_vol", "b_vol", "h_price", "b_price",
            "p_vol", "p_price")
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for r in result.records:
            fh.write(",".join(_fmt(getattr(r, c)) for c in cols) + "\n")


def grid_mean_matrix(result: GridResult, name: str = "b_price") -> np.ndarray:
    """Mean estimate over replications per (h, lambda) cell, h rows."""
    cfg = result.config
    sums = np.zeros((len(cfg.h_values), len(cfg.lambda_values)))
    counts = np.zeros_like(sums)
    for r in result.records:
        sums[r.h_index, r.lambda_index] += getattr(r, name)
        counts[r.h_index, r.lambda_index] += 1
    with np.errstate(invalid="ignore"):
        return sums / counts


def matrix_csv(matrix: np.ndarray, row_labels, col_labels, path,
               corner: str = "h\\lambda") -> None:
    with open(path, "w") as fh:
        fh.write(corner + "," + ",".join(_fmt(c) for c in col_labels) + "\n")
        for lab, row in zip(row_labels, matrix):
            fh.write(_fmt(lab) + "," + ",".join(_fmt(v) for v in row) + "\n")


def buckets_csv(buckets: list[BucketCorrelation], path) -> None:
    cols = ("low", "high", "n_reps_used", "pairs_per_rep",
            "pearson_mean", "pearson_se", "pearson_pvalue",
            "spearman_mean", "spearman_se", "spearman_pvalue", "insufficient")
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for b in buckets:
            fh.write(",".join(_fmt(getattr(b, c)) if not isinstance(getattr(b, c), bool)
                              else str(getattr(b, c)).lower() for c in cols) + "\n")


def empirical_csv(result: EmpiricalHResult, path) -> None:
    with open(path, "w") as fh:
        fh.write("lambda,pearson_mean,pearson_se,spearman_mean,spearman_se\n")
        for i, lam in enumerate(result.lambda_values):
            fh.write(",".join(_fmt(v) for v in (
                lam, result.pearson_mean[i], result.pearson_se[i],
                result.spearman_mean[i], result.spearman_se[i])) + "\n")


def table_csv(result: RealDataResult, path) -> None:
    with open(path, "w") as fh:
        fh.write("symbol,tau_star,h_price,b_price,h_vol,b_vol\n")
        for r in result.rows:
            fh.write(",".join([r.symbol, str(r.tau_star),
                               _fmt(r.h_price), _fmt(r.b_price),
                               _fmt(r.h_vol), _fmt(r.b_vol)]) + "\n")


def dependence_json(result: RealDataResult, path) -> None:
    payload = {
        "measure": result.measure,
        "return_kind": result.return_kind,
        "pair": list(result.pair),
        "dependence": result.dependence.to_dict(),
        "outlier_sets": {m: list(v) for m, v in result.outlier_sets.items()},
        "intersection": list(result.intersection),
        "failures": dict(result.failures),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
