"""Outlier-robust correlation via MCD location, distance fences, filtering.

The detection pipeline: estimate a robust center (and scatter) of the
bivariate cloud with FAST-MCD, measure each point's distance to that center,
place resistant boxplot fences (median +/- k * IQR with Carling's
sample-size-dependent k and ideal-fourths quartiles) on the distances, and
flag points beyond the upper fence. Correlations recomputed on the kept
points give the robust coefficients. Outlier sets obtained under different
volatility measures can be intersected to retain only the universally
extreme points.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .depmeas import CorrelationResult, pearson, spearman
from .errors import DataError, NumericalError, ParameterError
from .rng import substream

DEFAULT_N_STARTS = 500
MAX_C_STEPS = 100


def default_h(n: int, p: int = 2) -> int:
    """Default subset size for the MCD: ceil((n + p + 1) / 2)."""
    return int(np.ceil((n + p + 1) / 2))


@dataclass(frozen=True)
class McdEstimate:
    center: np.ndarray
    scatter: np.ndarray
    support: np.ndarray  # sorted indices of the optimal h-subset


def _c_steps(
    points: np.ndarray, center: np.ndarray, scatter: np.ndarray, h: int
) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Iterate concentration steps until the determinant stops decreasing."""
    best_det = np.inf
    support = None
    for _ in range(MAX_C_STEPS):
        try:
            inv = np.linalg.inv(scatter)
        except np.linalg.LinAlgError:
            break
        diff = points - center
        d2 = np.einsum("ij,jk,ik->i", diff, inv, diff)
        order = np.argsort(d2, kind="stable")[:h]
        center = points[order].mean(axis=0)
        scatter = np.cov(points[order].T, ddof=1)
        det = float(np.linalg.det(scatter))
        if det <= 0.0 or not np.isfinite(det):
            return det, center, scatter, np.sort(order)
        if det >= best_det - 1e-15 * max(best_det, 1.0):
            return best_det, center, scatter, support
        best_det = det
        support = np.sort(order)
    return best_det, center, scatter, support


def fast_mcd(
    points: np.ndarray,
    h: int | None = None,
    n_starts: int = DEFAULT_N_STARTS,
    rng: np.random.Generator | None = None,
) -> McdEstimate:
    """Minimum covariance determinant location and scatter (FAST-MCD).

    Draws ``n_starts`` random (p+1)-point elemental subsets, concentrates
    each to a local optimum, and keeps the h-subset with the smallest scatter
    determinant (ties resolve to the earliest start, so the result is
    deterministic given the random stream).

    Parameters
    ----------
    points : ndarray, shape (n, 2)
        Bivariate observations, n >= 5.
    h : int, optional
        Subset size; defaults to ceil((n + 3) / 2) and must satisfy
        ceil((n + 3) / 2) <= h <= n.
    n_starts : int
        Number of random starts.
    rng : numpy.random.Generator, optional
        Defaults to a fixed-seed stream so repeated calls agree.
    """
    x = np.asarray(points, dtype=float)
    if x.ndim != 2 or x.shape[1] != 2:
        raise ParameterError("points must be an (n, 2) array")
    n, p = x.shape
    if n < 5:
        raise DataError(f"need at least 5 points, got {n}")
    h_min = default_h(n, p)
    if h is None:
        h = h_min
    if not h_min <= h <= n:
        raise ParameterError(f"h must lie in [{h_min}, {n}], got {h}")
    if rng is None:
        rng = substream(0)

    best: tuple[float, McdEstimate] | None = None
    for _ in range(n_starts):
        subset = rng.choice(n, size=p + 1, replace=False)
        center = x[subset].mean(axis=0)
        scatter = np.cov(x[subset].T, ddof=1)
        # grow degenerate elemental subsets until the scatter has full rank
        while np.linalg.det(scatter) <= 0.0 and subset.size < n:
            pool = np.setdiff1d(np.arange(n), subset)
            subset = np.concatenate([subset, rng.choice(pool, size=1)])
            center = x[subset].mean(axis=0)
            scatter = np.cov(x[subset].T, ddof=1)
        if np.linalg.det(scatter) <= 0.0:
            continue
        det, center, scatter, support = _c_steps(x, center, scatter, h)
        if support is None or det <= 0.0 or not np.isfinite(det):
            continue
        if best is None or det < best[0]:
            best = (det, McdEstimate(center=center, scatter=scatter, support=support))
    if best is None:
        raise NumericalError(
            "all MCD starts produced a singular scatter; data may be collinear"
        )
    return best[1]


def carling_k(n: int) -> float:
    """Sample-size-dependent fence multiplier of the resistant boxplot rule."""
    return (17.63 * n - 23.64) / (7.74 * n - 3.71)


def ideal_fourths(values: np.ndarray) -> tuple[float, float]:
    """Lower and upper quartiles by the ideal-fourths (interpolated) estimator."""
    x = np.sort(np.asarray(values, dtype=float))
    n = x.size
    j = int(np.floor(n / 4 + 5 / 12))
    g = n / 4 + 5 / 12 - j
    q1 = (1.0 - g) * x[j - 1] + g * x[j]
    q3 = (1.0 - g) * x[n - j] + g * x[n - j - 1]
    return float(q1), float(q3)


def carling_fences(values: np.ndarray) -> tuple[float, float]:
    """Resistant outlier fences: median +/- k(n) * IQR with ideal fourths."""
    x = np.asarray(values, dtype=float)
    if x.size < 5:
        raise DataError(f"need at least 5 values, got {x.size}")
    q1, q3 = ideal_fourths(x)
    iqr = q3 - q1
    med = float(np.median(x))
    k = carling_k(x.size)
    return med - k * iqr, med + k * iqr


@dataclass(frozen=True)
class OutlierReport:
    center: np.ndarray
    distances: np.ndarray
    outlier_indices: tuple[int, ...]
    kept_indices: tuple[int, ...]
    fences: tuple[float, float]
    mcd_support: tuple[int, ...]
    metric: str

    def to_dict(self) -> dict:
        return {
            "center": [float(v) for v in self.center],
            "distances": [float(v) for v in self.distances],
            "outlier_indices": list(self.outlier_indices),
            "kept_indices": list(self.kept_indices),
            "fences": {"low": self.fences[0], "high": self.fences[1]},
            "mcd_support": list(self.mcd_support),
            "metric": self.metric,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def bivariate_outliers(
    points: np.ndarray,
    rng: np.random.Generator | None = None,
    metric: str = "mahalanobis",
    h: int | None = None,
    n_starts: int = DEFAULT_N_STARTS,
) -> OutlierReport:
    """Flag bivariate outliers by distance-to-robust-center fences.

    ``metric`` chooses how distance to the MCD center is measured:

    - "mahalanobis" (default): in the geometry of the MCD scatter, so points
      breaking the correlation structure of the bulk are flagged even when
      their coordinates are unremarkable marginally;
    - "euclidean": plain coordinate distance.

    Both fences are computed on the distances, but distances are nonnegative
    with the lower fence in practice below zero, so flags come from the
    upper fence.
    """
    if metric not in ("mahalanobis", "euclidean"):
        raise ParameterError(f"unknown metric {metric!r}")
    x = np.asarray(points, dtype=float)
    est = fast_mcd(x, h=h, n_starts=n_starts, rng=rng)
    diff = x - est.center
    if metric == "euclidean":
        dist = np.sqrt(np.sum(diff * diff, axis=1))
    else:
        inv = np.linalg.inv(est.scatter)
        dist = np.sqrt(np.einsum("ij,jk,ik->i", diff, inv, diff))
    low, high = carling_fences(dist)
    flagged = np.where(dist > high)[0]
    kept = np.setdiff1d(np.arange(x.shape[0]), flagged)
    return OutlierReport(
        center=est.center,
        distances=dist,
        outlier_indices=tuple(int(i) for i in flagged),
        kept_indices=tuple(int(i) for i in kept),
        fences=(low, high),
        mcd_support=tuple(int(i) for i in est.support),
        metric=metric,
    )


@dataclass(frozen=True)
class RobustCorrelationResult:
    raw_pearson: CorrelationResult
    raw_spearman: CorrelationResult
    robust_pearson: CorrelationResult
    robust_spearman: CorrelationResult
    report: OutlierReport

    def to_dict(self) -> dict:
        return {
            "raw": {
                "pearson": json.loads(self.raw_pearson.to_json()),
                "spearman": json.loads(self.raw_spearman.to_json()),
            },
            "robust": {
                "pearson": json.loads(self.robust_pearson.to_json()),
                "spearman": json.loads(self.robust_spearman.to_json()),
            },
            "outliers": self.report.to_dict(),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def robust_correlation(
    points: np.ndarray,
    rng: np.random.Generator | None = None,
    metric: str = "mahalanobis",
    h: int | None = None,
    n_starts: int = DEFAULT_N_STARTS,
) -> RobustCorrelationResult:
    """Raw and outlier-filtered Pearson/Spearman coefficients of a point cloud."""
    x = np.asarray(points, dtype=float)
    if x.ndim != 2 or x.shape[1] != 2:
        raise ParameterError("points must be an (n, 2) array")
    report = bivariate_outliers(x, rng=rng, metric=metric, h=h, n_starts=n_starts)
    kept = np.asarray(report.kept_indices, dtype=int)
    if kept.size < 3:
        raise DataError(
            f"only {kept.size} points remain after filtering; need at least 3"
        )
    return RobustCorrelationResult(
        raw_pearson=pearson(x[:, 0], x[:, 1]),
        raw_spearman=spearman(x[:, 0], x[:, 1]),
        robust_pearson=pearson(x[kept, 0], x[kept, 1]),
        robust_spearman=spearman(x[kept, 0], x[kept, 1]),
        report=report,
    )


def intersect_outliers(sets) -> set:
    """Intersection of per-measure outlier index sets."""
    sets = list(sets)
    if not sets:
        raise ParameterError("need at least one outlier set")
    result = set(sets[0])
    for s in sets[1:]:
        result &= set(s)
    return result
