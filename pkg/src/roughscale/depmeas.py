"""Pearson and Spearman correlation with t-based significance."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DataError, NumericalError, ParameterError


@dataclass(frozen=True)
class CorrelationResult:
    coefficient: float
    pvalue: float
    n: int
    kind: str

    def to_json(self, **kwargs) -> str:
        return json.dumps(
            {"coefficient": self.coefficient, "pvalue": self.pvalue,
             "n": self.n, "kind": self.kind},
            **kwargs,
        )


def _validate(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ParameterError("inputs must be 1-d arrays of equal length")
    if x.size < 3:
        raise DataError(f"need at least 3 pairs, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DataError("inputs must be finite")
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        raise NumericalError("constant input has zero variance")
    return x, y


def _t_pvalue(r: float, n: int) -> float:
    # two-sided test of r via t = r * sqrt((n-2)/(1-r^2)), df = n-2
    if 1.0 - r * r <= 0.0:
        return 0.0
    t = r * np.sqrt((n - 2) / (1.0 - r * r))
    return float(2.0 * stats.t.sf(abs(t), n - 2))


def pearson(x: np.ndarray, y: np.ndarray) -> CorrelationResult:
    """Sample Pearson correlation coefficient with a two-sided t test."""
    x, y = _validate(x, y)
    xc = x - x.mean()
    yc = y - y.mean()
    r = float(np.dot(xc, yc) / np.sqrt(np.dot(xc, xc) * np.dot(yc, yc)))
    r = min(1.0, max(-1.0, r))
    return CorrelationResult(coefficient=r, pvalue=_t_pvalue(r, x.size), n=x.size, kind="pearson")


def rank_average(x: np.ndarray) -> np.ndarray:
    """Ranks starting at 1 with ties assigned their average rank."""
    return stats.rankdata(np.asarray(x, dtype=float), method="average")


def spearman(x: np.ndarray, y: np.ndarray) -> CorrelationResult:
    """Spearman correlation: Pearson applied to average-tie ranks."""
    x, y = _validate(x, y)
    inner = pearson(rank_average(x), rank_average(y))
    return CorrelationResult(
        coefficient=inner.coefficient, pvalue=inner.pvalue, n=inner.n, kind="spearman"
    )
