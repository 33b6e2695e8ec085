"""Standalone SVG emission for grid heatmaps, correlation curves, scatters."""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "roughscale"

import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def save_heatmap_svg(
    matrix: np.ndarray, x_values, y_values, path,
    xlabel: str = "lambda", ylabel: str = "H", title: str = "",
) -> None:
    """Nearest-cell heatmap of a (len(y), len(x)) matrix."""
    fig, ax = plt.subplots(figsize=(7, 5))
    mesh = ax.pcolormesh(
        np.arange(len(x_values) + 1), np.arange(len(y_values) + 1), matrix,
        shading="flat", cmap="viridis",
    )
    ax.set_xticks(np.arange(len(x_values)) + 0.5)
    ax.set_xticklabels([f"{v:g}" for v in x_values], rotation=45, fontsize=8)
    ax.set_yticks(np.arange(len(y_values)) + 0.5)
    ax.set_yticklabels([f"{v:g}" for v in y_values], fontsize=8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    fig.colorbar(mesh, ax=ax)
    fig.tight_layout()
    _save(fig, path)


def save_curves_svg(
    x, curves: dict, path,
    xlabel: str = "lambda", ylabel: str = "correlation", title: str = "",
) -> None:
    """Curves with optional error bars; ``curves[label] = (y, yerr-or-None)``."""
    fig, ax = plt.subplots(figsize=(7, 5))
    for label, (y, yerr) in curves.items():
        if yerr is None:
            ax.plot(x, y, marker="o", label=label)
        else:
            ax.errorbar(x, y, yerr=yerr, marker="o", capsize=3, label=label)
    ax.axhline(0.0, color="gray", lw=0.8, ls=":")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def save_scatter_svg(
    x, y, path,
    labels=None, outliers=(), xlabel: str = "", ylabel: str = "",
    title: str = "", regression: bool = True,
) -> None:
    """Scatter of estimate pairs with a least-squares line; outliers marked."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    outliers = set(outliers)
    keep = [i for i in range(x.size) if i not in outliers]
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.scatter(x[keep], y[keep], color="tab:blue", zorder=3)
    if outliers:
        out = sorted(outliers)
        ax.scatter(x[out], y[out], color="tab:red", marker="x", s=70,
                   label="outlier", zorder=4)
    if labels is not None:
        for i, lab in enumerate(labels):
            ax.annotate(str(lab), (x[i], y[i]), fontsize=7,
                        textcoords="offset points", xytext=(4, 2))
    if regression and x.size >= 2 and np.ptp(x) > 0.0:
        slope, intercept = np.polyfit(x, y, 1)
        gridx = np.linspace(x.min(), x.max(), 50)
        ax.plot(gridx, intercept + slope * gridx, color="black", lw=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if outliers:
        ax.legend()
    fig.tight_layout()
    _save(fig, path)
