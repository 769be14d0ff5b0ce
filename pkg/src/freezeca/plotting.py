"""Figures for scan results and configurations, written straight to files."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .percolation import ScanResult  # noqa: E402


def set_style():
    plt.rcParams["figure.dpi"] = 300
    plt.rcParams["savefig.dpi"] = 300
    plt.rcParams["savefig.bbox"] = "tight"
    plt.rcParams["font.size"] = 8
    plt.rcParams["font.family"] = "serif"
    plt.rcParams["pdf.fonttype"] = 42


def focus_on_data(ax):
    ax.grid(axis="y", color="grey", linestyle="-", linewidth=1, alpha=0.3)
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)


def plot_scan(result: ScanResult, path, title: str | None = None) -> None:
    """Estimate against density with the Wilson band."""
    set_style()
    ps = np.array([r.p for r in result.rows])
    est = result.estimates()
    lo = np.array([r.ci_low for r in result.rows])
    hi = np.array([r.ci_high for r in result.rows])
    fig, ax = plt.subplots(figsize=(3.4, 2.2))
    ax.fill_between(ps, lo, hi, color="C0", alpha=0.25, linewidth=0)
    ax.plot(ps, est, ".-", color="C0")
    ax.set_xlabel("density $p$")
    ax.set_ylabel("fixed fraction")
    ax.set_ylim(-0.02, 1.02)
    if title:
        ax.set_title(title, fontsize=8)
    focus_on_data(ax)
    fig.savefig(path)
    plt.close(fig)


def plot_grid(cells: np.ndarray, path, title: str | None = None) -> None:
    """Binary or multi-state grid with y increasing upwards."""
    set_style()
    fig, ax = plt.subplots(figsize=(3, 3))
    ax.imshow(cells, origin="lower", cmap="Greys", interpolation="nearest")
    ax.set_xticks([])
    ax.set_yticks([])
    if title:
        ax.set_title(title, fontsize=8)
    fig.savefig(path)
    plt.close(fig)
