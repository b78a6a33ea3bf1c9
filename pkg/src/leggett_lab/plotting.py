"""Figure rendering for scan, optimization, and model-check reports.

Uses the Agg backend and pins the PNG metadata so identical inputs produce
byte-identical files.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .ineq import BOUND, MAX_VIOLATION, peak_profile
from .optim import ScanGrid

FIG_METADATA = {"Software": "leggett-lab"}
DPI = 150


def _save(fig, path) -> str:
    fig.savefig(path, dpi=DPI, metadata=FIG_METADATA)
    plt.close(fig)
    return str(path)


def render_scan_figure(grid: ScanGrid, path) -> str:
    """Heatmaps of both left sides maximized over psi, bound contour overlaid."""
    proj_plus = grid.lhs_plus.max(axis=2)
    proj_minus = grid.lhs_minus.max(axis=2)
    vmin = min(proj_plus.min(), proj_minus.min())
    vmax = max(proj_plus.max(), proj_minus.max())
    fig, axes = plt.subplots(
        1, 2, figsize=(11.0, 4.2), sharey=True, constrained_layout=True
    )
    extent = (
        float(grid.phi[0]),
        float(grid.phi[-1]),
        float(grid.theta[0]),
        float(grid.theta[-1]),
    )
    image = None
    for ax, proj, label in (
        (axes[0], proj_plus, "plus"),
        (axes[1], proj_minus, "minus"),
    ):
        image = ax.imshow(
            proj,
            origin="lower",
            aspect="auto",
            extent=extent,
            vmin=vmin,
            vmax=vmax,
            cmap="viridis",
        )
        if proj.min() < grid.bound < proj.max():
            ax.contour(
                grid.phi,
                grid.theta,
                proj,
                levels=[grid.bound],
                colors="white",
                linewidths=1.2,
                linestyles="dashed",
            )
        ax.set_title(f"{label} family (max over psi)")
        ax.set_xlabel("phi (rad)")
    axes[0].set_ylabel("theta (rad)")
    fig.colorbar(image, ax=list(axes), shrink=0.92, label="left side")
    return _save(fig, path)


def render_optimum_figure(reports, path) -> str:
    """Ridge profiles over theta with located optima marked."""
    theta = np.linspace(0.0, np.pi, 601)
    fig, ax = plt.subplots(figsize=(7.4, 4.6), constrained_layout=True)
    for branch, style in (("plus", "-"), ("minus", "--")):
        profile = [peak_profile(t, branch) for t in theta]
        ax.plot(theta, profile, style, label=f"{branch} family ridge")
    ax.axhline(BOUND, color="black", lw=1.0, ls=":", label=f"bound = {BOUND:g}")
    ax.axhline(MAX_VIOLATION, color="gray", lw=0.8, ls="-.")
    for report in reports:
        ax.plot([report.theta], [report.value], marker="o", ms=6, color="crimson")
        ax.annotate(
            f"{report.branch}: {report.value:.9f}",
            (report.theta, report.value),
            textcoords="offset points",
            xytext=(8, -14),
            fontsize=9,
        )
    ax.set_xlabel("theta (rad)")
    ax.set_ylabel("left side, maximized over (phi, psi)")
    ax.set_title("two-term form against its bound")
    ax.legend(loc="lower center", fontsize=9)
    return _save(fig, path)


def render_margin_histogram(margins: dict, path, title: str = "final margins") -> str:
    """Step histograms of margin samples; zero marks the bound."""
    fig, ax = plt.subplots(figsize=(7.4, 4.2), constrained_layout=True)
    for label, values in margins.items():
        ax.hist(np.asarray(values, dtype=float), bins=40, histtype="step", label=label)
    ax.axvline(0.0, color="black", lw=1.0)
    ax.set_xlabel("margin (left side minus bound)")
    ax.set_ylabel("count")
    ax.set_title(title)
    ax.legend(fontsize=9)
    return _save(fig, path)
