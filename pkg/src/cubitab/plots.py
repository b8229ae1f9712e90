"""Figure rendering for the reporting paths.

All functions write PNG files and return the path; matplotlib runs on the
Agg backend so the CLI works headless.
"""

from __future__ import annotations

import os
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .density import C_MINUS, C_PLUS, ZETA3
from .maier import MaierReport, multiplicity_profile
from .tabulate import FieldTable


def _finish(fig, path: str | os.PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def counting_figure(table: FieldTable, path: str | os.PathLike) -> Path:
    """Step plot of the counting function against its main term and band."""
    discs = np.array([abs(r.disc) for r in table.records], dtype=float)
    n = np.arange(1, discs.size + 1, dtype=float)
    coef = float((C_PLUS if table.sign == "+" else C_MINUS) / (12 * ZETA3))
    xs = np.linspace(1, float(table.bound), 400)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.step(discs, n, where="post", lw=0.8, label="tabulated count")
    ax.plot(xs, coef * xs, "--", lw=1.0, label="main term")
    ax.fill_between(
        xs,
        coef * xs - 2 * xs ** (5 / 6),
        coef * xs + 2 * xs ** (5 / 6),
        alpha=0.15,
        label="main term +- 2 X^(5/6)",
    )
    ax.set_xlabel("|disc| bound X")
    ax.set_ylabel("fields")
    ax.set_title(f"cubic fields, sign {table.sign}, X <= {table.bound}")
    ax.legend(loc="upper left", fontsize=8)
    return _finish(fig, path)


def multiplicity_figure(
    table: FieldTable, path: str | os.PathLike, kappa: float = 0.3193
) -> Path:
    """Running max of per-discriminant multiplicity vs the |disc|^kappa curve."""
    profile = multiplicity_profile(table, kappa)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if profile["steps"]:
        xs = [s["abs_disc"] for s in profile["steps"]]
        ys = [s["multiplicity"] for s in profile["steps"]]
        ax.step(xs, ys, where="post", marker="o", label="max multiplicity")
    grid = np.linspace(1, float(table.bound), 400)
    ax.plot(grid, grid**kappa, "--", label=f"|disc|^{kappa}")
    ax.set_xscale("log")
    ax.set_xlabel("|disc|")
    ax.set_ylabel("multiplicity")
    ax.set_title(f"discriminant multiplicities, sign {table.sign}")
    ax.legend(loc="upper left", fontsize=8)
    return _finish(fig, path)


def maier_figure(report: MaierReport, path: str | os.PathLike) -> Path:
    """Heatmap of the matrix multiplicities with good rows marked."""
    data = np.array(report.multiplicities, dtype=float)
    fig, ax = plt.subplots(
        figsize=(max(3.5, 0.5 * report.k + 2), max(3.0, 0.12 * (report.rows + 1) + 1.5))
    )
    im = ax.imshow(data, aspect="auto", cmap="viridis", interpolation="nearest")
    fig.colorbar(im, ax=ax, label="fields in cell")
    for t in report.good_rows:
        ax.axhline(t, color="red", lw=0.5, alpha=0.6)
    ax.set_xticks(range(report.k), [str(i + 1) for i in range(report.k)])
    ax.set_xlabel("column i")
    ax.set_ylabel("row t")
    ax.set_title(
        f"Maier matrix, a={report.a}, m={report.m}, good rows={report.G}"
    )
    return _finish(fig, path)
