"""Figures for the CLI report path, rendered off-screen to PNG."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_density(records, path, title="Ulam stationary density"):
    """Step plot of density per bin from ``UlamModel.to_records()`` rows."""
    lo = np.array([r["lo"] for r in records])
    hi = np.array([r["hi"] for r in records])
    mass = np.array([r["mass"] for r in records])
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.stairs(mass / (hi - lo), np.append(lo, hi[-1]), color="k", lw=1)
    ax.axhline(1.0, color="0.6", ls=":", lw=1)
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.15 * max(1.0, float((mass / (hi - lo)).max())))
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    ax.set_title(title)
    return _save(fig, path)


def plot_basins(histogram, path, title="Basin sizes"):
    """Bar chart from ``[{"orbit": j, "count": c}, ...]``; ``None`` is drawn as unattributed."""
    labels = ["none" if h["orbit"] is None else f"orbit {h['orbit']}" for h in histogram]
    counts = [h["count"] for h in histogram]
    fig, ax = plt.subplots(figsize=(max(3, 1 + 0.8 * len(labels)), 3.5))
    ax.bar(labels, counts, color="0.35")
    ax.set_ylabel("sampled points")
    ax.set_title(title)
    return _save(fig, path)


def plot_sweep(rows, path, title="Orbit count over parameter space"):
    """Scatter of ``r`` against the first cut for successful trials."""
    xs = [float(Fraction(r["cuts"][0])) for r in rows if r["outcome"] == "success"]
    rs = [r["r"] for r in rows if r["outcome"] == "success"]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.scatter(xs, rs, s=6, color="k", alpha=0.6)
    bad = [float(Fraction(r["cuts"][0])) for r in rows if r["outcome"] != "success"]
    if bad:
        ax.scatter(bad, [0] * len(bad), s=12, marker="x", color="tab:red", label="not success")
        ax.legend(loc="upper right", frameon=False)
    ax.set_xlim(0, 1)
    if rs:
        ax.set_yticks(range(0, max(rs) + 1))
    ax.set_xlabel("$x_1$")
    ax.set_ylabel("r")
    ax.set_title(title)
    return _save(fig, path)
