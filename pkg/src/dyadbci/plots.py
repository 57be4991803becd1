"""Vector-graphics figures regenerable from the emitted tables."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_windowed_plv(path, centers_by_state: dict, band_name: str, title: str = "") -> Path:
    """Windowed PLV traces per state with a least-squares trend line.

    ``centers_by_state`` maps state name to (window_centers, values).
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 3.2))
    for state, (centers, values) in sorted(centers_by_state.items()):
        centers = np.asarray(centers, dtype=float)
        values = np.asarray(values, dtype=float)
        line = ax.plot(centers, values, marker="o", markersize=2.5, label=state)[0]
        good = np.isfinite(values)
        if np.count_nonzero(good) >= 2:
            slope, intercept = np.polyfit(centers[good], values[good], 1)
            ax.plot(
                centers,
                slope * centers + intercept,
                linestyle="--",
                linewidth=0.8,
                color=line.get_color(),
                label=f"{state} trend ({slope:+.4f}/s)",
            )
    ax.set_xlabel("time in epoch (s)")
    ax.set_ylabel("PLV")
    ax.set_ylim(0, 1)
    ax.set_title(title or f"windowed PLV, {band_name} band")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def plot_circular_graph(path, weights: np.ndarray, adjacency: np.ndarray, labels, title: str = "") -> Path:
    """Nodes on a circle, kept edges drawn as chords scaled by weight."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = len(labels)
    angles = 2 * np.pi * np.arange(n) / n + np.pi / 2
    xs, ys = np.cos(angles), np.sin(angles)
    fig, ax = plt.subplots(figsize=(4, 4))
    for i in range(n):
        for j in range(i + 1, n):
            if adjacency[i, j]:
                ax.plot(
                    [xs[i], xs[j]],
                    [ys[i], ys[j]],
                    color="tab:blue",
                    alpha=0.35 + 0.6 * float(weights[i, j]) * 0.65,
                    linewidth=0.5 + 2.5 * float(weights[i, j]),
                    zorder=1,
                )
    ax.scatter(xs, ys, s=180, color="white", edgecolor="black", zorder=2)
    for i, label in enumerate(labels):
        ax.text(xs[i], ys[i], label, ha="center", va="center", fontsize=7, zorder=3)
    ax.set_xlim(-1.25, 1.25)
    ax.set_ylim(-1.25, 1.25)
    ax.set_aspect("equal")
    ax.axis("off")
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def plot_accuracy_by_phase(path, table_rows, title: str = "") -> Path:
    """Per-phase accuracy distribution as jittered points with means.

    ``table_rows`` are dicts with keys phase, subject, accuracy.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    phases = sorted({r["phase"] for r in table_rows})
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    rng = np.random.default_rng(0)
    for k, phase in enumerate(phases):
        accs = [r["accuracy"] for r in table_rows if r["phase"] == phase]
        x = k + rng.uniform(-0.08, 0.08, size=len(accs))
        ax.plot(x, accs, "o", markersize=4, alpha=0.7)
        ax.hlines(np.mean(accs), k - 0.2, k + 0.2, color="black", linewidth=1.5)
    ax.set_xticks(range(len(phases)), [f"Phase {p}" for p in phases])
    ax.set_ylabel("CV accuracy")
    ax.set_ylim(0, 1.05)
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path
