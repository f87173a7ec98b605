"""Figure rendering for the CLI report paths.

Renders the link-function curves and sweep results to PNG files next to the
delimited output.  Uses the non-interactive backend; importing this module
never opens a window.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

PI = math.pi


def _split_jumps(rows: list[tuple[float, float, float]], col: int):
    """Insert NaN between duplicated-angle rows so jumps stay vertical gaps."""
    xs: list[float] = []
    ys: list[float] = []
    prev_theta = None
    for row in rows:
        theta, value = row[0], row[col]
        if prev_theta is not None and theta == prev_theta:
            xs.append(float("nan"))
            ys.append(float("nan"))
        xs.append(theta)
        ys.append(value)
        prev_theta = theta
    return xs, ys


def render_gfn_figure(
    rows: list[tuple[float, float, float]], title: str, path: str | Path
) -> Path:
    """Plot announced and singlet-effective probabilities against the angle."""
    path = Path(path)
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5), sharey=True)
    for ax, col, label in ((axes[0], 1, "g(theta)"), (axes[1], 2, "effective q(theta)")):
        xs, ys = _split_jumps(rows, col)
        ax.plot(xs, ys, lw=1.5)
        ax.set_xlabel("theta (rad)")
        ax.set_ylabel(label)
        ax.set_xlim(0.0, PI)
        ax.set_ylim(-0.05, 1.05)
        ax.set_xticks([0, PI / 4, PI / 2, 3 * PI / 4, PI])
        ax.set_xticklabels(["0", "pi/4", "pi/2", "3pi/4", "pi"])
        ax.grid(True, alpha=0.3)
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_sweep_figure(
    values: list[float],
    points: list[tuple[float, float, bool]],
    param: str,
    path: str | Path,
) -> Path:
    """Scatter the equilibrium coordinates found at each sweep value.

    ``points`` holds ``(param value, probability, limit_only)`` for both
    players' coordinates of every reported equilibrium.
    """
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    solid = [(v, p) for v, p, lim in points if not lim]
    limits = [(v, p) for v, p, lim in points if lim]
    if solid:
        ax.scatter(*zip(*solid), s=12, label="equilibrium coordinate")
    if limits:
        ax.scatter(*zip(*limits), s=18, marker="x", label="limit-only")
    ax.set_xlabel(param)
    ax.set_ylabel("equilibrium probability")
    ax.set_ylim(-0.05, 1.05)
    if values:
        ax.set_xlim(min(values), max(values))
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
