"""Matplotlib figures written next to the CLI's text/CSV output."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .coxmat import CoxeterSystem  # noqa: E402
from .moussong import DavisPoset  # noqa: E402
from .nerve import GeodesicResult  # noqa: E402


def densify_path(gram: np.ndarray, result: GeodesicResult, per_segment: int = 64):
    """Sample each straight segment of the path; returns (arclength, ambient points)."""
    n = gram.shape[0]
    pts = [p.ambient(n) for p in result.path]
    s_all, x_all = [0.0], [pts[0]] if pts else []
    offset = 0.0
    for p, q in zip(pts, pts[1:]):
        for t in np.linspace(0.0, 1.0, per_segment + 1)[1:]:
            x = (1 - t) * p + t * q
            x = x / math.sqrt(float(x @ gram @ x))
            c = float(np.clip(p @ gram @ x, -1.0, 1.0))
            s_all.append(offset + math.acos(c))
            x_all.append(x)
        offset += math.acos(float(np.clip(p @ gram @ q, -1.0, 1.0)))
    return np.array(s_all), np.array(x_all).reshape(len(x_all), n)


def plot_geodesic(gram: np.ndarray, result: GeodesicResult, path: str, title: str | None = None) -> None:
    """Coefficient of every vertex along the sampled shortest path."""
    s, X = densify_path(np.asarray(gram), result)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for k in range(X.shape[1]):
        if np.any(X[:, k] > 0):
            ax.plot(s, X[:, k], label=f"v{k + 1}")
    for node_s in np.unique(np.round(s[:: 64], 12))[1:-1]:
        ax.axvline(node_s, color="0.8", lw=0.8, zorder=0)
    ax.set_xlabel("arc length (rad)")
    ax.set_ylabel("coefficient")
    ax.set_title(title or f"d = {result.distance:.6f}  (bound {result.error_bound:.2g})")
    ax.legend(frameon=False, fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_davis_poset(sys: CoxeterSystem, poset: DavisPoset, path: str) -> None:
    """Hasse diagram layered by subset size."""
    levels: dict[int, list[int]] = {}
    for cid, cell in enumerate(poset.cells):
        levels.setdefault(len(cell.subset), []).append(cid)
    pos = {}
    for level, ids in levels.items():
        for k, cid in enumerate(ids):
            pos[cid] = ((k + 1) / (len(ids) + 1), level)
    fig, ax = plt.subplots(figsize=(max(6.4, 0.5 * max(len(v) for v in levels.values())), 1.6 * (len(levels) + 1)))
    for child, parent in poset.covers:
        (x0, y0), (x1, y1) = pos[child], pos[parent]
        ax.plot([x0, x1], [y0, y1], color="0.6", lw=0.6, zorder=1)
    small = len(poset.cells) <= 60
    for cid, (x, y) in pos.items():
        ax.plot(x, y, "o", color="k", ms=3, zorder=2)
        if small:
            ax.annotate(poset.cells[cid].label(sys), (x, y), textcoords="offset points", xytext=(0, 5),
                        ha="center", fontsize=7)
    ax.set_yticks(sorted(levels))
    ax.set_ylabel("|T|")
    ax.set_xticks([])
    ax.set_title(f"Davis poset: {len(poset.cells)} cells, |W| = {poset.group_order}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
