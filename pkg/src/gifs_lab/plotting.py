"""Static SVG figures.  Metadata dates are dropped and the SVG id salt is fixed,
so identical inputs render to identical files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams.update({
    "svg.hashsalt": "gifs-lab",
    "font.size": 8,
    "axes.spines.right": False,
    "axes.spines.top": False,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.2,
    "figure.figsize": (6.0, 3.0),
})


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_cells(tree, path, max_depth: int = 3):
    """Cells as horizontal bars, one row per level."""
    depth = min(max_depth, tree.depth)
    fig, ax = plt.subplots()
    for k in range(1, depth + 1):
        iv = tree.intervals(k)
        ax.broken_barh([(lo, hi - lo) for lo, hi in iv], (depth - k + 0.6, 0.8),
                       facecolors=plt.cm.viridis(k / (depth + 1)))
    ax.set_yticks([depth - k + 1 for k in range(1, depth + 1)])
    ax.set_yticklabels([f"n={k}" for k in range(1, depth + 1)])
    ax.set_xlabel("x")
    ax.set_title(f"q = {tree.q:g}, arities {list(tree.profile.arities)}")
    _save(fig, path)


def plot_net(net, path, title: str = ""):
    fig, ax = plt.subplots(figsize=(6.0, 1.6 if net.dim == 1 else 4.0))
    if net.dim == 1:
        ax.vlines(net.points[:, 0], 0, 1, lw=0.6)
        ax.set_yticks([])
    else:
        ax.plot(net.points[:, 0], net.points[:, 1], ".", ms=2)
    ax.set_title(title or f"{len(net)} points, resolution {net.resolution:.3g}")
    _save(fig, path)


def plot_trace(trace, contraction: float, path):
    """Hausdorff step sizes on a log scale against the geometric envelope."""
    fig, ax = plt.subplots()
    k = np.arange(len(trace))
    t = np.asarray(trace, dtype=float)
    pos = t > 0
    ax.semilogy(k[pos], t[pos], "o-", label="H(S_k, S_k+1)")
    if len(t) and t[0] > 0:
        ax.semilogy(k, t[0] * contraction ** k, "--", label=f"{contraction:g}^k envelope")
    ax.set_xlabel("step k")
    ax.legend(frameon=False)
    _save(fig, path)


def plot_example_space(space, highlight, path):
    fig, ax = plt.subplots(figsize=(4.0, 4.0))
    perf = space.perfect_part.points
    iso = space.isolated_part.points
    ax.plot(perf[:, 0], perf[:, 1], "-", color="0.3", lw=2, label="perfect part")
    ax.plot(iso[:, 0], iso[:, 1], ".", color="0.6", ms=2, label="isolated points")
    for n, K in highlight:
        ax.plot(K.points[:, 0], K.points[:, 1], "o", ms=3, label=f"K_{n}")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(frameon=False, fontsize=6)
    _save(fig, path)
