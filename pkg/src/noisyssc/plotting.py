"""Static figures written next to the CSV outputs (Agg backend, no display)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 9,
    "axes.labelsize": 9,
    "xtick.labelsize": 7,
    "ytick.labelsize": 7,
    "figure.dpi": 120,
    "savefig.bbox": "tight",
}


def _order(labels):
    # stable sort keeps the generator's point order inside each cluster
    return np.argsort(np.asarray(labels), kind="stable")


def plot_similarity(W, labels, path, title="similarity"):
    """Absolute similarity matrix with rows and columns grouped by ``labels``."""
    W = np.abs(np.asarray(W, dtype=float))
    idx = _order(labels)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(3.4, 3.0))
        im = ax.imshow(W[np.ix_(idx, idx)], cmap="Greys", interpolation="nearest")
        bounds = np.flatnonzero(np.diff(np.asarray(labels)[idx])) + 0.5
        for b in bounds:
            ax.axhline(b, color="tab:red", lw=0.6)
            ax.axvline(b, color="tab:red", lw=0.6)
        ax.set_title(title)
        ax.set_xticks([])
        ax.set_yticks([])
        fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04)
        fig.savefig(Path(path))
        plt.close(fig)
    return Path(path)


def plot_assignments(labels, truth, path, title="assignment"):
    """Predicted label of every point, points ordered by true cluster."""
    labels = np.asarray(labels)
    truth = np.asarray(truth)
    idx = _order(truth)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.0, 1.8))
        ax.scatter(np.arange(labels.size), labels[idx], c=truth[idx], cmap="tab10",
                   s=6, vmin=1, vmax=10)
        ax.set_xlabel("point (grouped by true cluster)")
        ax.set_ylabel("predicted")
        ax.set_yticks(np.unique(labels))
        ax.set_title(title)
        fig.savefig(Path(path))
        plt.close(fig)
    return Path(path)
