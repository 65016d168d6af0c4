"""Report figures rendered to files: the convergence curve of a training
or benchmark run, and the confusion matrix of an evaluation."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics import ConfusionMatrix

__all__ = ["save_convergence_plot", "save_confusion_matrix_plot"]


def save_convergence_plot(history, path, title="Best fitness per iteration"):
    """Line plot of best-so-far fitness against iteration number."""
    history = list(history)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(range(1, len(history) + 1), history, color="tab:blue", linewidth=1.5)
    ax.set_xlabel("iteration")
    ax.set_ylabel("best fitness")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_confusion_matrix_plot(cm: ConfusionMatrix, path):
    """2x2 heatmap of the confusion counts, annotated with the numbers."""
    counts = np.array([[cm.tp, cm.fn], [cm.fp, cm.tn]], dtype=float)
    fig, ax = plt.subplots(figsize=(4.8, 4.2))
    image = ax.imshow(counts, cmap="Blues")
    ax.set_xticks([0, 1], labels=["predicted +", "predicted -"])
    ax.set_yticks([0, 1], labels=["actual +", "actual -"])
    ax.set_title(f"Confusion matrix (positive: {cm.positive_class})")
    threshold = counts.max() / 2 if counts.max() > 0 else 0.5
    for row in range(2):
        for col in range(2):
            value = int(counts[row, col])
            color = "white" if counts[row, col] > threshold else "black"
            ax.text(col, row, str(value), ha="center", va="center", color=color)
    fig.colorbar(image, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
