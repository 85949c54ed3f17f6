"""File-output figure renderers for the command-line reports.

Imported lazily by the CLI so headless data runs never touch matplotlib.
Every function writes one PNG and closes its figure.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 120


def save_learning_curves(report, path):
    """Train/test RMSE per epoch from a TrainReport."""
    epochs = np.arange(1, report.epochs_run + 1)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(epochs, report.train_rmse, label="train RMSE", color="tab:blue")
    ax.plot(epochs, report.test_rmse, label="test RMSE", color="tab:orange")
    if report.best_epoch:
        ax.axvline(report.best_epoch, color="gray", lw=0.8, ls="--", label="best epoch")
    ax.set_xlabel("epoch")
    ax.set_ylabel("RMSE (raw units)")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_metric_bars(rows, path):
    """One panel per metric, one bar per scope row.

    `rows` is a list of dicts with keys scope, cc, rmse, aem, si.
    """
    metrics = ("cc", "rmse", "aem", "si")
    scopes = [r["scope"] for r in rows]
    fig, axes = plt.subplots(1, len(metrics), figsize=(3.2 * len(metrics), 4), sharex=True)
    for ax, metric in zip(np.atleast_1d(axes), metrics):
        vals = [r[metric] for r in rows]
        ax.bar(range(len(scopes)), vals, color="tab:blue")
        ax.set_title(metric.upper())
        ax.set_xticks(range(len(scopes)))
        ax.set_xticklabels(scopes, rotation=45, ha="right")
        ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_selection_trace(trace, path):
    """Bar chart of the forward-selection correlation trace."""
    labels = [f"{entry.stage}: {entry.attribute}" for entry in trace]
    values = [entry.cc for entry in trace]
    fig, ax = plt.subplots(figsize=(1.6 * max(len(trace), 3) + 2, 4))
    ax.bar(range(len(trace)), values, color="tab:green")
    ax.set_xticks(range(len(trace)))
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylabel("held-out CC")
    ax.set_ylim(0, 1)
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_slice_image(grid, times, path, overlay=None):
    """Heat map of an inline slice (rows = time); optional overlay panel.

    `overlay` is (time_ms, target, predicted) arrays for one well trace.
    """
    panels = 2 if overlay is not None else 1
    fig, axes = plt.subplots(1, panels, figsize=(6 * panels, 5))
    axes = np.atleast_1d(axes)
    im = axes[0].imshow(
        grid,
        aspect="auto",
        origin="upper",
        extent=(0, grid.shape[1], times[-1], times[0]),
        cmap="viridis",
        vmin=0.0,
        vmax=1.0,
    )
    axes[0].set_xlabel("crossline")
    axes[0].set_ylabel("time (ms)")
    fig.colorbar(im, ax=axes[0], label="sand fraction")
    if overlay is not None:
        t, target, predicted = overlay
        axes[1].plot(target, t, label="target", color="black", lw=1)
        axes[1].plot(predicted, t, label="predicted", color="tab:red", lw=1)
        axes[1].invert_yaxis()
        axes[1].set_xlabel("sand fraction")
        axes[1].set_ylabel("time (ms)")
        axes[1].legend()
        axes[1].grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
