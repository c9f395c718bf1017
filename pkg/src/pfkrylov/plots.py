"""Static line plots for reports; the CSVs always hold the exact data."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# fixed metadata keeps PNG output byte-identical across runs
_PNG_META = {"Software": None}


def plot_convergence(report, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    labels = {"arnoldi": "Arnoldi", "sia": "SIA"}
    for name, values in report.mean_diff.items():
        ax.plot(report.S_values, values, marker="o", label=labels.get(name, name))
    ax.set_xlabel("S")
    ax.set_ylabel("mean |a(S) - a(S-1)|")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="png", metadata=_PNG_META)
    plt.close(fig)


def plot_sweep(curves: dict, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for name, res in curves.items():
        ax.step(res.false_alarm_rate, res.accuracy, where="post", label=name)
    ax.set_xlabel("false-alarm rate")
    ax.set_ylabel("accuracy")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.05)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="png", metadata=_PNG_META)
    plt.close(fig)
