"""Matplotlib figures for evaluation summaries (Agg backend, file output)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .config import CONDITIONS


def plot_returns_by_condition(summary_rows: list[dict], out_path: str) -> str:
    """Grouped bars: mean return per condition for each method present.

    summary_rows: dicts with keys method, condition, mean_return, std_return.
    """
    methods = sorted({r["method"] for r in summary_rows})
    conditions = [c for c in CONDITIONS if any(r["condition"] == c for r in summary_rows)]
    x = np.arange(len(conditions), dtype=np.float64)
    width = 0.8 / max(len(methods), 1)

    fig, ax = plt.subplots(figsize=(7, 4))
    for j, method in enumerate(methods):
        means, errs = [], []
        for c in conditions:
            rows = [r for r in summary_rows if r["method"] == method and r["condition"] == c]
            means.append(rows[0]["mean_return"] if rows else np.nan)
            errs.append(rows[0].get("std_return", 0.0) if rows else 0.0)
        ax.bar(x + (j - (len(methods) - 1) / 2) * width, means, width,
               yerr=errs, capsize=3, label=method)
    ax.set_xticks(x)
    ax.set_xticklabels(conditions)
    ax.set_ylabel("mean episode return")
    ax.set_xlabel("noise condition")
    ax.legend()
    ax.axhline(0.0, color="black", linewidth=0.6)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def plot_completion_by_condition(summary_rows: list[dict], out_path: str) -> str:
    methods = sorted({r["method"] for r in summary_rows})
    conditions = [c for c in CONDITIONS if any(r["condition"] == c for r in summary_rows)]
    x = np.arange(len(conditions), dtype=np.float64)
    width = 0.8 / max(len(methods), 1)

    fig, ax = plt.subplots(figsize=(7, 4))
    for j, method in enumerate(methods):
        vals = []
        for c in conditions:
            rows = [r for r in summary_rows if r["method"] == method and r["condition"] == c]
            vals.append(rows[0]["completion_rate"] if rows else np.nan)
        ax.bar(x + (j - (len(methods) - 1) / 2) * width, vals, width, label=method)
    ax.set_xticks(x)
    ax.set_xticklabels(conditions)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("completion rate")
    ax.set_xlabel("noise condition")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def plot_latency_box(latency_samples: dict[str, list[int]], out_path: str) -> str:
    """Box plot of per-decision latency (ms) keyed by arm name."""
    labels = list(latency_samples.keys())
    data = [np.asarray(latency_samples[k], dtype=np.float64) / 1e6 for k in labels]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.boxplot(data, showfliers=False)
    ax.set_xticks(range(1, len(labels) + 1))
    ax.set_xticklabels(labels)
    ax.set_ylabel("per-decision latency (ms)")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def plot_training_curves(history: list[dict], out_path: str) -> str:
    """Mean base return and bonus rate across training, one line each."""
    steps = [row["step"] for row in history]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(steps, [row["mean_base_return"] for row in history], label="base return")
    ax.set_xlabel("environment steps")
    ax.set_ylabel("mean episode return")
    ax2 = ax.twinx()
    ax2.plot(
        steps,
        [row["mean_bonus_per_step"] for row in history],
        color="tab:orange",
        label="bonus per step",
    )
    ax2.set_ylabel("mean bonus per step")
    lines, labels = ax.get_legend_handles_labels()
    lines2, labels2 = ax2.get_legend_handles_labels()
    ax.legend(lines + lines2, labels + labels2, loc="lower right")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path
