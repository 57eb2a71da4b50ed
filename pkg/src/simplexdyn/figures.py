"""Matplotlib renderings saved next to the delimited outputs.

Figures are report companions, not the primary artifacts; the CLI writes
them alongside each CSV unless asked not to.  All rendering goes through
the Agg backend with fixed sizes so files reproduce across runs.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVEKW = {"dpi": 120, "bbox_inches": "tight"}


def trajectory_figure(traj, path):
    """Type shares against time."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for i in range(traj.n):
        ax.plot(traj.times, traj.states[:, i], lw=1.2, label=f"p{i + 1}")
    ax.set_xlabel("t")
    ax.set_ylabel("share")
    ax.set_ylim(0, 1)
    ax.legend(loc="best", frameon=False)
    ax.set_title(f"trajectory ({traj.scheme})")
    fig.savefig(path, **_SAVEKW)
    plt.close(fig)


def ensemble_figure(states, path, bins: int = 60):
    """Component histograms of terminal states."""
    states = np.asarray(states)
    n = states.shape[1]
    fig, axes = plt.subplots(1, n, figsize=(3.2 * n, 3.2), sharey=True)
    for i, ax in enumerate(np.atleast_1d(axes)):
        ax.hist(states[:, i], bins=bins, range=(0, 1), color="#0057b8")
        ax.set_xlabel(f"p{i + 1}")
    np.atleast_1d(axes)[0].set_ylabel("count")
    fig.suptitle("terminal states")
    fig.savefig(path, **_SAVEKW)
    plt.close(fig)


def suite_figure(report: dict, path):
    """Gate statistics against their thresholds, one bar per gate."""
    gates = report.get("gates", [])
    names = [g["name"] for g in gates]
    stats = [g["statistic"] for g in gates]
    thresholds = [g["threshold"] for g in gates]
    colors = ["#2ca02c" if g["pass"] else "#d62728" for g in gates]
    y = np.arange(len(gates))
    fig, ax = plt.subplots(figsize=(7, 0.5 * max(len(gates), 4) + 1.2))
    ax.barh(y, stats, color=colors, height=0.6)
    for k, thr in enumerate(thresholds):
        ax.plot([thr, thr], [k - 0.35, k + 0.35], color="#333", lw=1.5)
    ax.set_yticks(y, names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("statistic (bar) vs threshold (tick)")
    ax.set_title(f"suite {report.get('suite', '')}: "
                 f"{'pass' if report.get('pass') else 'FAIL'}")
    fig.savefig(path, **_SAVEKW)
    plt.close(fig)
