"""Figure rendering for the report paths.

Every figure lands next to the delimited output it illustrates; CSV/JSON
remain the machine-readable contract and nothing downstream depends on the
images.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_summary_figure(summary, path) -> None:
    """Mean/max regret trajectories against their bound curves, log-x."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    t = summary.t_values
    ax.plot(t, summary.regret.mean(axis=1), "o-", color="tab:blue", label="mean regret")
    ax.plot(t, summary.regret.max(axis=1), "s--", color="tab:orange",
            label="max regret over trials")
    if np.any(np.isfinite(summary.regret_bound)):
        ok = np.isfinite(summary.regret_bound)
        ax.plot(t[ok], summary.regret_bound[ok], "k-", lw=2,
                label=f"bound ({summary.meta['regret_bound_kind']})")
    for j, eps in enumerate(summary.epsilons):
        if np.any(np.isfinite(summary.quantile_bound[:, j])):
            ax.plot(t, summary.quantiles[:, :, j].mean(axis=1), ":",
                    label=f"mean quantile regret, eps={eps:g}")
            ax.plot(t, summary.quantile_bound[:, j], "-", alpha=0.5, lw=1,
                    label=f"quantile bound, eps={eps:g}")
    ax.set_xscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("regret")
    title = (f"{summary.meta['learner']} vs {summary.meta['adversary']}, "
             f"n={summary.meta['n']}, trials={summary.trials}")
    ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_lambda_figure(alphas, lams, upper, path) -> None:
    """The inverse map alpha -> lambda(alpha) against its proven upper bound."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    pos = np.asarray(alphas) > 0
    ax.plot(np.asarray(alphas)[pos], np.asarray(lams)[pos], "-", color="tab:red",
            label="lambda(alpha)")
    ax.plot(np.asarray(alphas)[pos], np.asarray(upper)[pos], "--", color="tab:blue",
            label="3 + sqrt(2 ln(alpha+1))")
    ax.set_xscale("log")
    ax.set_xlabel("alpha")
    ax.set_ylabel("lambda")
    ax.set_title("root of  -M0(lambda^2 / 2) = alpha")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
