"""Log-log convergence figures rendered to file with matplotlib."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["convergence_plot"]

_STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.2,
    "svg.hashsalt": "geodisc",  # stable element ids across runs
    "svg.fonttype": "path",
}


def convergence_plot(path, N, values, refs=(), label="value", xlabel="N", ylabel=None, title=None):
    """Plot ``values`` against ``N`` on log-log axes with dashed reference curves.

    ``refs`` is a sequence of ``(label, ref_values)``.  The format follows the
    file suffix (``.svg``, ``.png``, ``.pdf``); SVG output carries no date.
    """
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        ax.loglog(N, values, "o-", color="k", markersize=3, label=label)
        for (name, ref), color in zip(refs, ("tab:blue", "tab:red", "tab:green", "tab:orange")):
            ax.loglog(N, ref, "--", color=color, label=name)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel or label)
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        ax.grid(True, which="major", linewidth=0.3, alpha=0.6)
        fig.tight_layout()
        meta = {"Date": None} if str(path).endswith(".svg") else None
        fig.savefig(path, metadata=meta)
        plt.close(fig)
    return path
