"""Figures written next to sweep and acceptance reports."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.figsize": (5.0, 3.4),
    "axes.grid": True,
    "grid.alpha": 0.3,
}
# no timestamps or version strings, so reruns produce identical files
PNG_METADATA = {"Software": None}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=PNG_METADATA)
    plt.close(fig)
    return path


def plot_dilation(sweeps: dict, path):
    """Delta / f(sqrt n) against the dilation factor, one line per body."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for label, rows in sweeps.items():
            lam = [r["lambda"] for r in rows]
            ax.plot(lam, [r["ratio"] for r in rows], lw=0.9, label=label)
        ax.set_xlabel(r"dilation $\lambda$")
        ax.set_ylabel(r"$\Delta(\lambda E)\,/\,f(\sqrt{n})$")
        ax.set_yscale("log")
        if len(sweeps) <= 8:
            ax.legend(frameon=False)
        return _save(fig, path)


def plot_tube(curves: list, constants: dict, path):
    """True parallel-surface area over f(rho), against rho / s_1(a).

    ``curves`` holds (label, rho_over_s1, area_over_f) triples.
    """
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for label, x, y in curves:
            ax.plot(x, y, lw=0.9, label=label)
        ax.axhline(constants["C"], color="k", ls="--", lw=0.8, label="upper constant")
        ax.axhline(constants["c"], color="k", ls=":", lw=0.8, label="lower constant")
        ax.axvline(1.0, color="grey", lw=0.6)
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel(r"$\rho / s_1(a)$")
        ax.set_ylabel(r"area$(\partial E_\rho)\,/\,f(\rho)$")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_pinch(positions, path):
    """Histogram of log(M_i / lower) / log(upper / lower) over a batch."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.hist(np.asarray(positions), bins=40, range=(0, 1), color="0.4")
        ax.set_xlabel("relative log-position of $M_i$ inside the pinch interval")
        ax.set_ylabel("count")
        return _save(fig, path)
