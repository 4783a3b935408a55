"""PNG figures written next to the delimited outputs of the CLI."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "xtick.labelsize": 7,
    "ytick.labelsize": 7,
    "figure.dpi": 100,
    "savefig.bbox": "tight",
}


def _save(fig, path):
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return str(path)


def matrix_heatmap(M, path, title: str = "", xlabel: str = "", ylabel: str = ""):
    """Diverging heatmap centred at zero; cells are annotated when the matrix is small."""
    M = np.asarray(M)
    with plt.rc_context(STYLE):
        n = max(M.shape)
        side = min(8.0, 2.0 + 0.35 * n)
        fig, ax = plt.subplots(figsize=(side, side))
        lim = max(1, int(np.abs(M).max()))
        im = ax.imshow(M, cmap="RdBu_r", vmin=-lim, vmax=lim, interpolation="nearest")
        if n <= 16:
            for (i, j), x in np.ndenumerate(M):
                if x:
                    ax.text(j, i, str(int(x)), ha="center", va="center", fontsize=7)
        ax.set_title(title)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        fig.colorbar(im, ax=ax, shrink=0.8)
        return _save(fig, path)


def histogram(counts: dict, path, title: str = "", xlabel: str = ""):
    keys = sorted(counts, key=lambda k: (isinstance(k, str), k))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3.0))
        ax.bar([str(k) for k in keys], [counts[k] for k in keys], color="0.35")
        ax.set_yscale("log")
        ax.set_title(title)
        ax.set_xlabel(xlabel)
        ax.set_ylabel("count")
        for side in ("top", "right"):
            ax.spines[side].set_visible(False)
        return _save(fig, path)


def element_plane(values, shape, path, title: str = ""):
    """Coefficients of an element of Z[(Z/p)^2] laid out on the p x p grid."""
    return matrix_heatmap(np.asarray(values).reshape(shape), path, title, "k_2", "k_1")
