"""SVG line plots through matplotlib, written byte-stable.

The date metadata is dropped and the id hash salt is fixed, so identical data
gives identical files. Each plotted series sits in a ``<g id="series-NAME">``
group and the legend in ``<g id="legend">``.
"""
import io

import matplotlib
import numpy as np
from matplotlib.figure import Figure

_RC = {"svg.hashsalt": "sparse-iroa", "svg.fonttype": "none"}


def _render(fig) -> str:
    buf = io.StringIO()
    with matplotlib.rc_context(_RC):
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def curve_svg(series, title="recovery frequency", xlabel="sparsity K", ylabel="recovery frequency"):
    """``series`` maps a solver name to a list of (k, frequency) points."""
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(6.4, 4.2))
        ax = fig.add_subplot()
        for name, pts in sorted(series.items()):
            ks, fs = zip(*pts)
            (line,) = ax.plot(ks, fs, marker="o", markersize=4, label=name)
            line.set_gid(f"series-{name}")
        ax.set_ylim(-0.02, 1.02)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.grid(alpha=0.3)
        ax.legend(loc="upper right").set_gid("legend")
        fig.tight_layout()
        return _render(fig)


def trace_svg(magnitudes, title="signal magnitude per iteration", xlabel="index", ylabel="|x_i|"):
    """One line per iteration (rows of ``magnitudes``), light to dark, final row in red."""
    mags = np.asarray(magnitudes, dtype=float)
    iters, n = mags.shape
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(6.4, 4.2))
        ax = fig.add_subplot()
        shades = matplotlib.colormaps["Blues"](np.linspace(0.25, 0.9, max(iters - 1, 1)))
        idx = np.arange(n)
        for i, row in enumerate(mags):
            final = i == iters - 1
            (line,) = ax.plot(
                idx, row,
                color="#d62728" if final else shades[i],
                linewidth=1.5 if final else 0.8,
                label=f"iteration {i + 1} (final)" if final else ("iteration 1" if i == 0 else None),
            )
            line.set_gid(f"series-iteration-{i + 1}")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.legend(loc="upper right").set_gid("legend")
        fig.tight_layout()
        return _render(fig)
