"""Matplotlib renderings of field histories, trajectories and EPR scans.

Figures are built on a bare :class:`~matplotlib.figure.Figure` with the Agg
canvas, so nothing here touches pyplot's global state or needs a display.
"""

from __future__ import annotations

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure


def _figure(width=6.4, height=4.8):
    fig = Figure(figsize=(width, height), dpi=120)
    FigureCanvasAgg(fig)
    return fig


def _extent(history):
    return (history.x[0], history.x[-1], history.t[0], history.t[-1])


def _save(fig, path):
    fig.savefig(path, metadata={"Software": None})
    return path


def density_map(history, path, trajectories=None, max_paths=60, title="total density"):
    """p_tot over (x, t) with time running upwards, optionally with trajectories."""
    fig = _figure()
    ax = fig.add_subplot()
    im = ax.imshow(history.p_tot, origin="lower", aspect="auto", extent=_extent(history),
                   cmap="inferno", interpolation="nearest")
    fig.colorbar(im, ax=ax, label="p_tot")
    if trajectories is not None:
        stride = max(1, len(trajectories) // max_paths)
        for row in trajectories.positions[::stride]:
            ax.plot(row, trajectories.times, color="white", lw=0.5, alpha=0.7)
        ax.set_xlim(history.x[0], history.x[-1])
    ax.set(xlabel="x", ylabel="t", title=title)
    return _save(fig, path)


def entangling_map(history, path, title="entangling current"):
    term = history.j.term_entangling
    lim = float(np.max(np.abs(term))) or 1.0
    fig = _figure()
    ax = fig.add_subplot()
    im = ax.imshow(term, origin="lower", aspect="auto", extent=_extent(history),
                   cmap="RdBu_r", vmin=-lim, vmax=lim, interpolation="nearest")
    fig.colorbar(im, ax=ax, label="j_entangling")
    ax.set(xlabel="x", ylabel="t", title=title)
    return _save(fig, path)


def current_trace(times, current, path, x_probe, t_reversal=None):
    fig = _figure(6.4, 3.6)
    ax = fig.add_subplot()
    ax.plot(times, current, color="k", lw=1.0)
    ax.axhline(0.0, color="0.6", lw=0.5)
    if t_reversal is not None:
        ax.axvline(t_reversal, color="tab:red", ls="--", lw=0.8, label=f"t_r = {t_reversal:.4g}")
        ax.legend(frameon=False)
    ax.set(xlabel="t", ylabel="J_tot", title=f"current at x = {x_probe:g}")
    return _save(fig, path)


def epr_scan(phi, columns, path):
    """``columns`` maps a label to probabilities sampled at ``phi``."""
    fig = _figure(6.4, 3.6)
    ax = fig.add_subplot()
    for label, values in columns.items():
        ax.plot(phi, values, label=label, lw=1.2)
    ax.set(xlabel="phi = Phi1 - Phi2", ylabel="conditional probability", ylim=(-0.05, 1.05),
           xlim=(phi[0], phi[-1]))
    ax.legend(frameon=False)
    return _save(fig, path)
