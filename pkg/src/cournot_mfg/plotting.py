"""SVG figures drawn from the same arrays that go into the CSV artifacts."""

from __future__ import annotations

import logging
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

log = logging.getLogger(__name__)

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "cournot-mfg",  # stable element ids across runs
    "svg.fonttype": "none",
}


def figsize(scale=1.0, width=6.0):
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    return (width * scale, width * scale * golden)


def _save(fig, path):
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def line_plot(path, x, ys, xlabel, ylabel, logy=False):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figsize())
        for label, y in ys.items():
            ax.plot(x, y, label=label, lw=1.2)
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if len(ys) > 1:
            ax.legend(frameon=False)
        return _save(fig, path)


def convergence_plot(path, history, label_suffix=""):
    n = np.array([d.n for d in history])
    res = np.array([d.residual for d in history])
    an = np.array([d.weighted_an for d in history])
    ex = [(d.n, d.exploitability) for d in history if d.exploitability is not None and d.exploitability > 0]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figsize())
        ax.semilogy(n + 1, res, lw=1.2, label="residual" + label_suffix)
        ax.semilogy(n + 1, an, lw=1.2, label="weighted a_n" + label_suffix)
        if ex:
            en, ev = zip(*ex)
            ax.semilogy(np.array(en) + 1, ev, "o", ms=3, label="exploitability" + label_suffix)
        ax.set_xscale("log")
        ax.set_xlabel("iteration n + 1")
        ax.legend(frameon=False)
        return _save(fig, path)


def snapshot_plot(path, x, field, times, t_values, ylabel):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figsize())
        for tau in times:
            ax.plot(x, field[tau], lw=1.0, label=f"t = {t_values[tau]:.3g}")
        ax.set_xlabel("x")
        ax.set_ylabel(ylabel)
        ax.legend(frameon=False)
        return _save(fig, path)


def emit_plots(sol, out_dir, times=None) -> list[Path]:
    """Write price, production, mass, convergence and snapshot figures.

    Any plotting failure is logged and leaves the CSV artifacts untouched.
    """
    out_dir = Path(out_dir)
    if not sol.history:
        log.warning("empty iteration history; no plots emitted")
        return []
    grid = sol.grid
    n = grid.N_L + 1
    written = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        written.append(line_plot(out_dir / "price.svg", sol.P.times, {"price": sol.P.values}, "t", "price"))
        written.append(
            line_plot(out_dir / "production.svg", sol.psi.times, {"production": sol.psi.values}, "t", "aggregate production")
        )
        mass = grid.h * np.maximum(sol.M.values[:, :n], 0.0).sum(axis=1)
        written.append(line_plot(out_dir / "mass.svg", grid.t, {"mass": mass}, "t", "total mass"))
        written.append(convergence_plot(out_dir / "convergence.svg", sol.history))
        if times is None:
            times = sorted({int(round(k)) for k in np.linspace(0, grid.N_T, 5)})
        node_times = [tau for tau in times if tau <= grid.N_T]
        written.append(
            snapshot_plot(out_dir / "density.svg", grid.x[:n], np.maximum(sol.M.values[:, :n], 0.0), node_times, grid.t, "m")
        )
        written.append(snapshot_plot(out_dir / "value.svg", grid.x[:n], sol.U.values[:, :n], node_times, grid.t, "u"))
        q_times = [min(tau, grid.N_T - 1) for tau in node_times]
        written.append(
            snapshot_plot(out_dir / "policy.svg", grid.x[:n], sol.Q.values[:, :n], sorted(set(q_times)), grid.t, "q")
        )
    except Exception as exc:  # plots are conveniences; CSVs stay authoritative
        log.warning("plotting failed (%s); continuing with CSV output only", exc)
    return written


def sweep_plot(path, histories: dict) -> Path | None:
    """Overlay residual decay for several learning rates."""
    if not histories:
        log.warning("no sweep histories to plot")
        return None
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figsize())
        for label, hist in histories.items():
            n = np.array([d.n for d in hist]) + 1
            ax.loglog(n, [d.weighted_an for d in hist], lw=1.2, label=label)
        ax.set_xlabel("iteration n + 1")
        ax.set_ylabel("weighted a_n")
        ax.legend(frameon=False)
        return _save(fig, path)
