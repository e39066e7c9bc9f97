"""Figure rendering for sweeps and schedules.

matplotlib is imported lazily and pinned to the Agg backend, so library use
and figure-free CLI runs never pay for it and no display is required.
"""

from __future__ import annotations

from typing import Sequence

from .errors import InputError
from .report import SweepRow
from .timeline import GanttRecord


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_sweep_figure(rows: Sequence[SweepRow], path, title: str | None = None) -> None:
    """Two stacked panels: per-node fraction curves and the speedup curve."""
    if not rows:
        raise InputError("nothing to plot: sweep is empty")
    plt = _pyplot()
    sigmas = [r.sigma for r in rows]
    fig, (ax_frac, ax_speed) = plt.subplots(
        2, 1, sharex=True, figsize=(6.4, 6.4),
        gridspec_kw={"height_ratios": [3, 2]},
    )
    for d, node in enumerate(rows[0].node_ids):
        ax_frac.plot(sigmas, [r.fractions[d] for r in rows],
                     label=f"node {node} (level {d})")
    ax_frac.set_ylabel("load fraction")
    ax_frac.grid(True, alpha=0.3)
    ax_frac.legend(fontsize="small")
    ax_speed.plot(sigmas, [r.speedup for r in rows], color="black")
    ax_speed.set_xlabel("sigma")
    ax_speed.set_ylabel("speedup")
    ax_speed.grid(True, alpha=0.3)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_gantt_figure(records: Sequence[GanttRecord], path,
                      title: str | None = None) -> None:
    """One lane per node: receive window above, compute interval below."""
    if not records:
        raise InputError("nothing to plot: no schedule records")
    plt = _pyplot()
    ordered = sorted(records, key=lambda r: r.node)
    height = min(0.35 * len(ordered) + 1.6, 12.0)
    fig, ax = plt.subplots(figsize=(7.2, height))
    recv_shown = comp_shown = False
    for lane, r in enumerate(ordered):
        if r.receive_end > r.receive_start:
            ax.barh(lane + 0.18, r.receive_end - r.receive_start, height=0.3,
                    left=r.receive_start, color="tab:orange",
                    label=None if recv_shown else "receive")
            recv_shown = True
        if r.compute_end > r.compute_start:
            ax.barh(lane - 0.18, r.compute_end - r.compute_start, height=0.3,
                    left=r.compute_start, color="tab:blue",
                    label=None if comp_shown else "compute")
            comp_shown = True
    ax.set_yticks(range(len(ordered)))
    ax.set_yticklabels([f"node {r.node} (L{r.level})" for r in ordered], fontsize="small")
    ax.invert_yaxis()
    ax.set_xlabel("time (s)")
    ax.grid(True, axis="x", alpha=0.3)
    if recv_shown or comp_shown:
        ax.legend(fontsize="small", loc="lower right")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
