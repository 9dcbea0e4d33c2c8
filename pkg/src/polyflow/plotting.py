"""Static SVG summary of a flow run."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

SNAPSHOT_FRACTIONS = (0.0, 1 / 3, 2 / 3, 1.0)


def pick_snapshots(snapshots, fractions=SNAPSHOT_FRACTIONS):
    """Snapshots closest to the given fractions of the final step."""
    if not snapshots:
        raise ValueError("trajectory has no snapshots")
    steps = np.array([s for s, _ in snapshots])
    last = steps[-1]
    picked = []
    for f in fractions:
        k = int(np.argmin(np.abs(steps - f * last)))
        picked.append(snapshots[k])
    return picked


def _closed(z):
    z = np.asarray(z, dtype=complex)
    return np.append(z, z[:1])


def render_flow_svg(path, steps, areas, dev_perimeters, snapshots, title: str | None = None) -> None:
    """Area curve, developed-perimeter curve and four polygon snapshots.

    Infinite developed perimeters are plotted as gaps.  Each snapshot is
    drawn inside a group with id ``snapshot-k``.
    """
    steps = np.asarray(steps, dtype=float)
    dev = np.asarray(dev_perimeters, dtype=float).copy()
    dev[~np.isfinite(dev)] = np.nan

    fig = plt.figure(figsize=(11, 6.5))
    grid = fig.add_gridspec(2, 4, height_ratios=[1.0, 1.1])
    ax_area = fig.add_subplot(grid[0, :2])
    ax_dev = fig.add_subplot(grid[0, 2:])

    ax_area.plot(steps, areas, color="tab:blue", lw=1.2)
    ax_area.set_xlabel("step")
    ax_area.set_ylabel("signed area")
    ax_area.grid(alpha=0.3)

    positive = dev[np.isfinite(dev) & (dev > 0)]
    ax_dev.plot(steps, dev, color="tab:red", lw=1.2)
    if positive.size and positive.max() / positive.min() > 1e3:
        ax_dev.set_yscale("log")
    ax_dev.set_xlabel("step")
    ax_dev.set_ylabel("developed perimeter")
    ax_dev.grid(alpha=0.3)

    chosen = pick_snapshots(snapshots)
    allpts = np.concatenate([np.asarray(z) for _, z in chosen])
    span = max(np.ptp(allpts.real), np.ptp(allpts.imag)) * 0.55 + 1e-12
    for k, (step, z) in enumerate(chosen):
        ax = fig.add_subplot(grid[1, k])
        c = np.asarray(z).mean()
        zc = _closed(z)
        (line,) = ax.plot(zc.real, zc.imag, "-o", color="k", ms=3, lw=1.0)
        line.set_gid(f"snapshot-{k}")
        ax.set_xlim(c.real - span, c.real + span)
        ax.set_ylim(c.imag - span, c.imag + span)
        ax.set_aspect("equal")
        ax.set_title(f"step {step}", fontsize=9)
        ax.set_xticks([])
        ax.set_yticks([])

    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def render_trajectory(path, trajectory, title: str | None = None) -> None:
    render_flow_svg(
        path,
        trajectory.steps,
        trajectory.column("area"),
        trajectory.column("developed_perimeter"),
        trajectory.snapshots,
        title=title,
    )
