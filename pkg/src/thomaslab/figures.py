"""Figure rendering for the CLI report path.

Each function draws one report type and writes a PNG next to the delimited
output.  The Agg backend is forced so rendering works headless.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_trajectory(traj, path: str, b: float) -> None:
    fig = plt.figure(figsize=(9, 4))
    ax1 = fig.add_subplot(1, 2, 1)
    for i, lbl in enumerate("xyz"):
        ax1.plot(traj.times, traj.states[:, i], lw=0.6, label=lbl)
    ax1.set_xlabel("t")
    ax1.set_ylabel("coordinate")
    ax1.legend(loc="upper right", fontsize=8)
    ax2 = fig.add_subplot(1, 2, 2)
    ax2.plot(traj.states[:, 0], traj.states[:, 2], lw=0.3)
    ax2.set_xlabel("x")
    ax2.set_ylabel("z")
    fig.suptitle(f"trajectory, b = {b:g}")
    _save(fig, path)


def plot_equilibria(equilibria, path: str, b: float) -> None:
    xs = np.array([e.x_star for e in equilibria])
    span = max(np.pi, 1.2 / b if b > 0 else np.pi)
    grid = np.linspace(-span, span, 2000)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(grid, np.sin(grid), lw=1, label="sin(x)")
    ax.plot(grid, b * grid, lw=1, label=f"{b:g} x")
    stable = [e.x_star for e in equilibria
              if e.klass.value in ("stable_node", "stable_spiral")]
    other = [e.x_star for e in equilibria
             if e.klass.value not in ("stable_node", "stable_spiral")]
    ax.plot(other, np.sin(other), "x", color="tab:red", ms=7, label="unstable")
    if stable:
        ax.plot(stable, np.sin(stable), "o", color="tab:green", ms=6,
                label="stable")
    ax.set_xlabel("x")
    ax.legend(fontsize=8)
    ax.set_title(f"fixed points of b x = sin x, b = {b:g} ({xs.size} roots)")
    _save(fig, path)


def plot_bifurcations(events, path: str) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    styles = {"pitchfork": ("tab:blue", "s"),
              "hopf": ("tab:red", "o"),
              "double_saddle_node": ("tab:green", "^")}
    for kind, (color, marker) in styles.items():
        es = [e for e in events if e.kind.value == kind]
        if es:
            ax.plot([e.b_critical for e in es], [e.x_star for e in es],
                    marker, color=color, ls="none", label=kind)
    ax.set_xlabel("b_critical")
    ax.set_ylabel("x*")
    ax.set_xscale("log")
    ax.legend(fontsize=8)
    ax.set_title("bifurcation events")
    _save(fig, path)


def plot_lyapunov(reports, path: str) -> None:
    rows = sorted((r for r in reports if r.error is None), key=lambda r: r.b)
    bs = np.array([r.b for r in rows])
    lams = np.array([r.exponents for r in rows])
    dky = np.array([r.d_ky for r in rows])
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    for i in range(3):
        ax1.plot(bs, lams[:, i], ".-", ms=3, lw=0.7, label=f"lambda{i + 1}")
    ax1.axhline(0.0, color="k", lw=0.5)
    ax1.set_ylabel("exponent")
    ax1.legend(fontsize=8)
    ax2.plot(bs, dky, ".-", ms=3, lw=0.7, color="tab:purple")
    ax2.set_xlabel("b")
    ax2.set_ylabel("D_KY")
    _save(fig, path)


def plot_section(hits, path: str, b: float) -> None:
    pts = np.array([h.state for h in hits]) if hits else np.empty((0, 3))
    up = np.array([h.direction.value == "up" for h in hits], dtype=bool)
    fig, ax = plt.subplots(figsize=(6, 5))
    if pts.size:
        ax.plot(pts[up, 0], pts[up, 1], ".", ms=2, label="up")
        ax.plot(pts[~up, 0], pts[~up, 1], ".", ms=2, label="down")
        ax.legend(fontsize=8)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(f"section sin(x) = b z, b = {b:g} ({pts.shape[0]} hits)")
    _save(fig, path)


def plot_sweep(rows, path: str, record: str) -> None:
    fig, ax = plt.subplots(figsize=(8, 5))
    for r in rows:
        if r.values.size:
            ax.plot(np.full(r.values.size, r.b), r.values, ",", color="k")
    ax.set_xlabel("b")
    ax.set_ylabel(record)
    ax.set_title("section coordinates vs damping")
    _save(fig, path)


def plot_walk(stats, path: str) -> None:
    curve = [(l, v) for l, v in stats.msd_curve if l > 0 and v > 0]
    fig, ax = plt.subplots(figsize=(6, 5))
    if curve:
        lags = np.array([p[0] for p in curve])
        vals = np.array([p[1] for p in curve])
        ax.loglog(lags, vals, "o-", ms=3, lw=0.8, label="MSD")
        ax.loglog(lags, 6.0 * stats.diffusion_estimate * lags, "--", lw=0.8,
                  label="6 D t")
        ax.legend(fontsize=8)
    ax.set_xlabel("lag")
    ax.set_ylabel("MSD")
    ax.set_title(f"mean speed {stats.mean_speed:.4f}, "
                 f"D = {stats.diffusion_estimate:.4f}")
    _save(fig, path)


def plot_density(report, path: str) -> None:
    c0 = np.asarray(report.counts_initial, dtype=float)
    c1 = np.asarray(report.counts_final, dtype=float)
    mid = c0.shape[2] // 2
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    vmax = max(c0.max(), c1.max())
    ax1.imshow(c0[:, :, mid], vmin=0, vmax=vmax)
    ax1.set_title("initial (mid slice)")
    im = ax2.imshow(c1[:, :, mid], vmin=0, vmax=vmax)
    ax2.set_title(f"final, max drift {report.max_cell_drift:.3f}")
    fig.colorbar(im, ax=(ax1, ax2), shrink=0.8)
    fig.savefig(path, dpi=130)
    plt.close(fig)
