"""CSV tables, JSON reports, and the figures rendered next to them."""

from __future__ import annotations

import json
import os

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["write_csv", "write_json", "fig_multiplier", "fig_tightness",
           "fig_kernel_slices", "fig_frame_trend"]


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def write_json(path, payload):
    with open(path, "w") as fh:
        if isinstance(payload, str):
            fh.write(payload)
        else:
            json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return path


def fig_multiplier(path, profile, a, analysis, eval_multiplier):
    lam = np.exp(np.linspace(0.0, np.log(a * a), 600, endpoint=False))
    vals, _ = eval_multiplier(profile, a, lam)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogx(lam, vals, lw=1.2)
    ax.axhline(analysis.A, color="tab:red", ls="--", lw=0.8, label=f"A = {analysis.A:.6f}")
    ax.axhline(analysis.B, color="tab:green", ls="--", lw=0.8, label=f"B = {analysis.B:.6f}")
    ax.set_xlabel(r"$\lambda$ (one period $[1, a^2]$)")
    ax.set_ylabel(r"$m_F(\lambda)$")
    ax.set_title(f"{profile.name}, a = {a:.6f}, B/A = {analysis.ratio:.6f}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def fig_tightness(path, rows):
    # rows: (a, c, A, B, ratio_minus_1, c2logc, bounded_ratio)
    rows = sorted(rows, key=lambda r: r[1])
    c = [r[1] for r in rows]
    dev = [max(r[4], 1e-18) for r in rows]
    env = [r[5] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(c, dev, "o-", label="B/A - 1")
    ax.loglog(c, env, "s--", label=r"$c^2 \log(1/c)$")
    ax.set_xlabel("c = 2 log a")
    ax.set_ylabel("deviation from tightness")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def fig_kernel_slices(path, kernel):
    grid = kernel.grid
    n = grid.group.n
    fig, axes = plt.subplots(1, n, figsize=(4 * n, 3.2), squeeze=False)
    for ax_i in range(n):
        idx = [c // 2 for c in grid.counts]
        idx[ax_i] = slice(None)
        xs = grid.axis(ax_i)
        axes[0][ax_i].plot(xs, kernel.values[tuple(idx)], lw=1.0)
        axes[0][ax_i].set_xlabel(f"axis {ax_i}")
        axes[0][ax_i].axhline(0, color="k", lw=0.4)
    fig.suptitle("wavelet slices through the origin")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def fig_frame_trend(path, report):
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6))
    bs = report.b_list
    axes[0].semilogx(bs, report.ratio, "o-")
    axes[0].axhline(report.B_spectral / report.A_spectral, color="tab:red", ls="--",
                    lw=0.8, label="spectral B/A")
    axes[0].set_xlabel("b")
    axes[0].set_ylabel(r"$\hat B_b/\hat A_b$")
    axes[0].invert_xaxis()
    axes[0].legend(fontsize=8)
    if report.deviation:
        bd = sorted(report.deviation.keys(), reverse=True)
        axes[1].loglog(bd, [max(report.deviation[b], 1e-300) for b in bd], "o-")
        axes[1].set_xlabel("b")
        axes[1].set_ylabel("D(b)")
        axes[1].set_title(f"slope = {report.fitted_slope:.2f}")
    else:
        axes[1].axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
