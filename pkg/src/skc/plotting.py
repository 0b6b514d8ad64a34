"""Figures for ``skc bench --figures``. Needs matplotlib (``pip install .[plot]``)."""

from __future__ import annotations

import math
import os

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_bench_figures(result, outdir) -> list[str]:
    """Write error-vs-depth and length-vs-accuracy plots; return the paths."""
    plt = _pyplot()
    os.makedirs(outdir, exist_ok=True)
    recs = result.records
    depths = sorted({r.n for r in recs})
    paths = []

    fig, ax = plt.subplots(figsize=(5, 3.6))
    med = [np.median([r.measured_eps for r in recs if r.n == n]) for n in depths]
    for tid in sorted({r.target_id for r in recs}):
        pts = sorted((r.n, r.measured_eps) for r in recs if r.target_id == tid)
        ax.semilogy([p[0] for p in pts], [max(p[1], 1e-16) for p in pts], color="0.75", lw=0.8)
    ax.semilogy(depths, med, "o-", color="C0", label="median measured")
    pred = [r.predicted_eps for r in recs if r.target_id == recs[0].target_id]
    if all(p is not None for p in pred):
        ax.semilogy(depths, pred, "s--", color="C3", label="predicted")
    ax.set_xlabel("recursion depth n")
    ax.set_ylabel(r"$\epsilon_n$ (operator norm)")
    ax.legend(frameon=False)
    fig.tight_layout()
    path = os.path.join(outdir, "error_vs_depth.png")
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(5, 3.6))
    pts = [(math.log(1 / r.measured_eps), r.simplified_length, r.raw_length) for r in recs
           if 1e-10 < r.measured_eps < 1]
    if pts:
        x = np.array([p[0] for p in pts])
        ax.loglog(x, [p[2] for p in pts], "o", ms=3, color="C1", label="raw")
        ax.loglog(x, [p[1] for p in pts], "o", ms=3, color="C0", label="simplified")
        slope = result.fits.get("length_exponent_simplified")
        if slope is not None:
            ax.set_title(f"fitted exponent {slope:.2f} (asymptote 3.97)", fontsize=9)
    ax.set_xlabel(r"$\ln(1/\epsilon)$")
    ax.set_ylabel("sequence length")
    ax.legend(frameon=False)
    fig.tight_layout()
    path = os.path.join(outdir, "length_vs_accuracy.png")
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    paths.append(path)
    return paths
