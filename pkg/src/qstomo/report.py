"""Render convergence traces and benchmark tables to figure files.

Everything here consumes the CSV artifacts written by the CLI and produces
static image files next to them; nothing opens a window (Agg backend).
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams.update({"figure.dpi": 120, "font.size": 9, "axes.grid": True,
                     "grid.alpha": 0.3})


def _read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def plot_trace(trace_csv, out_path) -> Path:
    """Distributional distance and step size per sweep, log scale.

    Adds a fidelity curve on a second axis when the trace carries one.
    Returns the written path.
    """
    rows = _read_csv(trace_csv)
    if not rows:
        raise ValueError(f"empty trace: {trace_csv}")
    sweeps = [int(r["sweep"]) for r in rows]
    dist = [float(r["distributional"]) for r in rows]
    step = [float(r["hs_step"]) for r in rows]
    fid = [float(r["fidelity"]) for r in rows if r.get("fidelity")]

    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.semilogy(sweeps, dist, "o-", ms=3.5, label="distributional distance")
    ax.semilogy(sweeps, step, "s--", ms=3.5, label="HS step")
    ax.set_xlabel("sweep")
    ax.set_ylabel("distance")
    if len(fid) == len(sweeps):
        ax2 = ax.twinx()
        ax2.plot(sweeps, fid, "^-", ms=3.5, color="tab:green", label="fidelity")
        ax2.set_ylabel("fidelity to reference")
        ax2.set_ylim(0, 1.05)
        ax2.grid(False)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def plot_bench(bench_csv, out_path) -> Path:
    """Mean runtime and mean sweep count vs dimension, one line per curve.

    Curves are keyed by (family, algorithm); runtime error bars show one
    standard deviation. Returns the written path.
    """
    rows = _read_csv(bench_csv)
    if not rows:
        raise ValueError(f"empty benchmark table: {bench_csv}")
    curves = {}
    for r in rows:
        key = (r["family"], r["algorithm"])
        curves.setdefault(key, []).append(r)

    fig, (ax_t, ax_n) = plt.subplots(1, 2, figsize=(8.4, 3.4))
    for (family, algorithm), pts in sorted(curves.items()):
        pts = sorted(pts, key=lambda r: int(r["d"]))
        ds = [int(r["d"]) for r in pts]
        label = f"{family}/{algorithm}"
        ax_t.errorbar(
            ds,
            [float(r["mean_seconds"]) for r in pts],
            yerr=[float(r["std_seconds"]) for r in pts],
            fmt="o-",
            ms=3.5,
            capsize=2,
            label=label,
        )
        if algorithm == "imposition":
            ax_n.plot(ds, [float(r["mean_sweeps"]) for r in pts], "o-", ms=3.5,
                      label=label)
    ax_t.set_yscale("log")
    ax_t.set_xlabel("dimension d")
    ax_t.set_ylabel("mean seconds per run")
    ax_t.legend(fontsize=8)
    ax_n.set_xlabel("dimension d")
    ax_n.set_ylabel("mean sweeps to converge")
    ax_n.legend(fontsize=8)
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path)
    plt.close(fig)
    return out_path
