"""Figure rendering for the command line reports.

Every report path emits PNG figures next to its CSV/JSON artifacts. Data
files are the deterministic contract; figures are a convenience view.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def remainder_loglog(path, times, e_sup, slope, intercept):
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    t = np.asarray(times)
    ax.loglog(t, e_sup, "x", ms=4, label="sup-norm remainder")
    ax.loglog(t, np.exp(intercept) * t**slope, "-", lw=1.2, color="darkred",
              label=f"fit, slope {slope:.4f}")
    ax.loglog(t, np.exp(intercept) * t**-1.5, "--", lw=1.0, color="gray",
              label="slope -3/2")
    ax.set_xlabel("t")
    ax.set_ylabel("E(t)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def cubic_overlay(path, xi, p_tilde, p_theory):
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    ax.plot(xi, p_tilde, "o", ms=3, mfc="none", label="measured")
    ax.plot(xi, p_theory, "-", lw=1.2, color="darkred", label="odd cubic")
    ax.set_xlabel("scaled offset")
    ax.set_ylabel("rescaled deviation")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def delay_fits(path, fits):
    """fits: list of dicts with keys m, times, delay, a_hat, b_hat."""
    fig, ax = plt.subplots(figsize=(5.6, 4.2))
    for f in fits:
        t = np.asarray(f["times"])
        (line,) = ax.semilogx(t, f["delay"], ".", ms=2.5, label=f"m = {f['m']:g}")
        ax.semilogx(t, f["a_hat"] * np.log(t) + f["b_hat"], "-", lw=1.0,
                    color=line.get_color())
    ax.set_xlabel("t")
    ax.set_ylabel("delay behind the linear ray")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def profile_overlay(path, profiles):
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    for p in profiles:
        ax.plot(p.offsets, p.values, lw=1.0, label=f"t = {p.t:g}")
    ax.set_xlabel("offset from the interpolated midlevel")
    ax.set_ylabel("u")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def barrier_regions(path, reports):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    labels = [f"{r.barrier[:2]}-{r.name}@{r.t:g}" for r in reports]
    lo = [r.min_residual for r in reports]
    hi = [r.max_residual for r in reports]
    xs = np.arange(len(reports))
    colors = ["tab:green" if r.ok else "tab:red" for r in reports]
    ax.vlines(xs, lo, hi, colors=colors, lw=4)
    ax.axhline(0.0, color="k", lw=0.6)
    ax.set_xticks(xs, labels, rotation=60, fontsize=7, ha="right")
    ax.set_yscale("symlog", linthresh=1e-16)
    ax.set_ylabel("residual range")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def heat_ratio(path, ys, ratios, target):
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    ax.plot(ys, ratios, "o", ms=4, label="quadrature")
    ax.axhline(target, color="darkred", lw=1.0, label="first-moment prediction")
    ax.set_xlabel("y")
    ax.set_ylabel("rescaled kernel ratio")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def continuum_delay(path, times, delay, a_hat, b_hat):
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    ax.semilogx(times, delay, ".", ms=2.5, label="measured delay")
    ax.semilogx(times, a_hat * np.log(times) + b_hat, "-", lw=1.0, color="darkred",
                label=f"fit, slope {a_hat:.4f}")
    ax.set_xlabel("t")
    ax.set_ylabel("delay")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
