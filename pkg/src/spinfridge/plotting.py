"""Optional figure rendering for CLI report output.

Each function takes already-computed sweep/trajectory data and writes one
PNG next to the delimited output.  All figures use the non-interactive
Agg backend so the CLI works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_trajectory(times, table, bounds, path):
    """Observables and entropies along one traversal of the limit cycle."""
    fig, (ax1, ax2, ax3) = plt.subplots(3, 1, figsize=(7, 9), sharex=True)
    for key in ("E", "L", "C", "D"):
        ax1.plot(times, table[key], label=key)
    ax1.set_ylabel("observable")
    ax1.legend(loc="best", fontsize=8)
    ax2.plot(times, table["S_vn"], label="S_vn")
    ax2.plot(times, table["S_E"], label="S_E", ls="--")
    ax2.set_ylabel("entropy")
    ax2.legend(loc="best", fontsize=8)
    ax3.plot(times, table["omega"], label="omega")
    ax3.plot(times, table["Omega"], label="Omega", ls="--")
    ax3.set_ylabel("field")
    ax3.set_xlabel("t")
    ax3.legend(loc="best", fontsize=8)
    for ax in (ax1, ax2, ax3):
        for b in bounds[1:-1]:
            ax.axvline(b, color="0.8", lw=0.8, zorder=0)
    return _save(fig, path)


def plot_frictionless(ls, mus, taus, path):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.5))
    ax1.plot(ls, mus, "o-")
    ax1.set_xlabel("l")
    ax1.set_ylabel("mu_l")
    ax2.plot(ls, taus, "o-")
    ax2.set_xlabel("l")
    ax2.set_ylabel("tau_l")
    return _save(fig, path)


def plot_comb(tau_grid, q_c, ds_u, gamma_p_levels, path):
    """Comb of quantized refrigerating cycles versus total cycle time."""
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    for j, gp in enumerate(gamma_p_levels):
        ax1.plot(tau_grid, np.clip(q_c[j], 0.0, None), ".-",
                 label=f"gamma_p={gp:g}")
        ax2.semilogy(tau_grid, np.abs(ds_u[j]) + 1e-300, ".-")
    ax1.set_ylabel("Q_c (clipped at 0)")
    ax1.legend(loc="best", fontsize=8)
    ax2.set_ylabel("|dS_u|")
    ax2.set_xlabel("tau_cyc")
    return _save(fig, path)


def plot_min_temp(values, t_min, path, xlabel="l"):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(values, t_min, "o-")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("T_c_min")
    return _save(fig, path)


def plot_j_scaling(axis, collapse, J_values, path):
    """log P_c - 2 log J versus J/T_c; curves coincide under J^2 scaling."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for r, J in enumerate(J_values):
        ax.plot(axis, collapse[r], "o-", label=f"J={J:g}")
    ax.set_xlabel("J / T_c")
    ax.set_ylabel("log P_c - 2 log J")
    ax.legend(loc="best", fontsize=8)
    return _save(fig, path)
