"""Figure rendering for the report path.

matplotlib is imported lazily with the Agg backend so library users who
never ask for figures do not pay the import.
"""

from __future__ import annotations

import numpy as np


def _plt():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def save_steady_states(path, grid, u_d=None, v_D=None):
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    if u_d is not None:
        ax.plot(grid.nodes, u_d, label="u_d", lw=1.6)
    if v_D is not None:
        ax.plot(grid.nodes, v_D, label="v_D", lw=1.6, ls="--")
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    ax.set_title("single-species steady states")
    ax.legend(frameon=False)
    fig.savefig(path, bbox_inches="tight", dpi=130)
    plt.close(fig)


def save_diagnostics(path, diagnostics_list, labels=None):
    """Order fractions, energy, and attractor distance for a batch of runs."""
    plt = _plt()
    fig, axes = plt.subplots(1, 3, figsize=(11.5, 3.4))
    for i, diag in enumerate(diagnostics_list):
        label = labels[i] if labels else f"run {i}"
        axes[0].plot(diag.times, diag.theta, lw=1.1, label=label)
        axes[0].plot(diag.times, diag.eta, lw=1.1, ls="--")
        with np.errstate(invalid="ignore"):
            axes[1].semilogy(diag.times, np.maximum(diag.energy, 1e-300), lw=1.1)
            axes[2].semilogy(diag.times, np.maximum(diag.sup_dist, 1e-300), lw=1.1)
    axes[0].set_title("order fractions (theta solid, eta dashed)")
    axes[1].set_title("energy E(t)")
    axes[2].set_title("sup distance to predicted attractor")
    for ax in axes:
        ax.set_xlabel("t")
    if labels and len(labels) <= 8:
        axes[0].legend(frameon=False, fontsize=7)
    fig.savefig(path, bbox_inches="tight", dpi=130)
    plt.close(fig)


def save_final_states(path, grid, finals):
    """Final (u, v) profiles of a batch of runs."""
    plt = _plt()
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.4), sharex=True)
    for u, v in finals:
        axes[0].plot(grid.nodes, u, lw=1.0)
        axes[1].plot(grid.nodes, v, lw=1.0)
    axes[0].set_title("final u")
    axes[1].set_title("final v")
    for ax in axes:
        ax.set_xlabel("x")
    fig.savefig(path, bbox_inches="tight", dpi=130)
    plt.close(fig)


def save_sweep_map(path, x_name, x_values, y_name, y_values, case_grid, case_names):
    """Classification map over a two-parameter sweep."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5.4, 4.4))
    mesh = ax.pcolormesh(
        x_values,
        y_values,
        case_grid,
        cmap="viridis",
        vmin=-0.5,
        vmax=len(case_names) - 0.5,
        shading="nearest",
    )
    cbar = fig.colorbar(mesh, ax=ax, ticks=range(len(case_names)))
    cbar.ax.set_yticklabels(case_names, fontsize=7)
    ax.set_xlabel(x_name)
    ax.set_ylabel(y_name)
    ax.set_title("classification")
    fig.savefig(path, bbox_inches="tight", dpi=130)
    plt.close(fig)
