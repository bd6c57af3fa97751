"""Figure rendering for the CLI report path (Agg backend, files only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .hartman import Fig1Result, HartmanScanRow
from .numerics import ComplexField


def save_field_plot(field: ComplexField, path, title: str, xlabel: str = "x") -> None:
    x = field.grid.points()
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(x, np.abs(field.values), "k-", lw=1.6, label="modulus")
    ax.plot(x, field.values.real, "C0--", lw=1.0, label="real part")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("amplitude")
    ax.set_title(title)
    ax.legend(frameon=False)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_fig1_plot(result: Fig1Result, path) -> None:
    x = result.exact.grid.points()
    fig, ax = plt.subplots(figsize=(9, 5))
    ax.plot(x, np.abs(result.exact.values), "k-", lw=1.8, label="|exact| x Z2")
    ax.plot(x, result.exact.values.real, "k--", lw=1.4, label="Re exact x Z2")
    ax.plot(x, np.abs(result.approx.values), "C3-.", lw=1.2, label="|approx| x Z2")
    ax.plot(x, result.approx.values.real, "C3:", lw=1.2, label="Re approx x Z2")
    ax.plot(x, np.abs(result.free_initial.values), "C0-", lw=0.9, label="|free(0)| x Z1")
    ax.plot(x, np.abs(result.free_final.values), "C0--", lw=0.9, label="|free(t)| x Z1")
    ax.set_xlabel("x")
    ax.set_ylabel("rescaled envelope")
    ax.set_title(
        "transmitted envelope, exact vs linear expansion "
        f"(advancement {result.metadata['advancement_exact']:.0f})"
    )
    ax.legend(frameon=False, fontsize=9)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_scan_plot(rows: list[HartmanScanRow], path) -> None:
    ok = [r for r in rows if not r.failed]
    fig, axes = plt.subplots(1, 3, figsize=(13, 4))
    d = [r.d for r in ok]
    axes[0].plot(d, [r.advancement / r.d for r in ok], "ko-")
    axes[0].set_xscale("log")
    axes[0].set_xlabel("barrier width d")
    axes[0].set_ylabel("advancement / d")
    axes[1].plot(d, [r.width / r.advancement for r in ok], "ko-", label="width/advancement")
    axes[1].set_xscale("log")
    axes[1].set_xlabel("barrier width d")
    axes[1].set_ylabel("width / advancement")
    axes[2].plot(d, [r.log10_trans_prob for r in ok], "ko-", label="log10 P^T")
    axes[2].plot(d, [r.log10_bound for r in ok], "C3s--", label="log10 bound")
    axes[2].set_xscale("log")
    axes[2].set_xlabel("barrier width d")
    axes[2].set_ylabel("log10 probability")
    axes[2].legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_barrier_scan_plot(ds, phase_times, re_shift_over_d, path) -> None:
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    axes[0].plot(ds, phase_times, "ko-")
    axes[0].set_xscale("log")
    axes[0].set_xlabel("barrier width d")
    axes[0].set_ylabel("phase time")
    axes[1].plot(ds, re_shift_over_d, "ko-")
    axes[1].set_xscale("log")
    axes[1].set_xlabel("barrier width d")
    axes[1].set_ylabel("Re shift / d")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_overlay_plot(x, curves: dict[str, np.ndarray], path, title: str, xlabel: str = "x") -> None:
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for label, values in curves.items():
        ax.plot(x, values, lw=1.3, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("value")
    ax.set_title(title)
    ax.legend(frameon=False, fontsize=9)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
