"""Figures written next to the JSON reports (PNG/PDF/SVG, chosen by file suffix)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .certify import Certificate  # noqa: E402
from .graph import FULL_MATRIX_LIMIT, UNREACHABLE, Graph, all_pairs_distances, eccentricities  # noqa: E402

FIG_WIDTH = 7.0
FSIZE_SMALL = 8
FSIZE_MEDIUM = 10


def set_style() -> None:
    plt.rc("font", size=FSIZE_SMALL)
    plt.rc("axes", titlesize=FSIZE_MEDIUM, labelsize=FSIZE_SMALL, linewidth=0.6)
    plt.rc("xtick", labelsize=FSIZE_SMALL)
    plt.rc("ytick", labelsize=FSIZE_SMALL)
    plt.rc("legend", fontsize=FSIZE_SMALL, frameon=False)
    plt.rc("savefig", dpi=150, bbox="tight")


def _save(fig, path: str | Path) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path)
    plt.close(fig)
    return str(path)


def plot_certificate_chain(cert: Certificate, path: str | Path) -> str:
    """Per level: computed diameter against its bound, and the certified color bound."""
    set_style()
    levels, bounds, computed, trusted, chi = [], [], [], [], []
    for step in cert.steps:
        if step.claim.kind == "DiameterUpper":
            levels.append(_level(step.claim.graph))
            bounds.append(step.claim.value)
            computed.append(step.evidence.get("computed_diameter"))
            trusted.append(step.rule == "PaperTrusted")
        elif step.claim.kind == "ChiRhoLower" and step.rule == "DisjointCopies":
            chi.append(step.claim.value)

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(FIG_WIDTH, FIG_WIDTH * 0.38))
    ax1.plot(levels, bounds, "k--", lw=1, label="bound 2k+6")
    xs = [k for k, d in zip(levels, computed) if d is not None]
    ys = [d for d in computed if d is not None]
    ax1.plot(xs, ys, "o", ms=4, color="C0", label="BFS diameter")
    tx = [k for k, t in zip(levels, trusted) if t]
    if tx:
        ax1.plot(tx, [b for b, t in zip(bounds, trusted) if t], "x", color="C3", label="taken on trust")
    ax1.set_xlabel("level k")
    ax1.set_ylabel("diameter")
    ax1.legend()

    ax2.plot(levels, chi, "s-", ms=4, color="C2", lw=1, label="certified lower bound")
    ax2.plot(levels, [2 * k + 9 for k in levels], "k:", lw=1, label="2k+9")
    ax2.set_xlabel("level k")
    ax2.set_ylabel("packing chromatic number >=")
    ax2.legend()
    for ax in (ax1, ax2):
        ax.set_xticks(levels)
    fig.suptitle(f"{cert.conclusion} ({cert.trust_level})", fontsize=FSIZE_MEDIUM)
    return _save(fig, path)


def _level(graph_id: str) -> int:
    return int(graph_id[1:])


def plot_distance_profile(g: Graph, path: str | Path, title: str = "") -> str:
    """Eccentricity histogram and, for graphs small enough for a full matrix, the pair-distance histogram."""
    set_style()
    ecc = eccentricities(g)
    with_pairs = g.n <= FULL_MATRIX_LIMIT
    fig, axes = plt.subplots(1, 2 if with_pairs else 1, figsize=(FIG_WIDTH, FIG_WIDTH * 0.38), squeeze=False)
    ax = axes[0, 0]
    vals, counts = np.unique(ecc, return_counts=True)
    ax.bar(vals, counts, width=0.8, color="C0")
    ax.set_xlabel("eccentricity")
    ax.set_ylabel("vertices")
    ax.set_xticks(vals)
    if with_pairs:
        dm = all_pairs_distances(g)
        upper = dm.dist[np.triu_indices(g.n, 1)]
        upper = upper[upper != UNREACHABLE]
        dv, dc = np.unique(upper, return_counts=True)
        ax = axes[0, 1]
        ax.bar(dv, dc, width=0.8, color="C1")
        ax.set_xlabel("distance")
        ax.set_ylabel("vertex pairs")
        ax.set_xticks(dv)
    if title:
        fig.suptitle(title, fontsize=FSIZE_MEDIUM)
    return _save(fig, path)
