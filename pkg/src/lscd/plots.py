"""Figure rendering for reports.

All plots use the Agg backend and write straight to files, so they work
headless and sit next to the TSV output they illustrate.  Layouts are
deterministic: no randomized placement, no timestamps.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .errors import ValidationError  # noqa: E402

_PERIOD_COLORS = {"C1": "#1f77b4", "C2": "#d62728"}
_CLUSTER_CMAP = "tab10"


def _finish(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_sweep(curve, path, title: str = "Threshold sweep") -> Path:
    """Line plot of F1 against the labeled-positive percentile."""
    if not curve:
        raise ValidationError("empty sweep curve")
    xs = [p for p, _ in curve]
    ys = [f for _, f in curve]
    best = max(range(len(ys)), key=lambda i: ys[i])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, ys, marker="o", color="#1f77b4")
    ax.plot([xs[best]], [ys[best]], marker="*", markersize=14, color="#d62728",
            linestyle="none", label=f"best: p={xs[best]:g}, F1={ys[best]:.3f}")
    ax.set_xlabel("percentile labeled positive")
    ax.set_ylabel("F1")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend(loc="lower right")
    return _finish(fig, path)


def _wug_positions(graph, assignment: dict) -> dict:
    """Cluster centers spread on a circle, members on a ring around theirs."""
    clusters: dict[int, list[str]] = {}
    for node in graph.node_ids():
        clusters.setdefault(assignment[node], []).append(node)
    n_clusters = len(clusters)
    positions = {}
    for ci, label in enumerate(sorted(clusters)):
        members = clusters[label]
        if n_clusters == 1:
            cx, cy = 0.0, 0.0
        else:
            angle = 2 * math.pi * ci / n_clusters
            cx, cy = 2.2 * math.cos(angle), 2.2 * math.sin(angle)
        radius = 0.9 * math.sqrt(len(members)) / (1 + math.sqrt(len(members)))
        for ni, node in enumerate(members):
            theta = 2 * math.pi * ni / len(members)
            positions[node] = (cx + radius * math.cos(theta),
                              cy + radius * math.sin(theta))
    return positions


def plot_wug(graph, assignment: dict, path, threshold: float = 2.5) -> Path:
    """Node-link picture of a clustered usage graph.

    Nodes are colored by cluster and shaped by period; edges at or above
    the relatedness threshold are drawn solid, the rest dashed and faint.
    """
    nodes = graph.node_ids()
    if not nodes:
        raise ValidationError(f"graph for {graph.lemma!r} has no usages")
    missing = [n for n in nodes if n not in assignment]
    if missing:
        raise ValidationError(f"assignment misses {len(missing)} nodes")
    pos = _wug_positions(graph, assignment)
    cmap = plt.get_cmap(_CLUSTER_CMAP)
    fig, ax = plt.subplots(figsize=(6, 6))
    for (a, b), weight in sorted(graph.edges.items()):
        xa, ya = pos[a]
        xb, yb = pos[b]
        if weight >= threshold:
            style = dict(color="#444444", linestyle="-",
                         alpha=0.25 + 0.15 * (weight - threshold),
                         linewidth=0.8 + 0.4 * (weight - threshold))
        else:
            style = dict(color="#999999", linestyle=":", alpha=0.25, linewidth=0.6)
        ax.plot([xa, xb], [ya, yb], zorder=1, **style)
    seen_periods = set()
    for node in nodes:
        x, y = pos[node]
        period = graph.nodes[node].period
        marker = "o" if period == "C1" else "s"
        label = period if period not in seen_periods else None
        seen_periods.add(period)
        ax.scatter([x], [y], s=90, marker=marker,
                   color=cmap(assignment[node] % 10),
                   edgecolors="black", linewidths=0.5, zorder=2, label=label)
    n_clusters = len(set(assignment[n] for n in nodes))
    ax.set_title(f"{graph.lemma}: {len(nodes)} usages, {n_clusters} clusters")
    ax.set_aspect("equal")
    ax.axis("off")
    if seen_periods:
        handles, labels = ax.get_legend_handles_labels()
        for h in handles:
            h.set_facecolor("white")
        ax.legend(handles, labels, loc="upper right", title="period")
    return _finish(fig, path)


def plot_metrics(report, path) -> Path:
    """Bar chart of every metric in an evaluation report."""
    bars = []
    for task in sorted(report.results):
        for metric, value in sorted(report.results[task].items()):
            bars.append((f"{task}\n{metric}", value))
    if not bars:
        raise ValidationError("report holds no defined metrics to plot")
    labels = [b[0] for b in bars]
    values = [b[1] for b in bars]
    fig, ax = plt.subplots(figsize=(1.2 + 1.1 * len(bars), 4))
    colors = ["#1f77b4" if v >= 0 else "#d62728" for v in values]
    ax.bar(range(len(bars)), values, color=colors)
    for i, v in enumerate(values):
        ax.annotate(f"{v:.3f}", (i, v), textcoords="offset points",
                    xytext=(0, 4 if v >= 0 else -12), ha="center", fontsize=8)
    ax.set_xticks(range(len(bars)))
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylim(min(-0.05, min(values) - 0.1), max(1.05, max(values) + 0.1))
    ax.axhline(0, color="black", linewidth=0.6)
    ax.set_ylabel("score")
    ax.set_title(f"phase {report.phase} evaluation")
    ax.grid(axis="y", alpha=0.3)
    return _finish(fig, path)
