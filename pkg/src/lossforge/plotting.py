"""Static SVG diagrams: simplex cell partitions (n = 3) and link envelopes
(d = 2)."""

from __future__ import annotations

from fractions import Fraction
from math import sqrt

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.patches import Polygon as MplPolygon

from .discrete import DiscreteLoss, level_set_polyhedron
from .geometry import enumerate_vertices
from .link import u_grid

_CORNERS = ((0.0, 0.0), (1.0, 0.0), (0.5, sqrt(3) / 2))


def _project(p) -> tuple:
    x = sum(float(v) * c[0] for v, c in zip(p, _CORNERS))
    y = sum(float(v) * c[1] for v, c in zip(p, _CORNERS))
    return x, y


def _hull_order(points):
    cx = sum(x for x, _ in points) / len(points)
    cy = sum(y for _, y in points) / len(points)
    from math import atan2

    return sorted(points, key=lambda q: atan2(q[1] - cy, q[0] - cx))


def simplex_cells_svg(loss: DiscreteLoss, path):
    """Cells of the property elicited by a 3-outcome discrete loss, drawn in
    barycentric coordinates."""
    if loss.space.n != 3:
        raise ValueError("simplex diagrams need exactly 3 outcomes")
    fig, ax = plt.subplots(figsize=(6, 6))
    cmap = plt.colormaps["tab20"]
    for idx, report in enumerate(loss.reports):
        cell = level_set_polyhedron(loss, report)
        verts = enumerate_vertices(cell)
        if len(verts) < 3:
            continue
        pts = _hull_order([_project(v) for v in verts])
        ax.add_patch(
            MplPolygon(pts, closed=True, facecolor=cmap(idx % 20), edgecolor="black", alpha=0.7)
        )
        cx = sum(x for x, _ in pts) / len(pts)
        cy = sum(y for _, y in pts) / len(pts)
        ax.text(cx, cy, report, ha="center", va="center", fontsize=8)
    for label, corner in zip(loss.space.labels, _CORNERS):
        ax.annotate(label, corner, fontsize=10, fontweight="bold")
    ax.set_xlim(-0.1, 1.1)
    ax.set_ylim(-0.1, 1.0)
    ax.set_aspect("equal")
    ax.axis("off")
    fig.savefig(path, format="svg", bbox_inches="tight")
    plt.close(fig)


def link_envelope_svg(link, embedding, path, box=(-2, 2), res=Fraction(1, 8)):
    """Regions of u-space by linked report for a d = 2 link, embedding
    points drawn bold."""
    grid = u_grid(2, box, res)
    reports = sorted({link(u) for u in grid})
    index = {r: i for i, r in enumerate(reports)}
    fig, ax = plt.subplots(figsize=(6, 6))
    cmap = plt.colormaps["tab10"]
    xs = [float(u[0]) for u in grid]
    ys = [float(u[1]) for u in grid]
    cs = [cmap(index[link(u)] % 10) for u in grid]
    ax.scatter(xs, ys, c=cs, s=6, marker="s", linewidths=0)
    if embedding is not None:
        for r, u in embedding.points:
            ax.plot(float(u[0]), float(u[1]), "k.", markersize=12)
            ax.annotate(r, (float(u[0]), float(u[1])), fontsize=9, fontweight="bold",
                        xytext=(4, 4), textcoords="offset points")
    handles = [plt.Line2D([], [], marker="s", linestyle="", color=cmap(index[r] % 10), label=r)
               for r in reports]
    ax.legend(handles=handles, loc="upper right", fontsize=7)
    ax.set_xlim(float(box[0]) - 0.1, float(box[1]) + 0.1)
    ax.set_ylim(float(box[0]) - 0.1, float(box[1]) + 0.1)
    ax.set_aspect("equal")
    fig.savefig(path, format="svg", bbox_inches="tight")
    plt.close(fig)
