"""Top-view trajectory figures of one experiment cell, rendered to SVG."""

from __future__ import annotations

import io
from pathlib import Path
from typing import Optional, Sequence

import matplotlib
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure
from matplotlib.patches import Circle, Rectangle

from .engine import TraceRecord
from .world import ArenaSpec, Button

HUMAN_STYLE = dict(color="tab:red", linestyle="-", linewidth=1.5)
ASSISTANT_STYLE = dict(color="tab:blue", linestyle="--", linewidth=1.5)

# fixed so repeated renders are byte-identical
_SVG_RC = {"svg.hashsalt": "shellgame", "svg.fonttype": "path"}


def _pointing_events(trace: Sequence[TraceRecord]) -> list[tuple[TraceRecord, Button]]:
    events, prev = [], None
    for r in trace:
        if r.asst_pointing is not None and r.asst_pointing is not prev:
            events.append((r, r.asst_pointing))
        prev = r.asst_pointing
    return events


def _draw_agent(ax, tag: str, xs: list[float], ys: list[float], style: dict, marker: str) -> None:
    if len(set(zip(xs, ys))) == 1:
        ax.plot(xs[:1], ys[:1], marker="o", color=style["color"], markersize=5, linestyle="none", gid=tag)
    else:
        ax.plot(xs, ys, gid=tag, **style)
    ax.plot(xs[:1], ys[:1], marker=marker, color=style["color"], markersize=8,
            markerfacecolor="white", linestyle="none", gid=f"{tag}-start")


def cell_figure(traces: Sequence[tuple[str, Sequence[TraceRecord]]], arena: ArenaSpec,
                title: Optional[str] = None) -> Figure:
    if not traces:
        raise ValueError("need at least one trace to plot")
    fig = Figure(figsize=(6, 5))
    ax = fig.add_subplot()
    w, h = arena.width, arena.height
    ax.add_patch(Rectangle((-w / 2, -h / 2), w, h, fill=False, color="black", gid="arena"))
    for b in Button:
        p = arena.button(b)
        ax.add_patch(Circle((p.x, p.y), arena.press_radius, fill=False, color="gray", gid=f"button-{b.value}"))
        ax.annotate(b.value, (p.x, p.y), ha="center", va="center", fontsize=12, fontweight="bold")

    for i, (tid, trace) in enumerate(traces):
        _draw_agent(ax, f"human-r{i}", [r.human_pos.x for r in trace], [r.human_pos.y for r in trace],
                    HUMAN_STYLE, "s")
        _draw_agent(ax, f"assistant-r{i}", [r.asst_pos.x for r in trace], [r.asst_pos.y for r in trace],
                    ASSISTANT_STYLE, "^")
        for k, (rec, b) in enumerate(_pointing_events(trace)):
            ax.plot([rec.asst_pos.x], [rec.asst_pos.y], marker="*", color="tab:orange", markersize=12,
                    linestyle="none", gid=f"point-r{i}-{k}")
            ax.annotate(f"points {b.value}", (rec.asst_pos.x, rec.asst_pos.y),
                        xytext=(6, 6), textcoords="offset points", fontsize=8)

    ax.plot([], [], label="human", **HUMAN_STYLE)
    ax.plot([], [], label="assistant", **ASSISTANT_STYLE)
    ax.legend(loc="lower right", fontsize=8)
    ax.set_xlim(-w / 2 - 0.1, w / 2 + 0.1)
    ax.set_ylim(-h / 2 - 0.1, h / 2 + 0.1)
    ax.set_aspect("equal")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    if title:
        ax.set_title(title)
    return fig


def render_svg(traces: Sequence[tuple[str, Sequence[TraceRecord]]], arena: ArenaSpec,
               title: Optional[str] = None) -> str:
    """Standalone SVG document of all replications of one cell."""
    fig = cell_figure(traces, arena, title)
    buf = io.StringIO()
    with matplotlib.rc_context(_SVG_RC):
        FigureCanvasSVG(fig).print_svg(buf, metadata={"Date": None, "Creator": None})
    return buf.getvalue()


def save_svg(traces, arena: ArenaSpec, destination: str | Path, title: Optional[str] = None) -> None:
    Path(destination).write_text(render_svg(traces, arena, title))
