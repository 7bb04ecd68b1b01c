"""Ternary phase portrait of a sweep, written as a reproducible SVG."""

import logging
import math
from pathlib import Path

import matplotlib
from matplotlib.figure import Figure
from matplotlib.patches import Patch, Polygon, RegularPolygon

from ska_sdp_double_bubble.configuration.config import PHASE_COLOURS
from ska_sdp_double_bubble.phase.sweep import PhaseCell, PhaseTable

logger = logging.getLogger(__name__)

EMPTY_COLOUR = "#dddddd"
SVG_SALT = "ska-sdp-double-bubble"
SQRT3 = math.sqrt(3.0)


def barycentric_to_xy(f1: float, f2: float, f3: float) -> tuple[float, float]:
    """Place the fractions in a unit triangle: v1 at the left, v2 at the right, v3 on top."""
    total = f1 + f2 + f3
    return (f2 + 0.5 * f3) / total, (SQRT3 / 2.0) * f3 / total


def _on_grid(cell: PhaseCell, table: PhaseTable) -> bool:
    ratios = (cell.v1 / (table.det * table.step), cell.v2 / (table.det * table.step))
    return all(abs(r - round(r)) < 1e-6 for r in ratios)


def _cell_patch(cell: PhaseCell, table: PhaseTable) -> RegularPolygon:
    fine = table.refine_step or table.step / 2.0
    spacing = table.step if _on_grid(cell, table) else fine
    centre = barycentric_to_xy(cell.v1, cell.v2, cell.v3)
    colours = [PHASE_COLOURS.get(code, EMPTY_COLOUR) for code in cell.winners] or [EMPTY_COLOUR]
    patch = RegularPolygon(
        centre,
        numVertices=6,
        radius=spacing / SQRT3,
        facecolor=colours[0],
        edgecolor=colours[1] if len(colours) > 1 else colours[0],
        linewidth=0.0 if len(colours) == 1 else 0.5,
    )
    if len(colours) > 1:
        patch.set_hatch("///")
    return patch


def render_ternary(table: PhaseTable, path: Path | str, title: str | None = None) -> Path:
    """
    Draw one hexagon per cell coloured by its winner; co-winner cells are hatched.

    The output bytes depend only on the table.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context({"svg.hashsalt": SVG_SALT, "svg.fonttype": "none"}):
        figure = Figure(figsize=(7.0, 6.5))
        axes = figure.add_subplot()
        axes.set_aspect("equal")
        axes.axis("off")

        cells = table.sorted_cells()
        # refined cells go on top of the coarse ones
        for cell in sorted(cells, key=lambda c: _on_grid(c, table), reverse=True):
            axes.add_patch(_cell_patch(cell, table))

        outline = Polygon(
            [(0.0, 0.0), (1.0, 0.0), (0.5, SQRT3 / 2.0)], closed=True, fill=False, linewidth=1.0
        )
        axes.add_patch(outline)
        axes.text(-0.03, -0.04, "v1", ha="right")
        axes.text(1.03, -0.04, "v2", ha="left")
        axes.text(0.5, SQRT3 / 2.0 + 0.03, "v3", ha="center")
        axes.set_xlim(-0.1, 1.1)
        axes.set_ylim(-0.1, SQRT3 / 2.0 + 0.1)

        handles = [Patch(facecolor=colour, label=code) for code, colour in PHASE_COLOURS.items()]
        axes.legend(handles=handles, loc="upper right", fontsize="small", frameon=False)
        if title:
            axes.set_title(title)
        figure.savefig(path, format="svg", metadata={"Date": None})
    logger.info("Wrote phase portrait of %d cell(s) to %s", len(cells), path)
    return path
