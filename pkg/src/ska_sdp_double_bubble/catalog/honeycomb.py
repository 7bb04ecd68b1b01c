"""Three-cell power diagrams on the 60-degree rhombic 2-torus.

The sites are the three cosets of the index-3 sublattice, so every cell is a hexagon
whose edges keep the honeycomb directions; weights only slide the edges, which keeps
all angles at 120 degrees.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import root

from ska_sdp_double_bubble.utilities.errors import InfeasibleSpecError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PowerDiagram:
    """Hexagonal cells of the three sites, vertices in counter-clockwise order."""

    sites: np.ndarray
    weights: np.ndarray
    cells: tuple[np.ndarray, np.ndarray, np.ndarray]
    directions: np.ndarray

    def areas(self) -> np.ndarray:
        """Signed shoelace area of each cell."""
        return np.array([_shoelace(cell) for cell in self.cells])

    def edge_length(self) -> float:
        """Total length of the network (each edge counted once)."""
        perimeters = [
            np.linalg.norm(cell - np.roll(cell, 1, axis=0), axis=1).sum() for cell in self.cells
        ]
        return float(sum(perimeters)) / 2.0

    def walls(self):
        """Yield (start, end, own colour, neighbour colour) once per edge.

        The own cell lies to the left of start -> end.
        """
        for colour, cell in enumerate(self.cells):
            for j in range(6):
                neighbour = _colour_after(colour, j)
                if colour < neighbour:
                    yield cell[j - 1], cell[j], colour, neighbour


def _shoelace(polygon: np.ndarray) -> float:
    x, y = polygon[:, 0], polygon[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _power_centre(points: np.ndarray, weights: np.ndarray) -> np.ndarray:
    matrix = 2.0 * (points[1:] - points[0])
    rhs = np.sum(points[1:] ** 2, axis=1) - np.sum(points[0] ** 2) - (weights[1:] - weights[0])
    return np.linalg.solve(matrix, rhs)


def power_diagram(side: float, weights) -> PowerDiagram:
    """Cells for the sites 0, b1 and b2 of a rhombic torus with period ``side``."""
    b1 = np.array([side / 2.0, side * math.sqrt(3.0) / 6.0])
    b2 = np.array([0.0, side / math.sqrt(3.0)])
    sites = np.stack([np.zeros(2), b1, b2])
    # counter-clockwise neighbour directions, starting at 30 degrees
    directions = np.stack([b1, b2, b2 - b1, -b1, -b2, b1 - b2])
    weights = np.asarray(weights, dtype=float)
    cells = []
    for colour, site in enumerate(sites):
        vertices = []
        for j in range(6):
            first, second = directions[j], directions[(j + 1) % 6]
            triangle = np.stack([site, site + first, site + second])
            colours = [colour, _colour_after(colour, j), _colour_after(colour, (j + 1) % 6)]
            vertices.append(_power_centre(triangle, weights[colours]))
        # edge (j - 1, j) faces direction j
        cells.append(np.array(vertices))
    return PowerDiagram(sites, weights, tuple(cells), directions)


def _colour_after(colour: int, direction: int) -> int:
    return (colour + (1 if direction % 2 == 0 else -1)) % 3


def _edges_forward(diagram: PowerDiagram) -> bool:
    for cell in diagram.cells:
        for j in range(6):
            edge = cell[j] - cell[j - 1]
            normal = diagram.directions[j]
            along = np.array([-normal[1], normal[0]])
            if edge @ along < -1e-12:
                return False
    return True


def solve_honeycomb(side: float, area1: float, area2: float) -> PowerDiagram:
    """
    Weights giving cells 1 and 2 the requested areas; cell 0 takes the rest.

    Raises:
        InfeasibleSpecError: if the hexagon combinatorics cannot hold the areas.
    """
    total = side * side * math.sqrt(3.0) / 2.0
    if area1 <= 0 or area2 <= 0 or area1 + area2 >= total:
        raise InfeasibleSpecError(
            f"Cell areas {area1}, {area2} do not fit a torus of area {total}"
        )

    def residual(w):
        areas = power_diagram(side, [0.0, w[0], w[1]]).areas()
        return [areas[1] - area1, areas[2] - area2]

    solution = root(residual, [0.0, 0.0], method="hybr", options={"xtol": 1e-14})
    diagram = power_diagram(side, [0.0, *solution.x])
    if not solution.success or np.max(np.abs(residual(solution.x))) > 1e-10 * total:
        raise InfeasibleSpecError(f"Honeycomb weights unsolved: {solution.message}")
    if not _edges_forward(diagram):
        raise InfeasibleSpecError(
            f"Cell areas {area1:.4g}, {area2:.4g} collapse a honeycomb edge on side {side:.4g}"
        )
    logger.debug("Honeycomb weights %s, network length %.12g", solution.x, diagram.edge_length())
    return diagram
