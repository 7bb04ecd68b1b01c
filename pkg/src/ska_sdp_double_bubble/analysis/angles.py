"""Plateau angle measurements on triple curves and at tetrahedral points."""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from ska_sdp_double_bubble.configuration.config import ANGLE_WINDOW_DEGREES
from ska_sdp_double_bubble.geometry.lattice import displacement
from ska_sdp_double_bubble.geometry.mesh import Mesh
from ska_sdp_double_bubble.geometry.validation import require_valid

logger = logging.getLogger(__name__)

TRIPLE_ANGLE = 120.0
TETRAHEDRAL_ANGLE = math.degrees(math.acos(-1.0 / 3.0))


@dataclass
class AngleReport:
    """Dihedral samples along triple curves and cone angles at tetrahedral points (degrees)."""

    dihedrals: np.ndarray
    cone_angles: np.ndarray
    window: float = ANGLE_WINDOW_DEGREES

    @staticmethod
    def _fraction(samples: np.ndarray, target: float, window: float) -> float | None:
        if len(samples) == 0:
            return None
        return float(np.mean(np.abs(samples - target) <= window))

    def triple_fraction(self, window: float | None = None) -> float | None:
        """Share of dihedral samples within ``window`` of 120 degrees."""
        return self._fraction(
            self.dihedrals, TRIPLE_ANGLE, self.window if window is None else window
        )

    def tetrahedral_fraction(self, window: float | None = None) -> float | None:
        """Share of cone-angle samples within ``window`` of arccos(-1/3)."""
        return self._fraction(
            self.cone_angles, TETRAHEDRAL_ANGLE, self.window if window is None else window
        )

    def summary(self) -> dict:
        """Counts, quantiles and window fractions of both sample sets."""

        def quantiles(samples):
            if len(samples) == 0:
                return None
            q05, q50, q95 = np.percentile(samples, [5, 50, 95])
            return {"p05": float(q05), "p50": float(q50), "p95": float(q95)}

        return {
            "triple_samples": int(len(self.dihedrals)),
            "triple_quantiles": quantiles(self.dihedrals),
            "triple_fraction": self.triple_fraction(),
            "tetrahedral_samples": int(len(self.cone_angles)),
            "tetrahedral_quantiles": quantiles(self.cone_angles),
            "tetrahedral_fraction": self.tetrahedral_fraction(),
            "window_degrees": self.window,
        }

    def to_dict(self) -> dict:
        return {
            "summary": self.summary(),
            "dihedrals": self.dihedrals.tolist(),
            "cone_angles": self.cone_angles.tolist(),
        }


def _angle(a: np.ndarray, b: np.ndarray) -> float:
    cosine = np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b))
    return math.degrees(math.acos(float(np.clip(cosine, -1.0, 1.0))))


def _wall_directions(mesh: Mesh, edge_id: int, corners: np.ndarray) -> list[np.ndarray]:
    """Unit vectors perpendicular to the edge, pointing into each incident facet."""
    frame = mesh.frame()
    directions = []
    for facet_id, _ in frame.edge_facets[edge_id]:
        k = mesh.facets[facet_id].edges.index(edge_id)
        triangle = corners[frame.facet_row[facet_id]]
        a, b, apex = triangle[k], triangle[(k + 1) % 3], triangle[(k + 2) % 3]
        tangent = (b - a) / np.linalg.norm(b - a)
        across = (apex - a) - np.dot(apex - a, tangent) * tangent
        directions.append(across / np.linalg.norm(across))
    return directions


def _curve_tangents(mesh: Mesh, triple_edges: list[int]) -> dict[int, list[np.ndarray]]:
    """Outgoing triple-curve edge vectors at each vertex."""
    tangents: dict[int, list[np.ndarray]] = defaultdict(list)
    for edge_id in triple_edges:
        edge = mesh.edges[edge_id]
        vector = displacement(
            mesh.lattice, mesh.positions[edge.tail], mesh.positions[edge.head], edge.wrap
        )
        tangents[edge.tail].append(vector)
        tangents[edge.head].append(-vector)
    return tangents


def plateau_angles(mesh: Mesh, window: float = ANGLE_WINDOW_DEGREES) -> AngleReport:
    """
    Measure the angles at which walls and triple curves meet.

    For every edge used by three facets the three pairwise angles between the walls
    are sampled. At every vertex where four triple curves meet, the six pairwise
    angles between the curve tangents are sampled.

    Args:
        mesh: a valid mesh.
        window: tolerance in degrees used by the summary fractions.

    Returns:
        AngleReport: the samples; both arrays are empty for flat-wall meshes.
    """
    require_valid(mesh)
    triple_edges = mesh.triple_edges()
    corners = mesh.corner_positions()

    dihedrals = []
    for edge_id in triple_edges:
        walls = _wall_directions(mesh, edge_id, corners)
        for i in range(3):
            for j in range(i + 1, 3):
                dihedrals.append(_angle(walls[i], walls[j]))

    cone_angles = []
    for tangents in _curve_tangents(mesh, triple_edges).values():
        if len(tangents) != 4:
            continue
        for i in range(4):
            for j in range(i + 1, 4):
                cone_angles.append(_angle(tangents[i], tangents[j]))

    report = AngleReport(np.array(dihedrals), np.array(cone_angles), window)
    logger.debug("Plateau angles: %s", report.summary())
    return report
