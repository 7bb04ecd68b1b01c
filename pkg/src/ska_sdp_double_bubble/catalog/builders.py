"""Triangulated primitives and the periodic welder that turns them into a mesh.

Primitives are emitted as ambient triangles tagged with the regions in front of and
behind them; the right-hand normal of each triangle points into its front region.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from ska_sdp_double_bubble.geometry import metrics
from ska_sdp_double_bubble.geometry.lattice import Lattice, canonicalize
from ska_sdp_double_bubble.geometry.mesh import Body, Mesh
from ska_sdp_double_bubble.utilities.errors import UnsupportedLatticeError

logger = logging.getLogger(__name__)

WELD_TOLERANCE = 1e-8


@dataclass(frozen=True)
class Placement:
    """Local right-handed frame whose z axis runs along one lattice period."""

    lattice: Lattice
    axes: tuple[int, int, int]
    origin: np.ndarray

    @classmethod
    def along(cls, lattice: Lattice, axis: int, centre=(0.5, 0.5, 0.5)) -> "Placement":
        """Frame with local z along period ``axis`` (rectangular lattices, any axis)."""
        if not lattice.is_rectangular and axis != 2:
            raise UnsupportedLatticeError(
                f"Only the third period can carry a local axis on a {lattice.kind.value} lattice"
            )
        axes = ((axis + 1) % 3, (axis + 2) % 3, axis)
        return cls(lattice, axes, lattice.to_ambient(np.asarray(centre, dtype=float)))

    @property
    def lengths(self) -> np.ndarray:
        """Local periods (x, y, z); only meaningful for rectangular lattices."""
        return self.lattice.periods[list(self.axes)]

    def to_ambient(self, local: np.ndarray) -> np.ndarray:
        """Map local points, relative to the origin, to ambient coordinates."""
        local = np.asarray(local, dtype=float)
        if not self.lattice.is_rectangular:
            return self.origin + local
        ambient = np.zeros_like(local)
        for i, axis in enumerate(self.axes):
            ambient[..., axis] = local[..., i]
        return self.origin + ambient


class MeshBuilder:
    """Collects tagged triangles and welds them into a periodic mesh."""

    def __init__(self, lattice: Lattice):
        self.lattice = lattice
        self._points: list[np.ndarray] = []
        self._tags: list[tuple[int, int]] = []

    def __len__(self) -> int:
        return len(self._tags)

    def add_triangle(self, points, front: int, back: int):
        """Add one ambient triangle."""
        self._points.append(np.asarray(points, dtype=float).reshape(3, 3))
        self._tags.append((front, back))

    def add_quads(self, grid: np.ndarray, front: int, back: int, placement: Placement):
        """Triangulate a (n, m, 3) grid of local points row by row.

        The normal is d(row) x d(column).
        """
        ambient = placement.to_ambient(grid)
        rows, cols = grid.shape[:2]
        for i in range(rows - 1):
            for j in range(cols - 1):
                p00, p10 = ambient[i, j], ambient[i + 1, j]
                p11, p01 = ambient[i + 1, j + 1], ambient[i, j + 1]
                self.add_triangle([p00, p10, p11], front, back)
                self.add_triangle([p00, p11, p01], front, back)

    def build(self, targets: dict[int, float]) -> Mesh:
        """Weld coincident corners and create bodies anchored at ``targets``."""
        if not self._points:
            raise ValueError("No triangles to weld")
        points = np.concatenate(self._points).reshape(-1, 3)
        unwrapped = points @ self.lattice.inverse.T
        reps, _ = canonicalize(unwrapped)
        # points a whisker below 1 are folded to 0 so the tree sees one copy
        reps = np.where(reps > 1.0 - WELD_TOLERANCE, 0.0, reps)

        tree = cKDTree(reps, boxsize=1.0)
        pairs = tree.query_pairs(WELD_TOLERANCE, output_type="ndarray")
        graph = coo_matrix(
            (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(len(reps), len(reps))
        )
        _, labels = connected_components(graph, directed=False)
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)

        mesh = Mesh(self.lattice)
        vertex_ids = mesh.add_vertices(reps[first])
        vids = vertex_ids[inverse]
        offsets = np.rint(unwrapped - mesh.positions[vids]).astype(np.int64)

        skipped = 0
        for t, (front, back) in enumerate(self._tags):
            corner_ids = vids[3 * t : 3 * t + 3].tolist()
            corner_offsets = offsets[3 * t : 3 * t + 3]
            keys = {(int(v), *o.tolist()) for v, o in zip(corner_ids, corner_offsets)}
            if len(keys) < 3:
                skipped += 1
                continue
            mesh.add_facet_cycle(corner_ids, corner_offsets - corner_offsets[0], front, back)

        mesh.bodies = [Body(region, target) for region, target in sorted(targets.items())]
        for region, target in targets.items():
            metrics.anchor(mesh, region, target)
        logger.debug(
            "Welded %d triangles into %s (V, E, F), %d degenerate dropped",
            len(self._tags),
            mesh.counts(),
            skipped,
        )
        return mesh


# Profiles and curves in local coordinates


def cap_profile(c: float, theta: float, z_rim: float, samples: int) -> np.ndarray:
    """(r, z) points of a spherical cap from its pole to its rim of radius ``c``."""
    t = np.linspace(0.0, 1.0, samples)
    if abs(theta) < 1e-9:
        return np.column_stack([c * t, np.full_like(t, z_rim)])
    r = c * np.sin(theta * t) / np.sin(theta)
    z = z_rim + c * (np.cos(theta * t) - np.cos(theta)) / np.sin(theta)
    return np.column_stack([r, z])


def arc_points(start, end, theta: float, samples: int) -> np.ndarray:
    """Points of a circular arc from ``start`` to ``end``.

    The arc meets its chord at ``theta``; positive angles bulge to the left of the
    chord direction.
    """
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    t = np.linspace(0.0, 1.0, samples)
    if abs(theta) < 1e-9:
        return start + t[:, None] * (end - start)
    side = math.copysign(1.0, theta)
    theta = abs(theta)
    chord = end - start
    half = np.linalg.norm(chord) / 2.0
    tangent = chord / (2.0 * half)
    left = np.array([-tangent[1], tangent[0]])
    centre = (start + end) / 2.0 - side * left * half / math.tan(theta)
    radial = start - centre
    angles = -side * 2.0 * theta * t
    cosines, sines = np.cos(angles), np.sin(angles)
    return centre + np.column_stack(
        [
            cosines * radial[0] - sines * radial[1],
            sines * radial[0] + cosines * radial[1],
        ]
    )


def line_points(start, end, spacing: float) -> np.ndarray:
    """Evenly spaced points on a segment, at most ``spacing`` apart."""
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    count = max(2, int(math.ceil(np.linalg.norm(end - start) / spacing)) + 1)
    return start + np.linspace(0.0, 1.0, count)[:, None] * (end - start)


def samples_for(theta: float, segments: int) -> int:
    """Profile samples for an arc turning through ``2 * theta``."""
    return max(3, int(math.ceil(segments * abs(theta) / math.pi)) + 1)


# Surfaces


def revolve(
    builder: MeshBuilder,
    placement: Placement,
    profile: np.ndarray,
    segments: int,
    front: int,
    back: int,
    axis_xy=(0.0, 0.0),
):
    """Surface of revolution about the local z axis.

    The front region lies to the left of the profile direction in the (r, z) plane.
    """
    phi = np.linspace(0.0, 2.0 * math.pi, segments + 1)
    phi[-1] = 0.0
    r, z = profile[:, 0], profile[:, 1]
    grid = np.stack(
        [
            axis_xy[0] + r[:, None] * np.cos(phi)[None, :],
            axis_xy[1] + r[:, None] * np.sin(phi)[None, :],
            np.broadcast_to(z[:, None], (len(r), len(phi))),
        ],
        axis=-1,
    )
    builder.add_quads(grid, front, back, placement)


def extrude(
    builder: MeshBuilder,
    placement: Placement,
    curve: np.ndarray,
    length: float,
    segments: int,
    front: int,
    back: int,
):
    """Prism wall over a local (x, y) polyline along the full local z period.

    The front region lies to the right of the curve direction.
    """
    z = np.linspace(-length / 2.0, length / 2.0, segments + 1)
    grid = np.stack(
        [
            np.broadcast_to(curve[:, 0:1], (len(curve), len(z))),
            np.broadcast_to(curve[:, 1:2], (len(curve), len(z))),
            np.broadcast_to(z[None, :], (len(curve), len(z))),
        ],
        axis=-1,
    )
    builder.add_quads(grid, front, back, placement)


def lattice_plane(
    builder: MeshBuilder, axis: int, level: float, cells: int, front: int, back: int
):
    """Flat wall u_axis = level spanning the other two periods; front lies on the +u side."""
    lattice = builder.lattice
    others = [(axis + 1) % 3, (axis + 2) % 3]
    s = np.linspace(0.0, 1.0, cells + 1)
    u = np.zeros((cells + 1, cells + 1, 3))
    u[..., axis] = level
    u[..., others[0]] = s[:, None]
    u[..., others[1]] = s[None, :]
    ambient = u @ lattice.basis.T
    normal = np.cross(lattice.basis[:, others[0]], lattice.basis[:, others[1]])
    flip = normal @ lattice.inverse[axis] < 0
    for i in range(cells):
        for j in range(cells):
            quad = [ambient[i, j], ambient[i + 1, j], ambient[i + 1, j + 1], ambient[i, j + 1]]
            if flip:
                quad = quad[::-1]
            builder.add_triangle([quad[0], quad[1], quad[2]], front, back)
            builder.add_triangle([quad[0], quad[2], quad[3]], front, back)


def holed_wall(
    builder: MeshBuilder,
    placement: Placement,
    z: float,
    radius: float,
    segments: int,
    front: int,
    back: int,
):
    """Flat local wall at height ``z`` across the cell with a round hole about the z axis.

    The normal is +z. ``segments`` must be a multiple of four so that the samples on
    opposite sides of the cell coincide.
    """
    half_x, half_y = placement.lengths[:2] / 2.0
    corners = {
        math.atan2(half_y, half_x): (half_x, half_y),
        math.atan2(half_y, -half_x): (-half_x, half_y),
        math.atan2(-half_y, -half_x) % (2 * math.pi): (-half_x, -half_y),
        math.atan2(-half_y, half_x) % (2 * math.pi): (half_x, -half_y),
    }

    def boundary(angle):
        dx, dy = math.cos(angle), math.sin(angle)
        scale = min(
            half_x / abs(dx) if abs(dx) > 1e-15 else math.inf,
            half_y / abs(dy) if abs(dy) > 1e-15 else math.inf,
        )
        return scale * dx, scale * dy

    angles = 2.0 * math.pi * np.arange(segments + 1) / segments
    for k in range(segments):
        a0, a1 = angles[k], angles[k + 1]
        inner0 = (radius * math.cos(a0), radius * math.sin(a0), z)
        inner1 = (radius * math.cos(a1), radius * math.sin(a1), z)
        chain = [boundary(a0)]
        chain += [corners[a] for a in sorted(corners) if a0 < a < a1]
        chain.append(boundary(a1))
        outer = [(x, y, z) for x, y in chain]
        for p, q in zip(outer[:-1], outer[1:]):
            builder.add_triangle(placement.to_ambient(np.array([inner0, p, q])), front, back)
        closing = placement.to_ambient(np.array([inner0, outer[-1], inner1]))
        builder.add_triangle(closing, front, back)


def rectilinear_walls(
    builder: MeshBuilder, placement: Placement, breaks: list[np.ndarray], label
):
    """Walls between voxels of a periodic rectilinear grid with different labels.

    ``breaks`` are the grid lines along local x, y and z, each starting at 0 and
    ending at the period; ``label(centre)`` gives the region of a voxel. Coordinates
    are local, measured from the lower cell corner.
    """
    lengths = placement.lengths
    shift = -lengths / 2.0
    centres = [(b[:-1] + b[1:]) / 2.0 for b in breaks]
    shape = tuple(len(c) for c in centres)
    labels = np.zeros(shape, dtype=np.int64)
    for index in np.ndindex(shape):
        labels[index] = label(np.array([centres[a][index[a]] for a in range(3)]))

    for axis in range(3):
        b_axis, c_axis = (axis + 1) % 3, (axis + 2) % 3
        for index in np.ndindex(shape):
            neighbour = list(index)
            neighbour[axis] = (index[axis] + 1) % shape[axis]
            own, other = labels[index], labels[tuple(neighbour)]
            if own == other:
                continue
            base = np.array([breaks[a][index[a]] for a in range(3)], dtype=float)
            base[axis] = breaks[axis][index[axis] + 1]
            step_b = np.zeros(3)
            step_c = np.zeros(3)
            step_b[b_axis] = breaks[b_axis][index[b_axis] + 1] - breaks[b_axis][index[b_axis]]
            step_c[c_axis] = breaks[c_axis][index[c_axis] + 1] - breaks[c_axis][index[c_axis]]
            quad = placement.to_ambient(
                np.array([base, base + step_b, base + step_b + step_c, base + step_c]) + shift
            )
            builder.add_triangle(quad[[0, 1, 2]], int(other), int(own))
            builder.add_triangle(quad[[0, 2, 3]], int(other), int(own))
