"""Triangulated two-complex separating regions R1, R2 and the complement R0.

Storage is an arena: vertices, edges and facets keep their integer ids for the life of
the mesh and deleted entries become tombstones (``None``). Facet normals point from the
back region to the front region.
"""

import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field

import numpy as np

from ska_sdp_double_bubble.geometry.lattice import Lattice, canonicalize
from ska_sdp_double_bubble.utilities.errors import InvalidMeshError

logger = logging.getLogger(__name__)

REGIONS = (0, 1, 2)
BODY_REGIONS = (1, 2)
REGION_PAIRS = ((0, 1), (0, 2), (1, 2))


@dataclass(frozen=True)
class Edge:
    """Directed edge; its vector is ``basis @ (u[head] - u[tail] + wrap)``."""

    tail: int
    head: int
    wrap: tuple[int, int, int]


@dataclass(frozen=True)
class Facet:
    """Triangle given by three signed edges; normal points from ``back`` to ``front``."""

    edges: tuple[int, int, int]
    signs: tuple[int, int, int]
    front: int
    back: int

    @property
    def pair(self) -> tuple[int, int]:
        """The unordered region pair, smaller id first."""
        return (min(self.front, self.back), max(self.front, self.back))

    def orientation(self, region: int) -> int:
        """+1 if the facet normal points out of ``region``, -1 if into it, else 0."""
        if self.back == region:
            return 1
        if self.front == region:
            return -1
        return 0


@dataclass
class Body:
    """A volume-constrained region with its torus volume constant ``k``."""

    region: int
    target: float
    k: int = 0


@dataclass
class MeshFrame:
    """Array view of the live topology, rebuilt whenever the topology changes."""

    facet_ids: np.ndarray
    corners: np.ndarray
    offsets: np.ndarray
    front: np.ndarray
    back: np.ndarray
    edge_facets: dict[int, list[tuple[int, int]]] = field(repr=False)
    vertex_facets: dict[int, list[int]] = field(repr=False)
    facet_row: dict[int, int] = field(repr=False)

    def valence(self, edge_id: int) -> int:
        """Number of facets using an edge."""
        return len(self.edge_facets.get(edge_id, ()))


class Mesh:
    """Periodic triangulated double bubble."""

    def __init__(self, lattice: Lattice):
        self.lattice = lattice
        self.positions = np.zeros((0, 3))
        self.vertex_alive: list[bool] = []
        self.edges: list[Edge | None] = []
        self.facets: list[Facet | None] = []
        self.bodies: list[Body] = []
        self.version = 0
        self._edge_index: dict[tuple, int] = {}
        self._frame: MeshFrame | None = None
        self._triple: np.ndarray | None = None
        self.cache: dict = {}

    # Construction

    def add_vertex(self, u) -> int:
        """Add a vertex at canonical lattice coordinates."""
        rep, _ = canonicalize(u)
        self.positions = np.vstack([self.positions, rep[None, :]])
        self.vertex_alive.append(True)
        self.touch()
        return len(self.vertex_alive) - 1

    def add_vertices(self, us: np.ndarray) -> np.ndarray:
        """Add many vertices; returns their ids."""
        reps, _ = canonicalize(np.asarray(us, dtype=float).reshape(-1, 3))
        first = len(self.vertex_alive)
        self.positions = np.vstack([self.positions, reps])
        self.vertex_alive.extend([True] * len(reps))
        self.touch()
        return np.arange(first, first + len(reps))

    def add_edge(self, tail: int, head: int, wrap) -> int:
        """Append a new edge without looking for an existing one."""
        wrap = tuple(int(w) for w in wrap)
        self.edges.append(Edge(int(tail), int(head), wrap))
        edge_id = len(self.edges) - 1
        self._edge_index[(int(tail), int(head), wrap)] = edge_id
        self.touch()
        return edge_id

    def find_edge(self, tail: int, head: int, wrap) -> tuple[int, int] | None:
        """Find an edge joining ``tail`` to ``head`` with the given wrap, in either direction."""
        wrap = tuple(int(w) for w in wrap)
        edge_id = self._edge_index.get((tail, head, wrap))
        if edge_id is not None:
            return edge_id, 1
        edge_id = self._edge_index.get((head, tail, tuple(-w for w in wrap)))
        if edge_id is not None:
            return edge_id, -1
        return None

    def edge_between(self, tail: int, head: int, wrap) -> tuple[int, int]:
        """Existing signed edge from ``tail`` to ``head``, created if missing."""
        found = self.find_edge(tail, head, wrap)
        if found is not None:
            return found
        return self.add_edge(tail, head, wrap), 1

    def add_facet(self, edges, signs, front: int, back: int) -> int:
        """Append a facet from signed edge ids."""
        self.facets.append(
            Facet(tuple(int(e) for e in edges), tuple(int(s) for s in signs), front, back)
        )
        self.touch()
        return len(self.facets) - 1

    def add_facet_cycle(self, vids, offsets, front: int, back: int) -> int:
        """Add a facet through three vertices given their integer offsets in a common frame.

        The unwrapped position of corner ``i`` is ``u[vids[i]] + offsets[i]``.
        """
        offsets = np.asarray(offsets, dtype=np.int64)
        edges, signs = [], []
        for i in range(3):
            j = (i + 1) % 3
            edge_id, sign = self.edge_between(vids[i], vids[j], offsets[j] - offsets[i])
            edges.append(edge_id)
            signs.append(sign)
        return self.add_facet(edges, signs, front, back)

    def rebuild_edge_index(self):
        """Recreate the edge lookup table from the edge store."""
        self._edge_index = {
            (e.tail, e.head, e.wrap): i for i, e in enumerate(self.edges) if e is not None
        }
        self.touch()

    def remove_facet(self, facet_id: int):
        """Tombstone a facet."""
        self.facets[facet_id] = None
        self.touch()

    def remove_edge(self, edge_id: int):
        """Tombstone an edge."""
        edge = self.edges[edge_id]
        if edge is not None:
            self._edge_index.pop((edge.tail, edge.head, edge.wrap), None)
        self.edges[edge_id] = None
        self.touch()

    def touch(self):
        """Invalidate everything derived from the topology."""
        self.version += 1
        self._frame = None
        self._triple = None
        self.cache.clear()

    # Queries

    def live_vertex_ids(self) -> list[int]:
        """Ids of vertices that have not been deleted."""
        return [i for i, alive in enumerate(self.vertex_alive) if alive]

    def live_edge_ids(self) -> list[int]:
        """Ids of edges that have not been deleted."""
        return [i for i, edge in enumerate(self.edges) if edge is not None]

    def live_facet_ids(self) -> list[int]:
        """Ids of facets that have not been deleted."""
        return [i for i, facet in enumerate(self.facets) if facet is not None]

    def body(self, region: int) -> Body:
        """The body constraining ``region``."""
        for body in self.bodies:
            if body.region == region:
                return body
        raise InvalidMeshError(f"No body for region {region}")

    def directed(self, edge_id: int, sign: int) -> tuple[int, int, np.ndarray]:
        """Edge endpoints and wrap in traversal direction."""
        edge = self.edges[edge_id]
        wrap = np.asarray(edge.wrap, dtype=np.int64)
        if sign > 0:
            return edge.tail, edge.head, wrap
        return edge.head, edge.tail, -wrap

    def facet_corners(self, facet_id: int) -> tuple[list[int], np.ndarray]:
        """Corner vertex ids and integer offsets relative to the first corner."""
        facet = self.facets[facet_id]
        vids = []
        offsets = np.zeros((3, 3), dtype=np.int64)
        for k in range(3):
            tail, head, wrap = self.directed(facet.edges[k], facet.signs[k])
            if k == 0:
                vids.append(tail)
            if k < 2:
                vids.append(head)
                offsets[k + 1] = offsets[k] + wrap
        return vids, offsets

    def frame(self) -> MeshFrame:
        """Array view of the live facets (cached until the topology changes)."""
        if self._frame is not None:
            return self._frame
        facet_ids = self.live_facet_ids()
        corners = np.zeros((len(facet_ids), 3), dtype=np.int64)
        offsets = np.zeros((len(facet_ids), 3, 3), dtype=np.int64)
        front = np.zeros(len(facet_ids), dtype=np.int64)
        back = np.zeros(len(facet_ids), dtype=np.int64)
        edge_facets: dict[int, list[tuple[int, int]]] = defaultdict(list)
        vertex_facets: dict[int, list[int]] = defaultdict(list)
        for row, facet_id in enumerate(facet_ids):
            facet = self.facets[facet_id]
            vids, offs = self.facet_corners(facet_id)
            corners[row] = vids
            offsets[row] = offs
            front[row] = facet.front
            back[row] = facet.back
            for edge_id, sign in zip(facet.edges, facet.signs):
                edge_facets[edge_id].append((facet_id, sign))
            for vid in set(vids):
                vertex_facets[vid].append(facet_id)
        self._frame = MeshFrame(
            facet_ids=np.asarray(facet_ids, dtype=np.int64),
            corners=corners,
            offsets=offsets,
            front=front,
            back=back,
            edge_facets=dict(edge_facets),
            vertex_facets=dict(vertex_facets),
            facet_row={facet_id: row for row, facet_id in enumerate(facet_ids)},
        )
        return self._frame

    def triple_edges(self) -> list[int]:
        """Ids of edges used by three facets."""
        frame = self.frame()
        return [e for e in self.live_edge_ids() if frame.valence(e) == 3]

    def triple_vertices(self) -> np.ndarray:
        """Boolean mask over vertex ids: true on triple curves."""
        if self._triple is None:
            mask = np.zeros(len(self.vertex_alive), dtype=bool)
            for edge_id in self.triple_edges():
                edge = self.edges[edge_id]
                mask[edge.tail] = True
                mask[edge.head] = True
            self._triple = mask
        return self._triple

    def corner_positions(self, positions: np.ndarray | None = None) -> np.ndarray:
        """Unwrapped ambient corner positions, shape (F, 3, 3)."""
        frame = self.frame()
        u = self.positions if positions is None else positions
        lifted = u[frame.corners] + frame.offsets
        return lifted @ self.lattice.basis.T

    def ambient_positions(self) -> np.ndarray:
        """Ambient positions of the vertex representatives."""
        return self.positions @ self.lattice.basis.T

    # Motion

    def set_positions(self, positions: np.ndarray) -> bool:
        """Move vertices (lattice coordinates, not necessarily canonical).

        Vertices that left the fundamental domain are wrapped back and the wraps of
        their edges adjusted. Returns True if any wrap changed.
        """
        reps, shifts = canonicalize(positions)
        self.positions = reps
        moved = np.any(shifts != 0, axis=1)
        if not moved.any():
            return False
        for edge_id, edge in enumerate(self.edges):
            if edge is None or not (moved[edge.tail] or moved[edge.head]):
                continue
            wrap = np.asarray(edge.wrap) + shifts[edge.head] - shifts[edge.tail]
            self._edge_index.pop((edge.tail, edge.head, edge.wrap), None)
            new = Edge(edge.tail, edge.head, tuple(int(w) for w in wrap))
            self.edges[edge_id] = new
            self._edge_index[(new.tail, new.head, new.wrap)] = edge_id
        self.touch()
        return True

    def copy(self) -> "Mesh":
        """Independent copy with identical ids."""
        other = Mesh(self.lattice)
        other.positions = self.positions.copy()
        other.vertex_alive = list(self.vertex_alive)
        other.edges = list(self.edges)
        other.facets = list(self.facets)
        other.bodies = [Body(b.region, b.target, b.k) for b in self.bodies]
        other._edge_index = dict(self._edge_index)
        return other

    def counts(self) -> tuple[int, int, int]:
        """Live (vertices, edges, facets)."""
        return (
            sum(self.vertex_alive),
            len(self.live_edge_ids()),
            len(self.live_facet_ids()),
        )


def region_boundary(mesh: Mesh, region: int) -> list[int]:
    """Facet ids bounding ``region``."""
    return [
        facet_id
        for facet_id, facet in enumerate(mesh.facets)
        if facet is not None and region in (facet.front, facet.back)
    ]


def lift_boundary(mesh: Mesh, facet_ids, axes=(0, 1, 2)) -> dict[int, np.ndarray] | None:
    """Assign integer offsets to the vertices of a facet set so edges never wrap.

    Offsets are only constrained along ``axes``. Each connected piece is rooted at its
    smallest vertex id. Returns None if some cycle wraps along one of the axes.
    """
    axes = list(axes)
    neighbours: dict[int, list[tuple[int, np.ndarray]]] = defaultdict(list)
    edge_ids = {e for f in facet_ids for e in mesh.facets[f].edges}
    for edge_id in edge_ids:
        edge = mesh.edges[edge_id]
        wrap = np.asarray(edge.wrap, dtype=np.int64)
        neighbours[edge.tail].append((edge.head, wrap))
        neighbours[edge.head].append((edge.tail, -wrap))

    lift: dict[int, np.ndarray] = {}
    for root in sorted(neighbours):
        if root in lift:
            continue
        lift[root] = np.zeros(3, dtype=np.int64)
        queue = deque([root])
        while queue:
            vid = queue.popleft()
            for other, wrap in neighbours[vid]:
                expected = lift[vid] + wrap
                if other not in lift:
                    lift[other] = expected
                    queue.append(other)
                elif np.any(lift[other][axes] != expected[axes]):
                    return None
    return lift
