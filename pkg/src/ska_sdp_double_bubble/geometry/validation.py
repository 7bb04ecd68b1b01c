"""Structural checks and topology signatures of meshes."""

import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field

import numpy as np

from ska_sdp_double_bubble.geometry.mesh import BODY_REGIONS, REGION_PAIRS, REGIONS, Mesh
from ska_sdp_double_bubble.geometry.metrics import body_volume
from ska_sdp_double_bubble.utilities.errors import DoubleBubbleError, InvalidMeshError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Violation:
    """One failed invariant, localised to an element."""

    element: str
    element_id: int
    rule: str
    message: str


@dataclass
class ValidationReport:
    """Collected violations; empty means valid."""

    violations: list[Violation] = field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        """True when no invariant failed."""
        return not self.violations

    def add(self, element: str, element_id: int, rule: str, message: str):
        """Record a violation."""
        self.violations.append(Violation(element, element_id, rule, message))

    def rules(self) -> set[str]:
        """Names of the failed rules."""
        return {v.rule for v in self.violations}

    def to_dict(self) -> dict:
        """JSON-ready form."""
        return {
            "valid": self.is_valid,
            "violations": [
                {
                    "element": v.element,
                    "id": v.element_id,
                    "rule": v.rule,
                    "message": v.message,
                }
                for v in self.violations
            ],
        }


def _check_vertices(mesh: Mesh, report: ValidationReport):
    for vid in mesh.live_vertex_ids():
        u = mesh.positions[vid]
        if not np.all(np.isfinite(u)) or np.any(u < 0.0) or np.any(u >= 1.0):
            report.add("vertex", vid, "canonical", f"coordinates {u.tolist()} not in [0, 1)")


def _check_edges(mesh: Mesh, report: ValidationReport):
    n_vertices = len(mesh.vertex_alive)
    for edge_id in mesh.live_edge_ids():
        edge = mesh.edges[edge_id]
        if not (0 <= edge.tail < n_vertices and 0 <= edge.head < n_vertices):
            report.add("edge", edge_id, "endpoints", "endpoint id out of range")
            continue
        if not (mesh.vertex_alive[edge.tail] and mesh.vertex_alive[edge.head]):
            report.add("edge", edge_id, "endpoints", "endpoint is deleted")
        if edge.tail == edge.head and not any(edge.wrap):
            report.add("edge", edge_id, "degenerate", "loop with zero wrap")
        if any(abs(w) > 1 for w in edge.wrap):
            report.add("edge", edge_id, "wrap", f"wrap {edge.wrap} exceeds one period")


def _check_facets(mesh: Mesh, report: ValidationReport):
    for facet_id in mesh.live_facet_ids():
        facet = mesh.facets[facet_id]
        if facet.front == facet.back:
            report.add("facet", facet_id, "regions", f"both sides are region {facet.front}")
        if facet.front not in REGIONS or facet.back not in REGIONS:
            report.add("facet", facet_id, "regions", f"unknown region in {facet.pair}")
        if any(mesh.edges[e] is None for e in facet.edges):
            report.add("facet", facet_id, "edges", "uses a deleted edge")
            continue
        start = None
        current = None
        total_wrap = np.zeros(3, dtype=np.int64)
        chained = True
        for edge_id, sign in zip(facet.edges, facet.signs):
            tail, head, wrap = mesh.directed(edge_id, sign)
            if start is None:
                start = tail
            elif tail != current:
                chained = False
            current = head
            total_wrap += wrap
        if not chained or current != start:
            report.add("facet", facet_id, "closure", "edges do not form a loop")
        elif np.any(total_wrap != 0):
            report.add("facet", facet_id, "closure", f"wraps sum to {total_wrap.tolist()}")


def _check_valence(mesh: Mesh, report: ValidationReport):
    frame = mesh.frame()
    for edge_id in mesh.live_edge_ids():
        uses = frame.edge_facets.get(edge_id, [])
        if len(uses) not in (2, 3):
            report.add("edge", edge_id, "valence", f"used by {len(uses)} facets")
            continue
        if len(uses) == 3:
            pairs = sorted(mesh.facets[f].pair for f, _ in uses)
            if pairs != list(REGION_PAIRS):
                report.add("edge", edge_id, "triple", f"triple edge carries pairs {pairs}")


def _check_orientation(mesh: Mesh, report: ValidationReport):
    frame = mesh.frame()
    for edge_id, uses in frame.edge_facets.items():
        for region in REGIONS:
            total = sum(sign * mesh.facets[f].orientation(region) for f, sign in uses)
            if total != 0:
                report.add(
                    "edge",
                    edge_id,
                    "boundary",
                    f"boundary of region {region} is not closed at this edge",
                )


def _check_bodies(mesh: Mesh, report: ValidationReport):
    det = mesh.lattice.det
    regions = sorted(b.region for b in mesh.bodies)
    if regions != list(BODY_REGIONS):
        report.add("body", -1, "bodies", f"expected bodies for regions 1 and 2, got {regions}")
        return
    values = {}
    for body in mesh.bodies:
        if not 0.0 < body.target < det:
            report.add("body", body.region, "target", f"target {body.target} outside (0, det)")
        try:
            values[body.region] = body_volume(mesh, body.region).value
        except DoubleBubbleError as exc:
            report.add("body", body.region, "volume", str(exc))
    if len(values) == 2 and values[1] + values[2] >= det:
        report.add("body", -1, "partition", "body volumes leave no room for the complement")


def validate(mesh: Mesh) -> ValidationReport:
    """Check every structural invariant; failures are report entries, never exceptions."""
    report = ValidationReport()
    _check_vertices(mesh, report)
    _check_edges(mesh, report)
    _check_facets(mesh, report)
    if report.is_valid:
        _check_valence(mesh, report)
        _check_orientation(mesh, report)
    if report.is_valid:
        _check_bodies(mesh, report)
    if not report.is_valid:
        logger.debug("Mesh failed validation: %s", sorted(report.rules()))
    return report


def require_valid(mesh: Mesh):
    """Raise if the mesh is invalid."""
    report = validate(mesh)
    if not report.is_valid:
        first = report.violations[0]
        raise InvalidMeshError(
            f"Invalid mesh: {first.element} {first.element_id} {first.rule}: {first.message}"
            f" ({len(report.violations)} violation(s))"
        )


@dataclass(frozen=True)
class InterfaceComponent:
    """One connected sheet of the interface between two regions."""

    pair: tuple[int, int]
    facets: int
    vertices: int
    edges: int
    wrap_rank: int
    wrap_axes: tuple[bool, bool, bool]

    @property
    def euler(self) -> int:
        """Euler characteristic V - E + F."""
        return self.vertices - self.edges + self.facets

    def shape(self) -> tuple:
        """The refinement-independent part of the signature."""
        return (self.pair, self.euler, self.wrap_rank, self.wrap_axes)

    def to_dict(self) -> dict:
        """JSON-ready form."""
        return {
            "pair": list(self.pair),
            "facets": self.facets,
            "euler": self.euler,
            "wrap_rank": self.wrap_rank,
            "wrap_axes": list(self.wrap_axes),
        }


def _components(mesh: Mesh, facet_ids: list[int]) -> list[list[int]]:
    by_edge = defaultdict(list)
    for facet_id in facet_ids:
        for edge_id in mesh.facets[facet_id].edges:
            by_edge[edge_id].append(facet_id)
    seen = set()
    components = []
    for root in facet_ids:
        if root in seen:
            continue
        seen.add(root)
        queue = deque([root])
        component = []
        while queue:
            facet_id = queue.popleft()
            component.append(facet_id)
            for edge_id in mesh.facets[facet_id].edges:
                for other in by_edge[edge_id]:
                    if other not in seen:
                        seen.add(other)
                        queue.append(other)
        components.append(sorted(component))
    return components


def _cycle_wraps(mesh: Mesh, edge_ids: set[int]) -> np.ndarray:
    """Wraps of the fundamental cycles of an edge graph."""
    neighbours = defaultdict(list)
    for edge_id in sorted(edge_ids):
        edge = mesh.edges[edge_id]
        wrap = np.asarray(edge.wrap, dtype=np.int64)
        neighbours[edge.tail].append((edge.head, wrap))
        neighbours[edge.head].append((edge.tail, -wrap))
    offset = {}
    cycles = []
    for root in sorted(neighbours):
        if root in offset:
            continue
        offset[root] = np.zeros(3, dtype=np.int64)
        queue = deque([root])
        while queue:
            vid = queue.popleft()
            for other, wrap in neighbours[vid]:
                expected = offset[vid] + wrap
                if other not in offset:
                    offset[other] = expected
                    queue.append(other)
                elif np.any(offset[other] != expected):
                    cycles.append(expected - offset[other])
    if not cycles:
        return np.zeros((0, 3), dtype=np.int64)
    return np.unique(np.array(cycles), axis=0)


def topology_signature(mesh: Mesh) -> list[InterfaceComponent]:
    """Per-region-pair interface components, ordered by pair then smallest facet id."""
    require_valid(mesh)
    signature = []
    for pair in REGION_PAIRS:
        facet_ids = [f for f in mesh.live_facet_ids() if mesh.facets[f].pair == pair]
        for component in _components(mesh, facet_ids):
            edges = {e for f in component for e in mesh.facets[f].edges}
            vertices = {v for e in edges for v in (mesh.edges[e].tail, mesh.edges[e].head)}
            wraps = _cycle_wraps(mesh, edges)
            rank = int(np.linalg.matrix_rank(wraps)) if len(wraps) else 0
            axes = tuple(bool(np.any(wraps[:, a] != 0)) if len(wraps) else False for a in range(3))
            signature.append(
                InterfaceComponent(
                    pair=pair,
                    facets=len(component),
                    vertices=len(vertices),
                    edges=len(edges),
                    wrap_rank=rank,
                    wrap_axes=axes,
                )
            )
    return signature
