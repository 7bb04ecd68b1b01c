"""Mesh quality operations: refinement, equiangulation and vertex averaging.

All operations change the mesh in place, keep the volume constant of each body
continuous and finish on the volume targets.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ska_sdp_double_bubble.configuration.config import EQUIANGULATE_MAX_DIHEDRAL
from ska_sdp_double_bubble.evolution.projection import project_volumes
from ska_sdp_double_bubble.geometry import metrics
from ska_sdp_double_bubble.geometry.lattice import canonicalize
from ska_sdp_double_bubble.geometry.mesh import Mesh

logger = logging.getLogger(__name__)

MAX_FLIP_SWEEPS = 50


def refine(mesh: Mesh, volume_tol: float | None = None) -> Mesh:
    """Split every facet into four through edge midpoints.

    Vertex and facet counts become V + E and 4F; edges become 2E + 3F.
    """
    previous = metrics.volume_values(mesh)
    counts = mesh.counts()
    edge_ids = mesh.live_edge_ids()
    facet_ids = mesh.live_facet_ids()

    tails = np.array([mesh.edges[e].tail for e in edge_ids], dtype=np.int64)
    heads = np.array([mesh.edges[e].head for e in edge_ids], dtype=np.int64)
    wraps = np.array([mesh.edges[e].wrap for e in edge_ids], dtype=np.int64).reshape(-1, 3)
    start = mesh.positions[tails]
    unwrapped = start + 0.5 * (mesh.positions[heads] + wraps - start)
    _, shifts = canonicalize(unwrapped)
    midpoint_ids = mesh.add_vertices(unwrapped)

    # midpoint id and its offset from the edge tail
    midpoint = {}
    for edge_id, tail, head, wrap, mid, shift in zip(
        edge_ids, tails, heads, wraps, midpoint_ids, shifts
    ):
        mesh.add_edge(tail, mid, shift)
        mesh.add_edge(mid, head, wrap - shift)
        midpoint[edge_id] = (int(mid), shift)

    for facet_id in facet_ids:
        facet = mesh.facets[facet_id]
        vids, offsets = mesh.facet_corners(facet_id)
        mids, mid_offsets = [], []
        for k in range(3):
            mid, shift = midpoint[facet.edges[k]]
            tail_corner = k if facet.signs[k] > 0 else (k + 1) % 3
            mids.append(mid)
            mid_offsets.append(offsets[tail_corner] + shift)
        for k in range(3):
            previous_k = (k + 2) % 3
            mesh.add_facet_cycle(
                [vids[k], mids[k], mids[previous_k]],
                [offsets[k], mid_offsets[k], mid_offsets[previous_k]],
                facet.front,
                facet.back,
            )
        mesh.add_facet_cycle(mids, mid_offsets, facet.front, facet.back)
        mesh.remove_facet(facet_id)
    for edge_id in edge_ids:
        mesh.remove_edge(edge_id)

    metrics.reanchor(mesh, previous)
    logger.info("Refined mesh %s -> %s (V, E, F)", counts, mesh.counts())
    return project_volumes(mesh, volume_tol)


@dataclass(frozen=True)
class _Quad:
    """Two facets sharing an edge a-b, with opposite corners c and d in one frame."""

    facets: tuple[int, int]
    vids: tuple[int, int, int, int]
    offsets: np.ndarray
    front: int
    back: int


def _minimum_angle(points: np.ndarray) -> float:
    angles = []
    for k in range(3):
        first = points[(k + 1) % 3] - points[k]
        second = points[(k + 2) % 3] - points[k]
        cosine = first @ second / (np.linalg.norm(first) * np.linalg.norm(second))
        angles.append(np.arccos(np.clip(cosine, -1.0, 1.0)))
    return min(angles)


EdgeUses = dict[int, list[tuple[int, int]]]


def _quad(mesh: Mesh, edge_id: int, incidence: EdgeUses | None = None) -> _Quad | None:
    if incidence is None:
        incidence = mesh.frame().edge_facets
    uses = incidence.get(edge_id, [])
    if len(uses) != 2:
        return None
    (first, first_sign), (second, second_sign) = uses
    if first_sign == second_sign:
        return None
    facet, other = mesh.facets[first], mesh.facets[second]
    if (facet.front, facet.back) != (other.front, other.back):
        return None

    vids, offsets = mesh.facet_corners(first)
    k = facet.edges.index(edge_id)
    a, b, c = (k, (k + 1) % 3, (k + 2) % 3)
    other_vids, other_offsets = mesh.facet_corners(second)
    k2 = other.edges.index(edge_id)
    b2, a2, d2 = (k2, (k2 + 1) % 3, (k2 + 2) % 3)
    delta = offsets[a] - other_offsets[a2]
    if np.any(other_offsets[b2] + delta != offsets[b]):
        return None
    quad_vids = (vids[a], vids[b], vids[c], other_vids[d2])
    quad_offsets = np.stack([offsets[a], offsets[b], offsets[c], other_offsets[d2] + delta])
    return _Quad((first, second), quad_vids, quad_offsets, facet.front, facet.back)


def should_flip(
    mesh: Mesh,
    edge_id: int,
    max_dihedral: float = EQUIANGULATE_MAX_DIHEDRAL,
    incidence: EdgeUses | None = None,
) -> bool:
    """True if swapping the diagonal of the quad around ``edge_id`` increases its minimum angle."""
    quad = _quad(mesh, edge_id, incidence)
    if quad is None:
        return False
    a, b, c, d = quad.vids
    if c == d and np.all(quad.offsets[2] == quad.offsets[3]):
        return False
    if mesh.find_edge(c, d, quad.offsets[3] - quad.offsets[2]) is not None:
        return False
    points = (mesh.positions[list(quad.vids)] + quad.offsets) @ mesh.lattice.basis.T
    pa, pb, pc, pd = points
    normal_first = np.cross(pb - pa, pc - pa)
    normal_second = np.cross(pa - pb, pd - pb)
    cosine = normal_first @ normal_second / (
        np.linalg.norm(normal_first) * np.linalg.norm(normal_second)
    )
    if np.degrees(np.arccos(np.clip(cosine, -1.0, 1.0))) >= max_dihedral:
        return False
    reference = normal_first + normal_second
    if np.cross(pd - pa, pc - pa) @ reference <= 0 or np.cross(pb - pd, pc - pd) @ reference <= 0:
        return False
    before = min(_minimum_angle(points[[0, 1, 2]]), _minimum_angle(points[[1, 0, 3]]))
    after = min(_minimum_angle(points[[0, 3, 2]]), _minimum_angle(points[[3, 1, 2]]))
    return after > before + 1e-12


def flip_edge(mesh: Mesh, edge_id: int, incidence: EdgeUses | None = None) -> bool:
    """Replace diagonal a-b of a quad a,d,b,c by c-d; False if it is not a flippable quad."""
    quad = _quad(mesh, edge_id, incidence)
    if quad is None:
        return False
    a, b, c, d = quad.vids
    oa, ob, oc, od = quad.offsets
    for facet_id in quad.facets:
        if incidence is not None:
            _forget(incidence, mesh, facet_id)
        mesh.remove_facet(facet_id)
    mesh.remove_edge(edge_id)
    added = (
        mesh.add_facet_cycle([a, d, c], [oa, od, oc], quad.front, quad.back),
        mesh.add_facet_cycle([d, b, c], [od, ob, oc], quad.front, quad.back),
    )
    if incidence is not None:
        incidence.pop(edge_id, None)
        for facet_id in added:
            facet = mesh.facets[facet_id]
            for used, sign in zip(facet.edges, facet.signs):
                incidence.setdefault(used, []).append((facet_id, sign))
    return True


def _forget(incidence: EdgeUses, mesh: Mesh, facet_id: int):
    for used in mesh.facets[facet_id].edges:
        incidence[used] = [use for use in incidence.get(used, []) if use[0] != facet_id]


def equiangulate(mesh: Mesh, volume_tol: float | None = None) -> Mesh:
    """Flip diagonals of nearly flat quads until no flip improves the minimum angle."""
    previous = metrics.volume_values(mesh)
    flips = 0
    for _ in range(MAX_FLIP_SWEEPS):
        incidence = {e: list(uses) for e, uses in mesh.frame().edge_facets.items()}
        candidates = sorted(e for e, uses in incidence.items() if len(uses) == 2)
        changed = 0
        for edge_id in candidates:
            if mesh.edges[edge_id] is not None and should_flip(
                mesh, edge_id, incidence=incidence
            ):
                changed += flip_edge(mesh, edge_id, incidence)
        flips += changed
        if not changed:
            break
    logger.info("Equiangulation flipped %d edge(s)", flips)
    if flips:
        metrics.reanchor(mesh, previous)
        project_volumes(mesh, volume_tol)
    return mesh


def _surface_move(mesh: Mesh, vid: int, corners: np.ndarray, rows: list[int]) -> np.ndarray:
    """Tangential move towards the area-weighted centroid of the star."""
    frame = mesh.frame()
    x_v = mesh.lattice.to_ambient(mesh.positions[vid])
    weighted = np.zeros(3)
    normal = np.zeros(3)
    total = 0.0
    for row in rows:
        points = corners[row]
        position = int(np.flatnonzero(frame.corners[row] == vid)[0])
        shift = x_v - points[position]
        area_vector = 0.5 * np.cross(points[1] - points[0], points[2] - points[0])
        area = np.linalg.norm(area_vector)
        weighted += area * (points.mean(axis=0) + shift)
        normal += area_vector
        total += area
    if total == 0.0 or not np.linalg.norm(normal):
        return np.zeros(3)
    move = weighted / total - x_v
    unit = normal / np.linalg.norm(normal)
    return move - (move @ unit) * unit


def _curve_move(mesh: Mesh, vid: int, neighbours: list[np.ndarray]) -> np.ndarray:
    """Move along a triple curve towards the midpoint of its two curve neighbours."""
    if len(neighbours) != 2:
        return np.zeros(3)
    first, second = neighbours
    tangent = second - first
    length = np.linalg.norm(tangent)
    if not length:
        return np.zeros(3)
    tangent /= length
    return (0.5 * (first + second) @ tangent) * tangent


def vertex_average(mesh: Mesh, volume_tol: float | None = None) -> Mesh:
    """Smooth vertices tangentially; triple-curve vertices slide along their curve."""
    previous = metrics.volume_values(mesh)
    frame = mesh.frame()
    corners = mesh.corner_positions()
    triple = mesh.triple_vertices()

    curve_neighbours: dict[int, list[np.ndarray]] = {}
    for edge_id in mesh.triple_edges():
        edge = mesh.edges[edge_id]
        vector = mesh.lattice.to_ambient(
            mesh.positions[edge.head] + np.asarray(edge.wrap) - mesh.positions[edge.tail]
        )
        curve_neighbours.setdefault(edge.tail, []).append(vector)
        curve_neighbours.setdefault(edge.head, []).append(-vector)

    moves = np.zeros_like(mesh.positions)
    for vid in mesh.live_vertex_ids():
        if triple[vid]:
            moves[vid] = _curve_move(mesh, vid, curve_neighbours.get(vid, []))
        else:
            rows = [frame.facet_row[f] for f in frame.vertex_facets.get(vid, [])]
            moves[vid] = _surface_move(mesh, vid, corners, rows)

    positions = mesh.positions + moves @ mesh.lattice.inverse.T
    if mesh.set_positions(positions):
        logger.debug("Vertex averaging wrapped vertices across the cell")
    metrics.reanchor(mesh, previous)
    logger.info(
        "Averaged %d vertices, largest move %.3g",
        len(mesh.live_vertex_ids()),
        float(np.max(np.linalg.norm(moves, axis=1), initial=0.0)),
    )
    return project_volumes(mesh, volume_tol)
