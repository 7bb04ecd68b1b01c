"""Connectivity of regions and flatness of the interface between the two bodies."""

import logging

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ska_sdp_double_bubble.geometry.mesh import Mesh, lift_boundary, region_boundary
from ska_sdp_double_bubble.geometry.validation import require_valid
from ska_sdp_double_bubble.utilities.errors import PreconditionError

logger = logging.getLogger(__name__)

REGIONS = (0, 1, 2)


def _facet_components(mesh: Mesh, facet_ids: list[int]) -> int:
    if not facet_ids:
        return 0
    index = {facet_id: n for n, facet_id in enumerate(facet_ids)}
    rows, cols = [], []
    by_edge: dict[int, list[int]] = {}
    for facet_id in facet_ids:
        for edge_id in mesh.facets[facet_id].edges:
            by_edge.setdefault(edge_id, []).append(index[facet_id])
    for members in by_edge.values():
        for other in members[1:]:
            rows.append(members[0])
            cols.append(other)
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(facet_ids),) * 2)
    count, _ = connected_components(graph, directed=False)
    return int(count)


def region_components(mesh: Mesh) -> dict[int, int]:
    """Connected pieces of each region's boundary, facets joined through shared edges."""
    require_valid(mesh)
    counts = {region: _facet_components(mesh, region_boundary(mesh, region)) for region in REGIONS}
    logger.debug("Region boundary components: %s", counts)
    return counts


def interface_planarity(mesh: Mesh) -> float:
    """
    Largest distance of a vertex of the body 1 | body 2 interface from its best-fit plane.

    Raises:
        PreconditionError: if the bodies share no interface or it wraps around the torus.
    """
    require_valid(mesh)
    facet_ids = [f for f in mesh.live_facet_ids() if mesh.facets[f].pair == (1, 2)]
    if not facet_ids:
        raise PreconditionError("The two bodies share no interface")
    lift = lift_boundary(mesh, facet_ids)
    if lift is None:
        raise PreconditionError("The interface between the bodies wraps around the torus")
    vertex_ids = sorted(lift)
    unwrapped = mesh.positions[vertex_ids] + np.array([lift[v] for v in vertex_ids])
    points = mesh.lattice.to_ambient(unwrapped)
    centred = points - points.mean(axis=0)
    _, _, vh = np.linalg.svd(centred, full_matrices=False)
    deviation = float(np.max(np.abs(centred @ vh[-1])))
    logger.debug("Interface planarity over %d vertices: %.3g", len(vertex_ids), deviation)
    return deviation
