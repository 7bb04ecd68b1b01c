"""Region classification by first-hit ray casting through periodic images."""

import itertools
import logging

import numpy as np

from ska_sdp_double_bubble.configuration.config import CLASSIFICATION_RETRIES

logger = logging.getLogger(__name__)

GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0
RAY_DIRECTION = np.array([1.0, GOLDEN, GOLDEN**2]) / np.linalg.norm([1.0, GOLDEN, GOLDEN**2])

# Work array budget (points x facets) per chunk.
CHUNK_BUDGET = 2_000_000
BARYCENTRIC_TOL = 1e-10
PARALLEL_TOL = 1e-9
PERTURBATION = 1e-6


def _image_shifts(corners_u: np.ndarray, reach_u: np.ndarray) -> np.ndarray:
    """Lattice translations of the facets that can meet rays starting in [0, 1)³."""
    low = corners_u.min(axis=(0, 1))
    high = corners_u.max(axis=(0, 1))
    ranges = []
    for axis in range(3):
        start = int(np.floor(min(0.0, reach_u[axis]) - high[axis]))
        stop = int(np.ceil(1.0 + max(0.0, reach_u[axis]) - low[axis]))
        ranges.append(range(start, stop + 1))
    return np.array(list(itertools.product(*ranges)), dtype=np.int64)


def _first_hits(
    points: np.ndarray,
    tri: np.ndarray,
    direction: np.ndarray,
    length: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nearest hit per point against one set of triangles.

    Returns the hit distance (inf when missed), the facet row and an ambiguity flag.
    """
    e1 = tri[:, 1] - tri[:, 0]
    e2 = tri[:, 2] - tri[:, 0]
    pvec = np.cross(direction[None, :], e2)
    det = np.einsum("ij,ij->i", e1, pvec)
    scale = np.linalg.norm(e1, axis=1) * np.linalg.norm(e2, axis=1)
    usable = np.abs(det) > PARALLEL_TOL * scale
    safe_det = np.where(usable, det, 1.0)

    tvec = points[:, None, :] - tri[None, :, 0, :]
    bu = np.einsum("mfk,fk->mf", tvec, pvec) / safe_det
    qvec = np.cross(tvec, e1[None, :, :])
    bv = np.einsum("mfk,k->mf", qvec, direction) / safe_det
    dist = np.einsum("mfk,fk->mf", qvec, e2) / safe_det

    hit = (
        usable[None, :]
        & (bu >= -BARYCENTRIC_TOL)
        & (bv >= -BARYCENTRIC_TOL)
        & (bu + bv <= 1.0 + BARYCENTRIC_TOL)
        & (dist > 0.0)
        & (dist <= length)
    )
    dist = np.where(hit, dist, np.inf)
    row = np.argmin(dist, axis=1)
    best = dist[np.arange(len(points)), row]
    # Grazing hits near an edge are resolved by the caller's comparison across facets.
    edge_margin = np.minimum(np.minimum(bu, bv), 1.0 - bu - bv)
    grazing = np.abs(edge_margin[np.arange(len(points)), row]) < BARYCENTRIC_TOL
    return best, row, grazing & np.isfinite(best)


def _cast(mesh, points_u: np.ndarray, length_factor: float) -> np.ndarray:
    """Classify lattice-coordinate points; -1 where the answer is ambiguous or missing."""
    frame = mesh.frame()
    basis = mesh.lattice.basis
    corners_u = mesh.positions[frame.corners] + frame.offsets
    length = length_factor * float(np.linalg.norm(basis, axis=0).max())
    reach_u = mesh.lattice.inverse @ (RAY_DIRECTION * length)
    shifts = _image_shifts(corners_u, reach_u)

    normals = np.cross(
        (corners_u[:, 1] - corners_u[:, 0]) @ basis.T,
        (corners_u[:, 2] - corners_u[:, 0]) @ basis.T,
    )
    outcome = np.where(normals @ RAY_DIRECTION > 0.0, frame.back, frame.front)

    n_points = len(points_u)
    best = np.full(n_points, np.inf)
    label = np.full(n_points, -1, dtype=np.int64)
    ambiguous = np.zeros(n_points, dtype=bool)
    points = points_u @ basis.T
    chunk = max(1, CHUNK_BUDGET // max(1, len(corners_u)))
    for shift in shifts:
        tri = (corners_u + shift) @ basis.T
        for start in range(0, n_points, chunk):
            sl = slice(start, start + chunk)
            dist, row, grazing = _first_hits(points[sl], tri, RAY_DIRECTION, length)
            hit_label = outcome[row]
            closer = dist < best[sl] - 1e-12 * length
            tie = np.abs(dist - best[sl]) <= 1e-12 * length
            conflict = tie & np.isfinite(dist) & (hit_label != label[sl])
            ambiguous[sl] = np.where(closer, grazing, ambiguous[sl] | conflict)
            best[sl] = np.where(closer, dist, best[sl])
            label[sl] = np.where(closer, hit_label, label[sl])
    label[ambiguous] = -1
    return label


def classify_points(mesh, points_u: np.ndarray, seed: int = 0) -> np.ndarray:
    """Region id for each point (lattice coordinates), -1 if still ambiguous after retries.

    Ambiguous points are nudged by a small seeded perturbation and recast.
    """
    points_u = np.asarray(points_u, dtype=float).reshape(-1, 3)
    labels = _cast(mesh, points_u, length_factor=2.0)
    rng = np.random.default_rng(seed + 1)
    for attempt in range(CLASSIFICATION_RETRIES):
        todo = np.nonzero(labels < 0)[0]
        if todo.size == 0:
            break
        logger.debug("Recasting %d ambiguous points (attempt %d)", todo.size, attempt + 1)
        nudged = points_u[todo] + PERTURBATION * rng.standard_normal((todo.size, 3))
        nudged = nudged - np.floor(nudged)
        labels[todo] = _cast(mesh, nudged, length_factor=2.0 * (attempt + 2))
    return labels
