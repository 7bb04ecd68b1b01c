"""Area and volume functionals with their exact gradients.

Body volumes use the flux of the field ``u_j(x) * a_j`` through the region boundary,
where ``a_j`` is a period vector along which no boundary cycle of the region wraps and
``u_j`` is the matching lattice coordinate, lifted consistently along the boundary.
The field has unit divergence and is periodic in the other two directions, so the
flux equals the enclosed volume up to a whole multiple of the cell volume. That
multiple is the body's volume constant ``k``.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ska_sdp_double_bubble.configuration.config import CLASSIFICATION_RETRIES, ORACLE_FAILURE_RATE
from ska_sdp_double_bubble.geometry.mesh import BODY_REGIONS, Mesh, lift_boundary
from ska_sdp_double_bubble.geometry.raycast import classify_points
from ska_sdp_double_bubble.utilities.errors import (
    AnchoringError,
    ClassificationError,
    InvalidMeshError,
    OracleUnreliableError,
    PreconditionError,
)

logger = logging.getLogger(__name__)


@dataclass
class GradientField:
    """Per-vertex ambient vectors, one row per live vertex."""

    vertex_ids: np.ndarray
    vectors: np.ndarray

    def to_dict(self) -> dict:
        """JSON-ready form keyed by vertex id."""
        return {str(int(v)): vec.tolist() for v, vec in zip(self.vertex_ids, self.vectors)}


@dataclass
class VolumeReading:
    """Facet-sum volume anchored by the integer constant ``k``."""

    raw: float
    constant: int
    det: float

    @property
    def value(self) -> float:
        """Anchored volume."""
        return self.raw + self.constant * self.det


@dataclass
class RegionEstimate:
    """Monte Carlo volume estimate with its standard error."""

    region: int
    estimate: float
    stderr: float


def _field(mesh: Mesh, positions: np.ndarray | None = None) -> np.ndarray:
    """Positions as a full array (tombstoned rows included)."""
    return mesh.positions if positions is None else positions


def area_vectors(mesh: Mesh, positions: np.ndarray | None = None) -> np.ndarray:
    """Half cross products of the facet edges, shape (F, 3)."""
    corners = mesh.corner_positions(positions)
    return 0.5 * np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0])


def facet_areas(mesh: Mesh, positions: np.ndarray | None = None) -> np.ndarray:
    """Area of every live facet, in frame order."""
    return np.linalg.norm(area_vectors(mesh, positions), axis=1)


def total_area(mesh: Mesh, positions: np.ndarray | None = None) -> float:
    """Sum of facet areas; every wall is counted once."""
    return float(facet_areas(mesh, positions).sum())


def _area_gradient_array(mesh: Mesh, positions: np.ndarray | None = None) -> np.ndarray:
    frame = mesh.frame()
    corners = mesh.corner_positions(positions)
    vec = 0.5 * np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0])
    norm = np.linalg.norm(vec, axis=1)
    unit = np.divide(vec, norm[:, None], out=np.zeros_like(vec), where=norm[:, None] > 0)
    grad = np.zeros((len(mesh.vertex_alive), 3))
    for k in range(3):
        opposite = corners[:, (k + 1) % 3] - corners[:, (k + 2) % 3]
        np.add.at(grad, frame.corners[:, k], 0.5 * np.cross(opposite, unit))
    return grad


def _as_field(mesh: Mesh, grad: np.ndarray) -> GradientField:
    ids = np.asarray(mesh.live_vertex_ids(), dtype=np.int64)
    return GradientField(vertex_ids=ids, vectors=grad[ids])


def area_gradient(mesh: Mesh) -> GradientField:
    """Exact gradient of ``total_area`` with respect to ambient vertex positions."""
    return _as_field(mesh, _area_gradient_array(mesh))


def volume_lift(mesh: Mesh, region: int) -> tuple[int, np.ndarray, np.ndarray, np.ndarray]:
    """Lift data for a region's volume.

    Returns the axis ``j``, the per-vertex integer lift along ``j``, the frame rows of
    the boundary facets and their orientation (+1 when the normal points outward).
    """
    key = ("volume_lift", region)
    if key in mesh.cache:
        return mesh.cache[key]
    frame = mesh.frame()
    rows = np.nonzero((frame.front == region) | (frame.back == region))[0]
    orientation = np.where(frame.back[rows] == region, 1.0, -1.0)
    facet_ids = frame.facet_ids[rows].tolist()
    for axis in (2, 1, 0):
        lift = lift_boundary(mesh, facet_ids, axes=(axis,))
        if lift is not None:
            heights = np.zeros(len(mesh.vertex_alive), dtype=np.int64)
            for vid, offset in lift.items():
                heights[vid] = offset[axis]
            result = (axis, heights, rows, orientation)
            mesh.cache[key] = result
            return result
    raise InvalidMeshError(f"Boundary of region {region} wraps along every period")


def raw_volume(mesh: Mesh, region: int, positions: np.ndarray | None = None) -> float:
    """Unanchored facet-flux volume of a region."""
    axis, heights, rows, orientation = volume_lift(mesh, region)
    frame = mesh.frame()
    u = _field(mesh, positions)
    corners = frame.corners[rows]
    lam = u[corners, axis] + heights[corners]
    vec = area_vectors(mesh, positions)[rows]
    period = mesh.lattice.basis[:, axis]
    return float(np.sum(orientation * lam.mean(axis=1) * (vec @ period)))


def body_volume(mesh: Mesh, region: int, positions: np.ndarray | None = None) -> VolumeReading:
    """
    Anchored volume of a constrained region.

    Raises:
        AnchoringError: if the anchored value is outside (0, det).
    """
    if region not in BODY_REGIONS:
        raise PreconditionError(f"Region must be 1 or 2, got {region}")
    det = mesh.lattice.det
    reading = VolumeReading(raw_volume(mesh, region, positions), mesh.body(region).k, det)
    if not 0.0 < reading.value < det:
        raise AnchoringError(
            f"Region {region} volume {reading.value:.6g} outside (0, {det:.6g}); "
            "volume constant is stale"
        )
    return reading


def complement_volume(mesh: Mesh) -> float:
    """Volume of R0 from the partition identity."""
    return mesh.lattice.det - body_volume(mesh, 1).value - body_volume(mesh, 2).value


def anchor(mesh: Mesh, region: int, reference: float):
    """Choose the body's volume constant so its value is nearest ``reference``."""
    det = mesh.lattice.det
    body = mesh.body(region)
    body.k = int(np.rint((reference - raw_volume(mesh, region)) / det))


def reanchor(mesh: Mesh, previous: dict[int, float]):
    """Re-anchor both bodies after a topology change, keeping values continuous."""
    for region, value in previous.items():
        anchor(mesh, region, value)


def volume_values(mesh: Mesh, positions: np.ndarray | None = None) -> dict[int, float]:
    """Anchored values of both bodies."""
    return {r: body_volume(mesh, r, positions).value for r in BODY_REGIONS}


def _volume_gradient_array(
    mesh: Mesh, region: int, positions: np.ndarray | None = None
) -> np.ndarray:
    axis, heights, rows, orientation = volume_lift(mesh, region)
    frame = mesh.frame()
    u = _field(mesh, positions)
    corners_idx = frame.corners[rows]
    corners = mesh.corner_positions(positions)[rows]
    lam = u[corners_idx, axis] + heights[corners_idx]
    mean_lam = lam.mean(axis=1)
    period = mesh.lattice.basis[:, axis]
    row = mesh.lattice.inverse[axis]
    vec = 0.5 * np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0])
    flux_area = vec @ period

    grad = np.zeros((len(mesh.vertex_alive), 3))
    for k in range(3):
        opposite = corners[:, (k + 1) % 3] - corners[:, (k + 2) % 3]
        term = (flux_area / 3.0)[:, None] * row[None, :]
        term = term + mean_lam[:, None] * 0.5 * np.cross(opposite, period[None, :])
        np.add.at(grad, corners_idx[:, k], orientation[:, None] * term)
    return grad


def volume_gradient(mesh: Mesh, region: int) -> GradientField:
    """Exact gradient of a body's volume; zero off the region's boundary."""
    if region not in BODY_REGIONS:
        raise PreconditionError(f"Region must be 1 or 2, got {region}")
    return _as_field(mesh, _volume_gradient_array(mesh, region))


def point_region(mesh: Mesh, point, seed: int = 0) -> int:
    """Region containing a point given in lattice coordinates."""
    regions = classify_points(mesh, np.asarray(point, dtype=float).reshape(1, 3), seed=seed)
    if regions[0] < 0:
        raise ClassificationError(
            f"Point {point} is ambiguous after {CLASSIFICATION_RETRIES} perturbed retries"
        )
    return int(regions[0])


def monte_carlo_volumes(mesh: Mesh, n_samples: int, seed: int = 0) -> dict[int, RegionEstimate]:
    """
    Estimate region volumes by uniform sampling of the fundamental domain.

    Args:
        mesh: a valid, watertight mesh.
        n_samples: number of sample points, at least 1.
        seed: generator seed; identical seeds give identical estimates.

    Returns:
        dict: region id to ``RegionEstimate`` for regions 0, 1 and 2.

    Raises:
        PreconditionError: if ``n_samples`` < 1.
        OracleUnreliableError: if more than 0.1% of the samples stay ambiguous.
    """
    if n_samples < 1:
        raise PreconditionError(f"Need at least one sample, got {n_samples}")
    rng = np.random.default_rng(seed)
    points = rng.random((n_samples, 3))
    regions = classify_points(mesh, points, seed=seed)
    failures = int(np.count_nonzero(regions < 0))
    if failures > ORACLE_FAILURE_RATE * n_samples:
        raise OracleUnreliableError(f"{failures} of {n_samples} samples could not be classified")
    det = mesh.lattice.det
    counted = n_samples - failures
    estimates = {}
    for region in (0, 1, 2):
        fraction = np.count_nonzero(regions == region) / counted
        estimates[region] = RegionEstimate(
            region=region,
            estimate=det * fraction,
            stderr=det * np.sqrt(fraction * (1.0 - fraction) / counted),
        )
    logger.info(
        "Monte Carlo volumes from %d samples: %s",
        n_samples,
        {r: round(e.estimate, 6) for r, e in estimates.items()},
    )
    return estimates
