"""Volumes cut off by pairs of parallel flat tori, and planes halving both bodies.

A plane pair is indexed by a rotation angle ``alpha`` about the tube axis and an
offset ``t``. Its normal is ``(-sin alpha, cos alpha)`` in the transverse plane and
its slab is the set of points whose height along the normal, in units of the period
of the second transverse axis, has fractional part in ``[t, t + 1/2)``. At
``alpha = 0`` these are the flat tori parallel to the tube axis and the first
transverse axis, half a period apart.

The clipped volume of a body is the flux of ``g(h) n`` through its boundary, where
``h`` is the height and ``g`` the measure of the slab below ``h``. Facets crossing a
slab boundary are split so that ``g`` is linear on every piece.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ska_sdp_double_bubble.configuration.config import ALPHA_SAMPLES, HALVING_TOL
from ska_sdp_double_bubble.geometry import metrics
from ska_sdp_double_bubble.geometry.mesh import BODY_REGIONS, Mesh, lift_boundary, region_boundary
from ska_sdp_double_bubble.geometry.validation import require_valid
from ska_sdp_double_bubble.utilities.errors import (
    PreconditionError,
    ResolutionError,
    UnsupportedLatticeError,
)

logger = logging.getLogger(__name__)

OFFSET_SAMPLES = 64


@dataclass(frozen=True)
class PlanePair:
    """Two parallel flat tori half a period apart and the slab between them."""

    alpha: float
    offset: float
    axis: int = 2
    halving_errors: dict[int, float] = field(default_factory=dict, compare=False)

    def complement(self) -> "PlanePair":
        """The pair bounding the other half of the cell."""
        return PlanePair(self.alpha, (self.offset + 0.5) % 1.0, self.axis)

    def normal(self) -> np.ndarray:
        """Unit normal in ambient coordinates."""
        first, second = (self.axis + 1) % 3, (self.axis + 2) % 3
        normal = np.zeros(3)
        normal[first] = -math.sin(self.alpha)
        normal[second] = math.cos(self.alpha)
        return normal

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "offset": self.offset,
            "axis": self.axis,
            "halving_errors": {str(k): v for k, v in self.halving_errors.items()},
        }


@dataclass
class LiftedBody:
    """Boundary triangles of one body, unwrapped in the transverse directions."""

    region: int
    triangles: np.ndarray
    orientation: np.ndarray
    volume: float


def _require_rectangular(mesh: Mesh):
    if not mesh.lattice.is_rectangular:
        raise UnsupportedLatticeError(
            f"Plane pairs are only defined on rectangular tori, got {mesh.lattice.kind.value}"
        )


def lift_bodies(mesh: Mesh, axis: int = 2) -> dict[int, LiftedBody]:
    """
    Unwrap both bodies so they sit in one copy of the transverse plane.

    Raises:
        PreconditionError: if the double bubble does not fit inside a cylinder around
            ``axis``.
    """
    transverse = [(axis + 1) % 3, (axis + 2) % 3]
    facet_ids = sorted({f for r in BODY_REGIONS for f in region_boundary(mesh, r)})
    lift = lift_boundary(mesh, facet_ids, axes=transverse)
    if lift is None:
        raise PreconditionError(
            f"Double bubble wraps around a period transverse to axis {axis}; "
            "it does not lie inside a cylinder"
        )
    frame = mesh.frame()
    rows = np.array([frame.facet_row[f] for f in facet_ids], dtype=np.int64)
    shifts = np.array([lift[int(v)] for v in frame.corners[rows, 0]], dtype=float)
    unwrapped = mesh.positions[frame.corners[rows]] + frame.offsets[rows] + shifts[:, None, :]
    triangles = unwrapped @ mesh.lattice.basis.T

    points = triangles[..., transverse].reshape(-1, 2)
    centre = (points.min(axis=0) + points.max(axis=0)) / 2.0
    radius = float(np.max(np.linalg.norm(points - centre, axis=1)))
    diameter_limit = float(min(mesh.lattice.periods[transverse]))
    if 2.0 * radius >= diameter_limit:
        raise PreconditionError(
            f"Double bubble spans {2 * radius:.4g} across axis {axis}, "
            f"no disk of the {diameter_limit:.4g} period holds it"
        )

    values = metrics.volume_values(mesh)
    bodies = {}
    for region in BODY_REGIONS:
        orientation = np.array([mesh.facets[f].orientation(region) for f in facet_ids])
        keep = orientation != 0
        bodies[region] = LiftedBody(region, triangles[keep], orientation[keep], values[region])
    return bodies


def _antiderivative(s: np.ndarray) -> np.ndarray:
    """Measure of the slab [0, 1/2) mod 1 below ``s``, in periods."""
    whole = np.floor(s)
    return 0.5 * whole + np.minimum(s - whole, 0.5)


def _split(polygon: list[np.ndarray], heights: list[float], level: float):
    below, above = [], []
    count = len(polygon)
    for i in range(count):
        p, q = polygon[i], polygon[(i + 1) % count]
        hp, hq = heights[i], heights[(i + 1) % count]
        (below if hp <= level else above).append((p, hp))
        if (hp - level) * (hq - level) < 0:
            cut = p + (level - hp) / (hq - hp) * (q - p)
            below.append((cut, level))
            above.append((cut, level))
    return below, above


def _piece_integral(piece, normal: np.ndarray, period: float, offset: float) -> float:
    """Flux of g(h) n through a planar polygon on which g is linear."""
    if len(piece) < 3:
        return 0.0
    points = [p for p, _ in piece]
    flux = 0.0
    for i in range(1, len(points) - 1):
        area_vector = 0.5 * np.cross(points[i] - points[0], points[i + 1] - points[0])
        centroid = (points[0] + points[i] + points[i + 1]) / 3.0
        s = np.dot(centroid, normal) / period - offset
        flux += float(np.dot(area_vector, normal)) * period * float(_antiderivative(s))
    return flux


def _clipped(body: LiftedBody, pair: PlanePair, period: float) -> float:
    normal = pair.normal()
    heights = body.triangles @ normal / period - pair.offset
    low = np.floor(2.0 * heights.min(axis=1))
    high = np.floor(2.0 * heights.max(axis=1))
    smooth = low == high

    area_vectors = 0.5 * np.cross(
        body.triangles[:, 1] - body.triangles[:, 0], body.triangles[:, 2] - body.triangles[:, 0]
    )
    centroid_s = heights.mean(axis=1)
    flux = np.sum(
        body.orientation[smooth]
        * (area_vectors[smooth] @ normal)
        * period
        * _antiderivative(centroid_s[smooth])
    )
    for row in np.flatnonzero(~smooth):
        polygon = list(body.triangles[row])
        levels = heights[row].tolist()
        for k in range(int(low[row]) + 1, int(high[row]) + 1):
            level = k / 2.0
            below, above = _split(polygon, levels, level)
            flux += body.orientation[row] * _piece_integral(below, normal, period, pair.offset)
            polygon = [p for p, _ in above]
            levels = [h for _, h in above]
        piece = list(zip(polygon, levels))
        flux += body.orientation[row] * _piece_integral(piece, normal, period, pair.offset)
    return float(flux)


def clipped_volume(mesh: Mesh, plane_pair: PlanePair, region: int) -> float:
    """
    Volume of a body inside the slab of a plane pair.

    Args:
        mesh: a valid mesh on a rectangular torus whose bubble lies in a cylinder.
        plane_pair: the slab.
        region: 1 or 2.

    Raises:
        UnsupportedLatticeError: on a non-rectangular lattice.
        PreconditionError: if the bubble is not contained in a cylinder.
    """
    _require_rectangular(mesh)
    require_valid(mesh)
    bodies = lift_bodies(mesh, plane_pair.axis)
    period = float(mesh.lattice.periods[(plane_pair.axis + 2) % 3])
    return _clipped(bodies[region], plane_pair, period)


class _Halver:
    """Clipped volumes of a lifted double bubble with the smallest halving offsets."""

    def __init__(self, bodies: dict[int, LiftedBody], axis: int, period: float):
        self.bodies = bodies
        self.axis = axis
        self.period = period

    def excess(self, region: int, alpha: float, offset: float) -> float:
        body = self.bodies[region]
        clipped = _clipped(body, PlanePair(alpha, offset, self.axis), self.period)
        return clipped - body.volume / 2.0

    def offset(self, alpha: float) -> float:
        """Smallest offset in [0, 1/2] whose slab holds half of body 1."""
        grid = np.linspace(0.0, 0.5, OFFSET_SAMPLES + 1)
        values = [self.excess(1, alpha, t) for t in grid]
        for a, b, fa, fb in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
            if fa == 0.0:
                return float(a)
            if fa * fb < 0.0:
                return float(brentq(lambda t: self.excess(1, alpha, t), a, b, xtol=1e-14))
        # excess(t + 1/2) = -excess(t), so an exact zero at 1/2 is the remaining case
        return 0.5

    def imbalance(self, alpha: float) -> float:
        return self.excess(2, alpha, self.offset(alpha))


def bisecting_planes(mesh: Mesh, axis: int = 2, samples: int = ALPHA_SAMPLES) -> PlanePair:
    """
    Find a plane pair cutting both bodies in half.

    For each sampled rotation the smallest offset halving body 1 is chosen, then the
    rotation is bisected on the sign of the body-2 imbalance.

    Args:
        mesh: a valid mesh on a rectangular torus.
        axis: the period the containing cylinder runs along.
        samples: rotation samples over [0, pi].

    Returns:
        PlanePair: with ``halving_errors`` per body.

    Raises:
        UnsupportedLatticeError: on a non-rectangular lattice.
        PreconditionError: if the bubble is not contained in a cylinder.
        ResolutionError: if no sign change is found or the halving tolerance is missed.
    """
    _require_rectangular(mesh)
    require_valid(mesh)
    bodies = lift_bodies(mesh, axis)
    halver = _Halver(bodies, axis, float(mesh.lattice.periods[(axis + 2) % 3]))

    alphas = np.linspace(0.0, math.pi, samples)
    imbalances = [halver.imbalance(alpha) for alpha in alphas]
    alpha = None
    for a, b, fa, fb in zip(alphas[:-1], alphas[1:], imbalances[:-1], imbalances[1:]):
        if fa == 0.0:
            alpha = float(a)
            break
        if fa * fb < 0.0:
            alpha = float(brentq(halver.imbalance, a, b, xtol=1e-12))
            break
    if alpha is None:
        # symmetric bodies leave only rounding noise, which need not change sign
        best = int(np.argmin(np.abs(imbalances)))
        if abs(imbalances[best]) <= HALVING_TOL * bodies[2].volume:
            alpha = float(alphas[best])
    if alpha is None:
        raise ResolutionError(
            f"No sign change of the second-body imbalance over {samples} rotations; "
            "try a denser sweep"
        )

    offset = halver.offset(alpha)
    errors = {region: abs(halver.excess(region, alpha, offset)) for region in BODY_REGIONS}
    for region, error in errors.items():
        if error > HALVING_TOL * bodies[region].volume:
            raise ResolutionError(
                f"Body {region} is halved to within {error:.3g}, above "
                f"{HALVING_TOL} of its volume; try a denser sweep"
            )
    pair = PlanePair(alpha, offset, axis, errors)
    logger.info("Bisecting planes at alpha %.9g, offset %.9g: %s", alpha, offset, errors)
    return pair
