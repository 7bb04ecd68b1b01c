"""Circular-arc closed forms for double bubbles and their flat-torus cross sections.

Angles are in radians. A cap or arc is described by its half chord ``c`` and its
tangent-chord angle ``theta``; negative angles bulge to the other side.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, root

from ska_sdp_double_bubble.utilities.errors import InvalidParameterError

logger = logging.getLogger(__name__)

THIRD_TURN = 2.0 * math.pi / 3.0
SMALL_ANGLE = 1e-7
ROOT_XTOL = 1e-14


# Plane arcs


def segment_area(c: float, theta: float) -> float:
    """Signed area between a chord of half length ``c`` and its arc."""
    if abs(theta) < SMALL_ANGLE:
        return c * c * 2.0 * theta / 3.0
    return c * c * (theta - math.sin(theta) * math.cos(theta)) / math.sin(theta) ** 2


def arc_length(c: float, theta: float) -> float:
    """Length of the arc over a chord of half length ``c``."""
    theta = abs(theta)
    if theta < SMALL_ANGLE:
        return 2.0 * c
    return 2.0 * c * theta / math.sin(theta)


def arc_bulge(c: float, theta: float) -> float:
    """Signed distance from the chord to the arc midpoint."""
    return c * math.tan(theta / 2.0)


def arc_span(c: float, theta: float) -> float:
    """Extent of the arc along its chord direction."""
    if abs(theta) > math.pi / 2:
        return 2.0 * c / math.sin(abs(theta))
    return 2.0 * c


def segment_centroid_offset(c: float, theta: float) -> float:
    """Distance from the chord to the centroid of the segment (positive angle)."""
    if theta < SMALL_ANGLE:
        return 0.0
    radius = c / math.sin(theta)
    sweep = 2.0 * theta - math.sin(2.0 * theta)
    from_centre = 4.0 * radius * math.sin(theta) ** 3 / (3.0 * sweep)
    return from_centre - radius * math.cos(theta)


# Spherical caps


def cap_volume(c: float, theta: float) -> float:
    """Signed volume between a disk of radius ``c`` and its spherical cap."""
    height = arc_bulge(c, theta)
    return math.pi * height * (3.0 * c * c + height * height) / 6.0


def cap_area(c: float, theta: float) -> float:
    """Area of a spherical cap over a disk of radius ``c``."""
    return math.pi * c * c / math.cos(theta / 2.0) ** 2


def _radius(c: float, theta: float) -> float:
    if abs(theta) < SMALL_ANGLE:
        return math.inf
    return c / math.sin(abs(theta))


@dataclass(frozen=True)
class DoubleBubbleShape:
    """Three caps (or arcs) meeting at 120 degrees on a common rim of half width ``c``.

    ``theta_large`` bounds the larger region, ``theta_small`` the smaller and
    ``theta_mid`` is the separating surface, bulging into the larger region.
    """

    c: float
    theta_large: float
    theta_small: float
    theta_mid: float
    measure: float
    radii: tuple[float, float, float]
    swapped: bool = False

    @property
    def radius_interface(self) -> float:
        """Radius of the separating surface; infinite when it is flat."""
        return self.radii[0]


def _solve_ratio(ratio: float, measures) -> float:
    """Middle angle in [0, 60 deg) such that large/small measure equals ``ratio``."""
    if ratio <= 1.0 + 1e-15:
        return 0.0

    def residual(theta_mid):
        large, small = measures(1.0, theta_mid)
        return large / small - ratio

    upper = math.pi / 3.0 - 1e-9
    return brentq(residual, 0.0, upper, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)


def _caps_3d(c: float, theta_mid: float) -> tuple[float, float]:
    large = cap_volume(c, theta_mid + THIRD_TURN) - cap_volume(c, theta_mid)
    small = cap_volume(c, THIRD_TURN - theta_mid) + cap_volume(c, theta_mid)
    return large, small


def _arcs_2d(c: float, theta_mid: float) -> tuple[float, float]:
    large = segment_area(c, theta_mid + THIRD_TURN) - segment_area(c, theta_mid)
    small = segment_area(c, THIRD_TURN - theta_mid) + segment_area(c, theta_mid)
    return large, small


def _double_bubble(v1: float, v2: float, dimension: int) -> DoubleBubbleShape:
    if v1 <= 0 or v2 <= 0:
        raise InvalidParameterError(f"Volumes must be positive, got {v1}, {v2}")
    large, small = max(v1, v2), min(v1, v2)
    measures = _caps_3d if dimension == 3 else _arcs_2d
    theta_mid = _solve_ratio(large / small, measures)
    unit_large, _ = measures(1.0, theta_mid)
    c = (large / unit_large) ** (1.0 / dimension)
    theta_large = theta_mid + THIRD_TURN
    theta_small = THIRD_TURN - theta_mid
    if dimension == 3:
        measure = cap_area(c, theta_large) + cap_area(c, theta_small) + cap_area(c, theta_mid)
    else:
        measure = sum(arc_length(c, t) for t in (theta_large, theta_small, theta_mid))
    radii = (_radius(c, theta_mid), _radius(c, theta_large), _radius(c, theta_small))
    return DoubleBubbleShape(c, theta_large, theta_small, theta_mid, measure, radii, v1 < v2)


def sdb_closed_form(v1: float, v2: float) -> tuple[float, float, float, float]:
    """
    Standard double bubble in space.

    Returns:
        tuple: (area, r0, r1, r2) with r1 the cap radius of the ``v1`` bubble, r2 of the
        ``v2`` bubble and r0 the interface radius (infinite for equal volumes);
        1/r0 = |1/r2 - 1/r1|.
    """
    shape = _double_bubble(v1, v2, 3)
    r_mid, r_large, r_small = shape.radii
    r1, r2 = (r_small, r_large) if shape.swapped else (r_large, r_small)
    return shape.measure, r_mid, r1, r2


def sdb_shape(v1: float, v2: float) -> DoubleBubbleShape:
    """Cap geometry of the standard double bubble."""
    return _double_bubble(v1, v2, 3)


def planar_double_bubble(a1: float, a2: float) -> DoubleBubbleShape:
    """Standard double bubble in the plane; ``measure`` is the perimeter."""
    return _double_bubble(a1, a2, 2)


def double_bubble_extent(shape: DoubleBubbleShape) -> tuple[float, float]:
    """Width across the rim plane and span along it."""
    width = arc_bulge(shape.c, shape.theta_large) + arc_bulge(shape.c, shape.theta_small)
    span = max(arc_span(shape.c, shape.theta_large), arc_span(shape.c, shape.theta_small))
    return width, span


# Plane torus cross sections


@dataclass
class CrossSection:
    """A two-region partition of a rectangular flat 2-torus."""

    kind: str
    perimeter: float
    feasible: bool
    reason: str = ""
    params: dict = field(default_factory=dict)


def _infeasible(kind: str, reason: str) -> CrossSection:
    return CrossSection(kind, math.inf, False, reason)


def disk_pair(a1: float, a2: float, width: float, height: float, factor: float) -> CrossSection:
    """Planar double bubble with its rim chord along the ``height`` direction."""
    shape = planar_double_bubble(a1, a2)
    across, span = double_bubble_extent(shape)
    if across >= 2 * factor * width or span >= 2 * factor * height:
        return _infeasible(
            "disk_pair",
            f"double bubble {across:.4g} x {span:.4g} exceeds {2 * factor} x torus "
            f"{width:.4g} x {height:.4g}",
        )
    return CrossSection("disk_pair", shape.measure, True, params={"shape": shape})


def band_lens(
    band_area: float, lens_area: float, length: float, height: float, factor: float
) -> CrossSection:
    """Band of full length with a lens sitting on one of its two lines."""
    theta = math.pi / 3.0
    c = math.sqrt(lens_area / (2.0 * segment_area(1.0, theta)))
    thickness = (band_area + lens_area / 2.0) / length
    bulge = arc_bulge(c, theta)
    if 2 * c >= 2 * factor * length:
        return _infeasible("band_lens", f"lens chord {2 * c:.4g} too long for period {length:.4g}")
    if bulge >= thickness or thickness + bulge >= 2 * factor * height:
        return _infeasible(
            "band_lens",
            f"lens height {bulge:.4g} does not fit band {thickness:.4g} in {height:.4g}",
        )
    perimeter = 2.0 * length - 2.0 * c + 2.0 * arc_length(c, theta)
    return CrossSection(
        "band_lens", perimeter, True, params={"c": c, "thickness": thickness, "theta": theta}
    )


def double_band(a1: float, a2: float, length: float, height: float) -> CrossSection:
    """Three parallel lines of full length."""
    if a1 + a2 >= length * height:
        return _infeasible("double_band", "bands do not fit")
    return CrossSection(
        "double_band",
        3.0 * length,
        True,
        params={"t1": a1 / length, "t2": a2 / length},
    )


def _chain_measures(c: float, ell1: float, ell2: float, theta_mid: float):
    theta1 = math.pi / 6.0 + theta_mid
    theta2 = math.pi / 6.0 - theta_mid
    area1 = 2 * c * ell1 + 2 * segment_area(ell1 / 2, theta1) - 2 * segment_area(c, theta_mid)
    area2 = 2 * c * ell2 + 2 * segment_area(ell2 / 2, theta2) + 2 * segment_area(c, theta_mid)
    pressure = (
        2 * math.sin(theta2) / ell2 - 2 * math.sin(theta1) / ell1 - math.sin(theta_mid) / c
    )
    return area1, area2, pressure, theta1, theta2


def symmetric_chain(a1: float, a2: float, length: float, height: float, factor: float):
    """Alternating cells of a closed chain around one period, arcs meeting at 120 degrees."""

    def equations(x):
        c, ell1, theta_mid = x
        if c <= 0 or not 0 < ell1 < length:
            return [1e3, 1e3, 1e3]
        area1, area2, pressure, _, _ = _chain_measures(c, ell1, length - ell1, theta_mid)
        return [area1 - a1, area2 - a2, pressure * c]

    guess = [(a1 + a2) / (2.0 * length), length * a1 / (a1 + a2), 0.0]
    solution = root(equations, guess, method="hybr", options={"xtol": 1e-13})
    if not solution.success or np.max(np.abs(equations(solution.x))) > 1e-10:
        return _infeasible("symmetric_chain", f"chain equations unsolved: {solution.message}")
    c, ell1, theta_mid = (float(v) for v in solution.x)
    ell2 = length - ell1
    _, _, _, theta1, theta2 = _chain_measures(c, ell1, ell2, theta_mid)
    if not abs(theta_mid) < math.pi / 6.0:
        return _infeasible("symmetric_chain", "separating arcs pinch a cell")
    thickness = 2 * (c + max(arc_bulge(ell1 / 2, theta1), arc_bulge(ell2 / 2, theta2)))
    if thickness >= 2 * factor * height:
        return _infeasible(
            "symmetric_chain", f"chain thickness {thickness:.4g} exceeds torus {height:.4g}"
        )
    perimeter = (
        2 * arc_length(ell1 / 2, theta1)
        + 2 * arc_length(ell2 / 2, theta2)
        + 2 * arc_length(c, theta_mid)
    )
    params = {
        "c": c,
        "ell1": ell1,
        "ell2": ell2,
        "theta_mid": theta_mid,
        "theta1": theta1,
        "theta2": theta2,
    }
    return CrossSection("symmetric_chain", perimeter, True, params=params)


def t2_double_bubble(
    a1: float, a2: float, width: float, height: float, factor: float = 0.45
) -> dict[str, CrossSection]:
    """
    Every cross-section family in a ``width`` x ``height`` rectangular 2-torus.

    Each family is evaluated in the orientation and role assignment giving the least
    perimeter.
    """
    if a1 <= 0 or a2 <= 0 or a1 + a2 >= width * height:
        raise InvalidParameterError(f"Areas {a1}, {a2} do not fit a {width} x {height} torus")
    orientations = ((width, height), (height, width))
    families = {}
    families["disk_pair"] = min(
        (disk_pair(a1, a2, w, h, factor) for w, h in orientations), key=lambda s: s.perimeter
    )
    families["band_lens"] = min(
        (
            band_lens(band, lens, w, h, factor)
            for w, h in orientations
            for band, lens in ((a1, a2), (a2, a1))
        ),
        key=lambda s: s.perimeter,
    )
    families["symmetric_chain"] = min(
        (symmetric_chain(a1, a2, w, h, factor) for w, h in orientations),
        key=lambda s: s.perimeter,
    )
    families["double_band"] = min(
        (double_band(a1, a2, w, h) for w, h in orientations), key=lambda s: s.perimeter
    )
    return families


def t2_minimum(a1: float, a2: float, width: float, height: float) -> CrossSection:
    """Least-perimeter feasible family."""
    families = t2_double_bubble(a1, a2, width, height)
    return min(families.values(), key=lambda s: s.perimeter)


# Single bubbles


def single_bubble_areas(periods, widths, det: float, v: float, factor: float) -> dict[str, float]:
    """Sphere, tube and slab areas enclosing ``v``; infeasible shapes are omitted."""
    if not 0.0 < v < det:
        raise InvalidParameterError(f"Volume {v} outside (0, {det})")
    areas = {}
    radius = (3.0 * v / (4.0 * math.pi)) ** (1.0 / 3.0)
    if radius < factor * min(widths):
        areas["sphere"] = (36.0 * math.pi) ** (1.0 / 3.0) * v ** (2.0 / 3.0)
    tubes = []
    for axis, period in enumerate(periods):
        transverse = min(w for j, w in enumerate(widths) if j != axis)
        if math.sqrt(v / (math.pi * period)) < factor * transverse:
            tubes.append(2.0 * math.sqrt(math.pi * v * period))
    if tubes:
        areas["tube"] = min(tubes)
    areas["slab"] = 2.0 * min(det / w for w in widths)
    return areas
