"""Construction recipes for each candidate kind.

A recipe first plans the candidate (solves its circular-arc dimensions and checks
that they fit the torus) and then emits tagged triangles into a ``MeshBuilder``.
Region roles: ``large`` and ``small`` are the region ids holding the larger and the
smaller of the two volumes.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import root

from ska_sdp_double_bubble.catalog import builders, profiles
from ska_sdp_double_bubble.catalog.builders import MeshBuilder, Placement
from ska_sdp_double_bubble.catalog.honeycomb import solve_honeycomb
from ska_sdp_double_bubble.configuration.config import (
    CIRCLE_SEGMENTS,
    EXTRUSION_SEGMENTS,
    FEASIBILITY_FACTOR,
)
from ska_sdp_double_bubble.geometry.lattice import Lattice, LatticeKind
from ska_sdp_double_bubble.utilities.errors import InfeasibleSpecError, UnsupportedLatticeError

logger = logging.getLogger(__name__)

LENS_ANGLE = math.pi / 3.0
BEAD_ANGLE = math.pi / 6.0


@dataclass
class Plan:
    """Solved dimensions of a candidate."""

    lattice: Lattice
    axis: int
    large: int
    small: int
    refinement: int
    params: dict = field(default_factory=dict)
    area: float | None = None
    note: str = ""

    @property
    def segments(self) -> int:
        """Angular segments of revolved surfaces."""
        return CIRCLE_SEGMENTS * 2**self.refinement

    @property
    def extrusion(self) -> int:
        """Segments along an extrusion period."""
        return EXTRUSION_SEGMENTS * 2**self.refinement

    def placement(self) -> Placement:
        """Local frame with z along the plan axis, centred in the cell."""
        return Placement.along(self.lattice, self.axis)


@dataclass(frozen=True)
class Recipe:
    """Plan and emit functions of one kind."""

    plan: Callable[..., Plan]
    emit: Callable[[MeshBuilder, Plan], None]


def require(condition: bool, message: str):
    """Raise an infeasibility error naming the violated bound."""
    if not condition:
        raise InfeasibleSpecError(message)


def require_rectangular(lattice: Lattice, code: str):
    """Product and slab constructions need a box-shaped cell."""
    if not lattice.is_rectangular:
        raise UnsupportedLatticeError(f"{code} is only built on cubic and rect lattices")


def roles(v1: float, v2: float) -> tuple[int, int, float, float]:
    """(large region, small region, large volume, small volume)."""
    if v1 >= v2:
        return 1, 2, v1, v2
    return 2, 1, v2, v1


def transverse_width(lattice: Lattice, axis: int) -> float:
    """Narrowest lattice-plane spacing across ``axis``."""
    return float(min(w for j, w in enumerate(lattice.widths) if j != axis))


def _slab_axis(lattice: Lattice) -> int:
    return int(np.argmin([lattice.face_area(j) for j in range(3)]))


def _tube_axis(lattice: Lattice) -> int:
    if not lattice.is_rectangular:
        return 2
    return int(np.argmin(lattice.periods))


def _fits(extent: float, width: float) -> bool:
    return extent < 2.0 * FEASIBILITY_FACTOR * width


# Standard double bubble


def plan_sdb(lattice: Lattice, v1: float, v2: float, refinement: int) -> Plan:
    """Caps about the third period, rim plane placed to centre the bubble."""
    large, small, _, _ = roles(v1, v2)
    shape = profiles.sdb_shape(v1, v2)
    height, span = profiles.double_bubble_extent(shape)
    require(
        _fits(height, lattice.widths[2]) and _fits(span, transverse_width(lattice, 2)),
        f"standard double bubble {span:.4g} wide and {height:.4g} tall must stay below "
        f"{2 * FEASIBILITY_FACTOR} of the cell widths {lattice.widths.round(6).tolist()}",
    )
    bulge_large = profiles.arc_bulge(shape.c, shape.theta_large)
    bulge_small = profiles.arc_bulge(shape.c, shape.theta_small)
    return Plan(
        lattice,
        2,
        large,
        small,
        refinement,
        params={"shape": shape, "z_rim": (bulge_small - bulge_large) / 2.0},
        area=shape.measure,
        note="spherical caps meeting at 120 degrees",
    )


def emit_sdb(builder: MeshBuilder, plan: Plan):
    """Three caps on the rim circle."""
    shape, z_rim = plan.params["shape"], plan.params["z_rim"]
    placement = plan.placement()
    segments = plan.segments
    caps = (
        (shape.theta_large, 0, plan.large),
        (shape.theta_mid, plan.large, plan.small),
        (-shape.theta_small, plan.small, 0),
    )
    for theta, front, back in caps:
        profile = builders.cap_profile(
            shape.c, theta, z_rim, builders.samples_for(theta, segments)
        )
        builders.revolve(builder, placement, profile, segments, front, back)


# Delaunay chain


def _bead_volume(rho: float, length: float) -> float:
    """Solid of revolution under a 30-degree arc of radius ``length`` over a neck chord."""
    half = length / 2.0
    radius = length
    centre = rho - radius * math.cos(BEAD_ANGLE)
    under_arc = half * math.sqrt(radius**2 - half**2) + radius**2 * math.asin(half / radius)
    square = 2.0 * half * radius**2 - 2.0 * half**3 / 3.0
    return math.pi * (2.0 * half * centre**2 + 2.0 * centre * under_arc + square)


def plan_delaunay_chain(lattice: Lattice, v1: float, v2: float, refinement: int) -> Plan:
    """Two beads around the shortest period joined by flat necks."""
    axis = _tube_axis(lattice)
    period = float(lattice.periods[axis])
    width = transverse_width(lattice, axis)

    def equations(x):
        rho, ell1 = x
        if rho <= 0 or not 0 < ell1 < period:
            return [1e3, 1e3]
        return [_bead_volume(rho, ell1) - v1, _bead_volume(rho, period - ell1) - v2]

    guess = [0.8 * math.sqrt((v1 + v2) / (math.pi * period)), period * v1 / (v1 + v2)]
    solution = root(equations, guess, method="hybr", options={"xtol": 1e-13})
    require(
        solution.success and max(abs(r) for r in equations(solution.x)) < 1e-10,
        f"no neck radius holds volumes {v1:.4g}, {v2:.4g} along period {period:.4g}",
    )
    rho, ell1 = (float(x) for x in solution.x)
    bulge = max(ell1, period - ell1) * (1.0 - math.cos(BEAD_ANGLE))
    require(
        _fits(2.0 * (rho + bulge), width),
        f"bead radius {rho + bulge:.4g} must be below {FEASIBILITY_FACTOR} x width {width:.4g}",
    )
    return Plan(
        lattice,
        axis,
        1,
        2,
        refinement,
        params={"rho": rho, "ell1": ell1, "period": period},
        note="no closed form",
    )


def emit_delaunay_chain(builder: MeshBuilder, plan: Plan):
    """Beads as 30-degree arcs revolved about the axis, necks as flat disks."""
    rho, ell1, period = plan.params["rho"], plan.params["ell1"], plan.params["period"]
    placement = plan.placement()
    segments = plan.segments
    bottom, middle, top = -period / 2.0, -period / 2.0 + ell1, period / 2.0
    for z0, z1, region in ((bottom, middle, 1), (middle, top, 2)):
        count = builders.samples_for(2 * BEAD_ANGLE, segments)
        profile = builders.arc_points((rho, z0), (rho, z1), -BEAD_ANGLE, count)
        builders.revolve(builder, placement, profile, segments, region, 0)
    disk_samples = max(3, segments // 6)
    for z, front, back in ((bottom, 1, 2), (middle, 2, 1)):
        profile = builders.cap_profile(rho, 0.0, z, disk_samples)
        builders.revolve(builder, placement, profile, segments, front, back)


# Cylinder lens


def plan_cylinder_lens(lattice: Lattice, v1: float, v2: float, refinement: int) -> Plan:
    """Tube around the shortest period girdled by a lens ring."""
    large, small, v_tube, v_lens = roles(v1, v2)
    axis = _tube_axis(lattice)
    period = float(lattice.periods[axis])
    width = transverse_width(lattice, axis)
    unit_segment = profiles.segment_area(1.0, LENS_ANGLE)

    def volumes(rho, c):
        segment = c * c * unit_segment
        offset = profiles.segment_centroid_offset(c, LENS_ANGLE)
        lens = 4.0 * math.pi * rho * segment
        tube = math.pi * rho * rho * period - 2.0 * math.pi * (rho - offset) * segment
        return tube, lens

    def equations(x):
        rho, c = x
        if rho <= 0 or c <= 0:
            return [1e3, 1e3]
        tube, lens = volumes(rho, c)
        return [tube - v_tube, lens - v_lens]

    rho0 = math.sqrt(v_tube / (math.pi * period))
    guess = [rho0, math.sqrt(v_lens / (4.0 * math.pi * rho0 * unit_segment))]
    solution = root(equations, guess, method="hybr", options={"xtol": 1e-13})
    require(
        solution.success and max(abs(r) for r in equations(solution.x)) < 1e-10,
        f"no tube and lens dimensions hold volumes {v1:.4g}, {v2:.4g}",
    )
    rho, c = (float(x) for x in solution.x)
    bulge = profiles.arc_bulge(c, LENS_ANGLE)
    require(bulge < rho, f"lens depth {bulge:.4g} exceeds tube radius {rho:.4g}")
    require(
        _fits(2.0 * (rho + bulge), width),
        f"lens ring radius {rho + bulge:.4g} must be below {FEASIBILITY_FACTOR} x {width:.4g}",
    )
    require(_fits(2.0 * c, period), f"lens ring chord {2 * c:.4g} too long for {period:.4g}")
    return Plan(
        lattice,
        axis,
        large,
        small,
        refinement,
        params={"rho": rho, "c": c, "period": period},
        note="no closed form",
    )


def emit_cylinder_lens(builder: MeshBuilder, plan: Plan):
    """Tube wall with a band replaced by two 60-degree arcs, all revolved."""
    rho, c, period = plan.params["rho"], plan.params["c"], plan.params["period"]
    placement = plan.placement()
    segments = plan.segments
    spacing = 2.0 * math.pi * rho / segments
    tube, lens = plan.large, plan.small
    for z0, z1 in ((-period / 2.0, -c), (c, period / 2.0)):
        wall = builders.line_points((rho, z0), (rho, z1), spacing)
        builders.revolve(builder, placement, wall, segments, tube, 0)
    count = builders.samples_for(LENS_ANGLE, segments)
    outer = builders.arc_points((rho, -c), (rho, c), -LENS_ANGLE, count)
    builders.revolve(builder, placement, outer, segments, lens, 0)
    inner = builders.arc_points((rho, -c), (rho, c), LENS_ANGLE, count)
    builders.revolve(builder, placement, inner, segments, tube, lens)


# Slab lens and center bubble


def plan_slab_lens(lattice: Lattice, v1: float, v2: float, refinement: int) -> Plan:
    """Slab across the smallest face with a lens blister in its upper wall."""
    require_rectangular(lattice, "SL")
    large, small, v_slab, v_lens = roles(v1, v2)
    axis = _slab_axis(lattice)
    face = lattice.face_area(axis)
    period = float(lattice.periods[axis])
    c = (v_lens / (2.0 * profiles.cap_volume(1.0, LENS_ANGLE))) ** (1.0 / 3.0)
    thickness = (v_slab + profiles.cap_volume(c, LENS_ANGLE)) / face
    bulge = profiles.arc_bulge(c, LENS_ANGLE)
    side = transverse_width(lattice, axis)
    require(
        _fits(2.0 * c, side),
        f"lens radius {c:.4g} must be below {FEASIBILITY_FACTOR} x {side:.4g}",
    )
    require(bulge < thickness, f"lens depth {bulge:.4g} reaches the far slab wall")
    require(
        _fits(thickness + bulge, period),
        f"slab with lens {thickness + bulge:.4g} thick must fit period {period:.4g}",
    )
    return Plan(
        lattice,
        axis,
        large,
        small,
        refinement,
        params={"c": c, "thickness": thickness, "bulge": bulge},
        note="no closed form",
    )


def _lattice_level(plan: Plan, z: float) -> float:
    return 0.5 + z / float(plan.lattice.periods[plan.axis])


def emit_slab_lens(builder: MeshBuilder, plan: Plan):
    """Flat lower wall, holed upper wall and two 60-degree caps over the hole."""
    c, thickness, bulge = plan.params["c"], plan.params["thickness"], plan.params["bulge"]
    placement = plan.placement()
    segments = plan.segments
    slab, lens = plan.large, plan.small
    z0 = -(thickness + bulge) / 2.0
    z1 = z0 + thickness
    builders.lattice_plane(builder, plan.axis, _lattice_level(plan, z0), segments // 4, slab, 0)
    builders.holed_wall(builder, placement, z1, c, segments, 0, slab)
    count = builders.samples_for(LENS_ANGLE, segments)
    upper = builders.cap_profile(c, LENS_ANGLE, z1, count)
    builders.revolve(builder, placement, upper, segments, 0, lens)
    lower = builders.cap_profile(c, -LENS_ANGLE, z1, count)
    builders.revolve(builder, placement, lower, segments, lens, slab)


def plan_center_bubble(lattice: Lattice, v1: float, v2: float, refinement: int) -> Plan:
    """Slab whose two walls are bridged by a cylindrical drum."""
    require_rectangular(lattice, "CB")
    large, small, _, v_drum = roles(v1, v2)
    axis = _slab_axis(lattice)
    face = lattice.face_area(axis)
    period = float(lattice.periods[axis])
    thickness = (v1 + v2) / face
    c = math.sqrt(v_drum / (math.pi * thickness))
    side = transverse_width(lattice, axis)
    require(
        _fits(2.0 * c, side),
        f"drum radius {c:.4g} must be below {FEASIBILITY_FACTOR} x {side:.4g}",
    )
    require(
        _fits(thickness, period), f"slab thickness {thickness:.4g} must fit period {period:.4g}"
    )
    return Plan(
        lattice,
        axis,
        large,
        small,
        refinement,
        params={"c": c, "thickness": thickness},
        note="no closed form",
    )


def emit_center_bubble(builder: MeshBuilder, plan: Plan):
    """Holed walls, drum side and the two drum lids."""
    c, thickness = plan.params["c"], plan.params["thickness"]
    placement = plan.placement()
    segments = plan.segments
    slab, drum = plan.large, plan.small
    z0, z1 = -thickness / 2.0, thickness / 2.0
    disk_samples = max(3, segments // 6)
    builders.holed_wall(builder, placement, z0, c, segments, slab, 0)
    builders.revolve(
        builder, placement, builders.cap_profile(c, 0.0, z0, disk_samples), segments, drum, 0
    )
    side = builders.line_points((c, z0), (c, z1), 2.0 * math.pi * c / segments)
    builders.revolve(builder, placement, side, segments, drum, slab)
    builders.revolve(
        builder, placement, builders.cap_profile(c, 0.0, z1, disk_samples), segments, 0, drum
    )
    builders.holed_wall(builder, placement, z1, c, segments, 0, slab)


# Products of plane torus cross sections with a period


def _section_candidates(lattice: Lattice, v1: float, v2: float, family: str):
    """Feasible (section, axis, rotated) triples of one family, cheapest first."""
    options = []
    reasons = []
    for axis in range(3):
        length = float(lattice.periods[axis])
        x_len = float(lattice.periods[(axis + 1) % 3])
        y_len = float(lattice.periods[(axis + 2) % 3])
        a1, a2 = v1 / length, v2 / length
        for rotated in (False, True):
            width, height = (y_len, x_len) if rotated else (x_len, y_len)
            if family == "disk_pair":
                sections = [profiles.disk_pair(a1, a2, width, height, FEASIBILITY_FACTOR)]
            elif family == "band_lens":
                sections = [
                    profiles.band_lens(band, lens, width, height, FEASIBILITY_FACTOR)
                    for band, lens in ((a1, a2), (a2, a1))
                ]
                for section, band_region in zip(sections, (1, 2)):
                    section.params["band_region"] = band_region
            else:
                sections = [profiles.symmetric_chain(a1, a2, width, height, FEASIBILITY_FACTOR)]
            for section in sections:
                if section.feasible:
                    options.append((section.perimeter * length, axis, rotated, section))
                else:
                    reasons.append(section.reason)
    if not options:
        raise InfeasibleSpecError(f"no feasible {family} cross section: {reasons[0]}")
    return sorted(options, key=lambda option: option[0])


def _plan_product(family: str, code: str, note: str):
    def plan(lattice: Lattice, v1: float, v2: float, refinement: int) -> Plan:
        require_rectangular(lattice, code)
        area, axis, rotated, section = _section_candidates(lattice, v1, v2, family)[0]
        large, small, _, _ = roles(v1, v2)
        return Plan(
            lattice,
            axis,
            large,
            small,
            refinement,
            params={"section": section, "rotated": rotated},
            area=area,
            note=note,
        )

    plan.__doc__ = f"{note} extruded along the period that minimises the area."
    return plan


def _disk_pair_curves(plan: Plan, width: float, height: float):
    del width, height
    shape = plan.params["section"].params["shape"]
    bulge_large = profiles.arc_bulge(shape.c, shape.theta_large)
    bulge_small = profiles.arc_bulge(shape.c, shape.theta_small)
    rim = (bulge_small - bulge_large) / 2.0
    start, end = (rim, -shape.c), (rim, shape.c)
    segments = plan.segments
    arcs = (
        (-shape.theta_large, 0, plan.large),
        (-shape.theta_mid, plan.large, plan.small),
        (shape.theta_small, plan.small, 0),
    )
    for theta, front, back in arcs:
        count = builders.samples_for(theta, segments)
        yield builders.arc_points(start, end, theta, count), front, back


def _band_lens_curves(plan: Plan, width: float, height: float):
    del height
    params = plan.params["section"].params
    band = params["band_region"]
    lens = 3 - band
    c, thickness = params["c"], params["thickness"]
    bulge = profiles.arc_bulge(c, LENS_ANGLE)
    spacing = width / (plan.segments / 2)
    bottom = -(thickness + bulge) / 2.0
    top = bottom + thickness
    half = width / 2.0
    count = builders.samples_for(LENS_ANGLE, plan.segments)
    yield builders.line_points((-half, bottom), (half, bottom), spacing), 0, band
    yield builders.line_points((-half, top), (-c, top), spacing), band, 0
    yield builders.line_points((c, top), (half, top), spacing), band, 0
    yield builders.arc_points((-c, top), (c, top), LENS_ANGLE, count), lens, 0
    yield builders.arc_points((-c, top), (c, top), -LENS_ANGLE, count), band, lens


def _chain_curves(plan: Plan, width: float, height: float):
    del height
    params = plan.params["section"].params
    c, ell1 = params["c"], params["ell1"]
    theta1, theta2, theta_mid = params["theta1"], params["theta2"], params["theta_mid"]
    segments = plan.segments
    left = -width / 2.0
    junction = left + ell1
    right = width / 2.0
    for start, end, theta, region in ((left, junction, theta1, 1), (junction, right, theta2, 2)):
        count = builders.samples_for(theta, segments)
        yield builders.arc_points((start, c), (end, c), theta, count), region, 0
        yield builders.arc_points((start, -c), (end, -c), -theta, count), 0, region
    count = builders.samples_for(theta_mid, segments)
    yield builders.arc_points((junction, -c), (junction, c), theta_mid, count), 2, 1
    yield builders.arc_points((left, -c), (left, c), -theta_mid, count), 1, 2


def _emit_product(curves):
    def emit(builder: MeshBuilder, plan: Plan):
        placement = plan.placement()
        x_len, y_len, length = placement.lengths
        rotated = plan.params["rotated"]
        width, height = (y_len, x_len) if rotated else (x_len, y_len)
        for points, front, back in curves(plan, width, height):
            if rotated:
                points = np.column_stack([-points[:, 1], points[:, 0]])
            builders.extrude(builder, placement, points, length, plan.extrusion, front, back)

    return emit


# Cylinder cross


def _breaks(cuts, length: float, spacing: float) -> np.ndarray:
    edges = np.unique(np.concatenate([[0.0, length], np.asarray(cuts, dtype=float)]))
    pieces = [
        np.linspace(a, b, max(1, int(math.ceil((b - a) / spacing))) + 1)[:-1]
        for a, b in zip(edges[:-1], edges[1:])
    ]
    return np.concatenate([*pieces, [length]])


def plan_cylinder_cross(lattice: Lattice, v1: float, v2: float, refinement: int) -> Plan:
    """Two square tubes along transverse periods, stacked along the longest period."""
    require_rectangular(lattice, "CC")
    axis = int(np.argmax(lattice.periods))
    x_len = float(lattice.periods[(axis + 1) % 3])
    y_len = float(lattice.periods[(axis + 2) % 3])
    z_len = float(lattice.periods[axis])
    side1 = math.sqrt(v1 / x_len)
    side2 = math.sqrt(v2 / y_len)
    require(_fits(side1, y_len), f"tube side {side1:.4g} too wide for period {y_len:.4g}")
    require(_fits(side2, x_len), f"tube side {side2:.4g} too wide for period {x_len:.4g}")
    require(
        _fits(side1 + side2, z_len),
        f"stacked tubes {side1 + side2:.4g} tall must fit period {z_len:.4g}",
    )
    return Plan(
        lattice,
        axis,
        1,
        2,
        refinement,
        params={"side1": side1, "side2": side2},
        note="no closed form",
    )


def emit_cylinder_cross(builder: MeshBuilder, plan: Plan):
    """Voxel walls of the two tubes; they share a rectangular wall where they cross."""
    placement = plan.placement()
    x_len, y_len, z_len = placement.lengths
    side1, side2 = plan.params["side1"], plan.params["side2"]
    spacing = float(min(placement.lengths)) / (plan.segments / 3)
    z0 = (z_len - side1 - side2) / 2.0
    x_range = (x_len / 2.0 - side2 / 2.0, x_len / 2.0 + side2 / 2.0)
    y_range = (y_len / 2.0 - side1 / 2.0, y_len / 2.0 + side1 / 2.0)
    z_ranges = ((z0, z0 + side1), (z0 + side1, z0 + side1 + side2))
    breaks = [
        _breaks(x_range, x_len, spacing),
        _breaks(y_range, y_len, spacing),
        _breaks([z0, z0 + side1, z0 + side1 + side2], z_len, spacing),
    ]

    def label(centre):
        x, y, z = centre
        if y_range[0] < y < y_range[1] and z_ranges[0][0] < z < z_ranges[0][1]:
            return 1
        if x_range[0] < x < x_range[1] and z_ranges[1][0] < z < z_ranges[1][1]:
            return 2
        return 0

    builders.rectilinear_walls(builder, placement, breaks, label)


# Double slab and hexagonal honeycomb


def plan_double_slab(lattice: Lattice, v1: float, v2: float, refinement: int) -> Plan:
    """Three parallel flat walls across the smallest face."""
    axis = _slab_axis(lattice)
    det = lattice.det
    start = 0.5 - (v1 + v2) / (2.0 * det)
    levels = (start, start + v1 / det, start + (v1 + v2) / det)
    return Plan(
        lattice,
        axis,
        1,
        2,
        refinement,
        params={"levels": levels},
        area=3.0 * lattice.face_area(axis),
        note="three flat walls",
    )


def emit_double_slab(builder: MeshBuilder, plan: Plan):
    """Walls R0|R1, R1|R2 and R2|R0 in order along the axis."""
    cells = max(2, EXTRUSION_SEGMENTS * 2**plan.refinement)
    for level, front, back in zip(plan.params["levels"], (1, 2, 0), (0, 1, 2)):
        builders.lattice_plane(builder, plan.axis, level, cells, front, back)


def plan_honeycomb(lattice: Lattice, v1: float, v2: float, refinement: int) -> Plan:
    """Hexagonal prism columns along the third period of a rhombic prism."""
    if lattice.kind is not LatticeKind.RHOMBIC:
        raise InfeasibleSpecError(
            f"hexagonal honeycomb needs a rhombic lattice, got {lattice.kind.value}"
        )
    side, height = lattice.params
    diagram = solve_honeycomb(side, v1 / height, v2 / height)
    return Plan(
        lattice,
        2,
        1,
        2,
        refinement,
        params={"diagram": diagram},
        area=diagram.edge_length() * height,
        note="flat hexagonal prism walls",
    )


def emit_honeycomb(builder: MeshBuilder, plan: Plan):
    """Each network edge extruded along the prism axis."""
    side, height = plan.lattice.params
    placement = Placement(plan.lattice, (0, 1, 2), np.array([0.0, 0.0, height / 2.0]))
    spacing = side / (plan.segments / 4)
    for start, end, own, neighbour in plan.params["diagram"].walls():
        if np.linalg.norm(end - start) < 1e-12:
            continue
        points = builders.line_points(start, end, spacing)
        builders.extrude(builder, placement, points, height, plan.extrusion, neighbour, own)


RECIPES: dict[str, Recipe] = {
    "SDB": Recipe(plan_sdb, emit_sdb),
    "DC": Recipe(plan_delaunay_chain, emit_delaunay_chain),
    "CL": Recipe(plan_cylinder_lens, emit_cylinder_lens),
    "CC": Recipe(plan_cylinder_cross, emit_cylinder_cross),
    "2C": Recipe(
        _plan_product("disk_pair", "2C", "planar double bubble"), _emit_product(_disk_pair_curves)
    ),
    "SL": Recipe(plan_slab_lens, emit_slab_lens),
    "CB": Recipe(plan_center_bubble, emit_center_bubble),
    "CS": Recipe(
        _plan_product("symmetric_chain", "CS", "symmetric chain"), _emit_product(_chain_curves)
    ),
    "SC": Recipe(
        _plan_product("band_lens", "SC", "band with lens"), _emit_product(_band_lens_curves)
    ),
    "2S": Recipe(plan_double_slab, emit_double_slab),
    "HH": Recipe(plan_honeycomb, emit_honeycomb),
}

# Interface components per region pair (R0|large, R0|small, large|small).
EXPECTED_COMPONENTS: dict[str, tuple[int, int, int]] = {
    "SDB": (1, 1, 1),
    "DC": (1, 1, 2),
    "CL": (1, 1, 1),
    "CC": (1, 1, 1),
    "2C": (1, 1, 1),
    "SL": (2, 1, 1),
    "CB": (2, 2, 1),
    "CS": (2, 2, 2),
    "SC": (2, 1, 1),
    "2S": (1, 1, 1),
    "HH": (3, 3, 3),
}
