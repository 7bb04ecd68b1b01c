"""Tests for the closed-form double bubble profiles."""

import math

import pytest

from ska_sdp_double_bubble.catalog import profiles
from ska_sdp_double_bubble.catalog.honeycomb import power_diagram, solve_honeycomb
from ska_sdp_double_bubble.utilities.errors import InfeasibleSpecError, InvalidParameterError


class TestArcs:
    """Tests for the circular arc and cap helpers"""

    def test_half_circle(self):
        """Test a 90 degree tangent angle gives a half disk"""
        assert profiles.segment_area(1.0, math.pi / 2) == pytest.approx(math.pi / 2)
        assert profiles.arc_length(1.0, math.pi / 2) == pytest.approx(math.pi)
        assert profiles.arc_bulge(1.0, math.pi / 2) == pytest.approx(1.0)

    def test_flat_limit(self):
        """Test a vanishing angle is a straight chord"""
        assert profiles.segment_area(2.0, 0.0) == 0.0
        assert profiles.arc_length(2.0, 1e-9) == pytest.approx(4.0)

    def test_hemisphere(self):
        """Test a 90 degree cap is a half ball"""
        assert profiles.cap_volume(1.0, math.pi / 2) == pytest.approx(2.0 * math.pi / 3.0)
        assert profiles.cap_area(1.0, math.pi / 2) == pytest.approx(2.0 * math.pi)

    def test_signed(self):
        """Test negative angles bulge the other way"""
        assert profiles.cap_volume(1.0, -0.4) == pytest.approx(-profiles.cap_volume(1.0, 0.4))
        assert profiles.segment_area(1.0, -0.4) == pytest.approx(-profiles.segment_area(1.0, 0.4))


class TestDoubleBubbles:
    """Tests for the standard double bubbles in the plane and in space"""

    def test_equal_sdb(self):
        """Test equal volumes against two 240 degree spherical caps and a flat disk"""
        v = 0.05
        radius = (8.0 * v / (9.0 * math.pi)) ** (1.0 / 3.0)
        area, r0, r1, r2 = profiles.sdb_closed_form(v, v)
        assert area == pytest.approx(6.75 * math.pi * radius**2, rel=1e-10)
        assert math.isinf(r0)
        assert r1 == pytest.approx(radius)
        assert r2 == pytest.approx(radius)

    def test_unequal_sdb_radii(self):
        """Test the interface curvature balances the cap curvatures"""
        _, r0, r1, r2 = profiles.sdb_closed_form(2.0, 1.0)
        assert r1 > r2
        assert 1.0 / r0 == pytest.approx(1.0 / r2 - 1.0 / r1, rel=1e-8)

    def test_sdb_symmetric(self):
        """Test swapping the volumes swaps the radii only"""
        area, r0, r1, r2 = profiles.sdb_closed_form(0.3, 0.1)
        swapped = profiles.sdb_closed_form(0.1, 0.3)
        assert swapped == pytest.approx((area, r0, r2, r1))

    def test_sdb_beats_two_spheres(self):
        """Test sharing a wall saves area"""
        sphere = (36.0 * math.pi) ** (1.0 / 3.0)
        area, *_ = profiles.sdb_closed_form(1.0, 0.5)
        assert area < sphere * (1.0 + 0.5 ** (2.0 / 3.0))
        assert area > sphere * 1.5 ** (2.0 / 3.0)

    def test_sdb_volumes(self):
        """Test the caps of the solved shape enclose the requested volumes"""
        shape = profiles.sdb_shape(0.4, 0.1)
        large = profiles.cap_volume(shape.c, shape.theta_large) - profiles.cap_volume(
            shape.c, shape.theta_mid
        )
        small = profiles.cap_volume(shape.c, shape.theta_small) + profiles.cap_volume(
            shape.c, shape.theta_mid
        )
        assert large == pytest.approx(0.4, rel=1e-10)
        assert small == pytest.approx(0.1, rel=1e-10)

    def test_equal_planar(self):
        """Test equal areas against two 240 degree arcs and a straight wall"""
        radius = 1.0 / math.sqrt(2.0 * math.pi / 3.0 + math.sqrt(3.0) / 4.0)
        shape = profiles.planar_double_bubble(1.0, 1.0)
        assert shape.measure == pytest.approx((8.0 * math.pi / 3.0 + math.sqrt(3.0)) * radius)
        assert shape.theta_mid == 0.0

    def test_non_positive(self):
        """Test volumes must be positive"""
        with pytest.raises(InvalidParameterError, match="positive"):
            profiles.sdb_closed_form(0.0, 1.0)


class TestCrossSections:
    """Tests for the flat 2-torus families"""

    def test_double_band(self):
        """Test three full lines"""
        families = profiles.t2_double_bubble(0.3, 0.3, 1.0, 1.0)
        assert families["double_band"].perimeter == pytest.approx(3.0)

    def test_small_areas_prefer_disks(self):
        """Test a small pair is a planar double bubble"""
        best = profiles.t2_minimum(0.01, 0.01, 1.0, 1.0)
        assert best.kind == "disk_pair"
        assert best.perimeter == pytest.approx(profiles.planar_double_bubble(0.01, 0.01).measure)

    def test_large_disks_infeasible(self):
        """Test disks that do not fit report why"""
        section = profiles.disk_pair(0.4, 0.4, 1.0, 1.0, 0.45)
        assert not section.feasible
        assert math.isinf(section.perimeter)
        assert "exceeds" in section.reason

    def test_areas_must_fit(self):
        """Test the areas must leave room for the complement"""
        with pytest.raises(InvalidParameterError, match="do not fit"):
            profiles.t2_double_bubble(0.6, 0.5, 1.0, 1.0)


class TestSingleBubbles:
    """Tests for the single_bubble_areas function"""

    def test_half_torus_is_slab(self):
        """Test half of the unit torus prefers two flat walls"""
        areas = profiles.single_bubble_areas([1, 1, 1], [1, 1, 1], 1.0, 0.5, 0.45)
        assert "sphere" not in areas
        assert min(areas.values()) == pytest.approx(2.0)

    def test_small_is_sphere(self):
        """Test a small volume is a round sphere"""
        areas = profiles.single_bubble_areas([1, 1, 1], [1, 1, 1], 1.0, 0.001, 0.45)
        assert min(areas, key=areas.get) == "sphere"
        assert areas["sphere"] == pytest.approx((36.0 * math.pi) ** (1.0 / 3.0) * 0.01)

    def test_outside_torus(self):
        """Test the volume must lie inside the torus"""
        with pytest.raises(InvalidParameterError, match="outside"):
            profiles.single_bubble_areas([1, 1, 1], [1, 1, 1], 1.0, 1.0, 0.45)


class TestHoneycomb:
    """Tests for the rhombic power diagrams"""

    def test_regular(self):
        """Test zero weights give three regular hexagons of side s / 3"""
        diagram = power_diagram(1.0, [0.0, 0.0, 0.0])
        total = math.sqrt(3.0) / 2.0
        assert diagram.areas() == pytest.approx([total / 3.0] * 3)
        assert diagram.edge_length() == pytest.approx(3.0)
        assert len(list(diagram.walls())) == 9

    def test_solve_equal(self):
        """Test equal targets need no weights"""
        total = math.sqrt(3.0) / 2.0
        diagram = solve_honeycomb(1.0, total / 3.0, total / 3.0)
        assert diagram.weights == pytest.approx([0.0, 0.0, 0.0], abs=1e-10)

    def test_solve_unequal(self):
        """Test cells take the requested areas"""
        total = math.sqrt(3.0) / 2.0
        diagram = solve_honeycomb(1.0, 0.25 * total, 0.4 * total)
        assert diagram.areas() == pytest.approx([0.35 * total, 0.25 * total, 0.4 * total])
        assert diagram.edge_length() > 3.0

    def test_too_large(self):
        """Test areas filling the torus are rejected"""
        with pytest.raises(InfeasibleSpecError, match="do not fit"):
            solve_honeycomb(1.0, 0.5, 0.5)
