"""Tests for the flat-torus lattice."""

import math

import numpy as np
import pytest

from ska_sdp_double_bubble.geometry.lattice import (
    LatticeKind,
    canonicalize,
    displacement,
    make_lattice,
    min_image_distance,
)
from ska_sdp_double_bubble.utilities.errors import InvalidParameterError


class TestMakeLattice:
    """Tests for the make_lattice function"""

    def test_cubic(self):
        """Test a cubic lattice has the expected volume and periods"""
        lattice = make_lattice("cubic", [2.0])
        assert lattice.kind is LatticeKind.CUBIC
        assert lattice.det == pytest.approx(8.0)
        np.testing.assert_allclose(lattice.periods, [2.0, 2.0, 2.0])
        assert lattice.is_rectangular

    def test_rectangular(self):
        """Test a rectangular lattice keeps its three lengths"""
        lattice = make_lattice(LatticeKind.RECTANGULAR, (1.0, 2.0, 3.0))
        assert lattice.det == pytest.approx(6.0)
        assert lattice.shortest_period == 1.0
        assert lattice.face_area(0) == pytest.approx(6.0)
        assert lattice.face_area(2) == pytest.approx(2.0)

    def test_rhombic(self):
        """Test the rhombic lattice has a 60 degree base"""
        lattice = make_lattice("rhombic", (1.0, 0.8))
        assert not lattice.is_rectangular
        assert lattice.det == pytest.approx(math.sqrt(3) / 2 * 0.8)
        np.testing.assert_allclose(lattice.periods, [1.0, 1.0, 0.8])
        # base planes are sqrt(3)/2 apart, the vertical ones h apart
        np.testing.assert_allclose(lattice.widths, [math.sqrt(3) / 2, math.sqrt(3) / 2, 0.8])

    def test_wrong_count(self):
        """Test a wrong parameter count is rejected"""
        with pytest.raises(InvalidParameterError, match="takes 3 parameter"):
            make_lattice("rect", [1.0, 2.0])

    @pytest.mark.parametrize("params", [[0.0], [-1.0], [float("nan")]])
    def test_non_positive(self, params):
        """Test lengths must be positive and finite"""
        with pytest.raises(InvalidParameterError, match="must be positive"):
            make_lattice("cubic", params)

    def test_equality(self):
        """Test lattices compare by kind and parameters"""
        assert make_lattice("cubic", [1]) == make_lattice("cubic", [1.0])
        assert make_lattice("cubic", [1]) != make_lattice("rect", [1, 1, 1])
        assert hash(make_lattice("cubic", [1])) == hash(make_lattice("cubic", [1.0]))


class TestCoordinates:
    """Tests for coordinate handling"""

    def test_canonicalize(self):
        """Test points are folded into the unit cube with an integer shift"""
        rep, shift = canonicalize([1.25, -0.25, 0.5])
        np.testing.assert_allclose(rep, [0.25, 0.75, 0.5])
        np.testing.assert_array_equal(shift, [1, -1, 0])

    def test_canonicalize_rounding(self):
        """Test a value just below zero never maps to exactly one"""
        rep, shift = canonicalize(np.array([[-1e-18, 0.0, 0.0]]))
        assert np.all(rep < 1.0)
        assert np.all(rep >= 0.0)
        np.testing.assert_allclose(rep + shift, [[-1e-18, 0.0, 0.0]], atol=1e-15)

    def test_round_trip(self):
        """Test lattice and ambient coordinates invert each other"""
        lattice = make_lattice("rhombic", (1.5, 0.7))
        u = np.array([[0.1, 0.2, 0.3], [0.9, 0.5, 0.0]])
        np.testing.assert_allclose(lattice.to_lattice(lattice.to_ambient(u)), u)

    def test_displacement_with_wrap(self):
        """Test an edge crossing the boundary uses its wrap vector"""
        lattice = make_lattice("cubic", [2.0])
        vector = displacement(lattice, [0.9, 0, 0], [0.1, 0, 0], [1, 0, 0])
        np.testing.assert_allclose(vector, [0.4, 0.0, 0.0])

    def test_min_image(self):
        """Test the nearest image is found across the boundary"""
        lattice = make_lattice("cubic", [1.0])
        assert min_image_distance(lattice, [0.05, 0.5, 0.5], [0.95, 0.5, 0.5]) == pytest.approx(
            0.1
        )

    def test_displacement_antisymmetric(self):
        """Test reversing an edge negates its vector"""
        lattice = make_lattice("rhombic", (1.5, 0.7))
        rng = np.random.default_rng(5)
        for _ in range(20):
            tail, head = rng.random(3), rng.random(3)
            wrap = rng.integers(-1, 2, size=3)
            np.testing.assert_allclose(
                displacement(lattice, head, tail, -wrap),
                -displacement(lattice, tail, head, wrap),
                atol=1e-15,
            )

    @pytest.mark.parametrize("kind, params", [("cubic", [1.0]), ("rect", [1.0, 0.7, 1.6])])
    def test_min_image_is_a_metric(self, kind, params):
        """Test symmetry and the triangle inequality on random points"""
        lattice = make_lattice(kind, params)
        points = np.random.default_rng(9).random((12, 3))
        for p in points:
            for q in points:
                d_pq = min_image_distance(lattice, p, q)
                assert d_pq == pytest.approx(min_image_distance(lattice, q, p), abs=1e-15)
                for r in points[:4]:
                    d_via = min_image_distance(lattice, p, r) + min_image_distance(lattice, r, q)
                    assert d_pq <= d_via + 1e-12
