"""Tests for angle measurements, plane-pair clipping, concavity and structure checks."""

import math

import numpy as np
import pytest

from ska_sdp_double_bubble.analysis.angles import TETRAHEDRAL_ANGLE, plateau_angles
from ska_sdp_double_bubble.analysis.clipping import PlanePair, bisecting_planes, clipped_volume
from ska_sdp_double_bubble.analysis.concavity import concavity_check
from ska_sdp_double_bubble.analysis.structure import interface_planarity, region_components
from ska_sdp_double_bubble.catalog.candidates import CandidateKind, CandidateSpec, build
from ska_sdp_double_bubble.configuration.config import HALVING_TOL
from ska_sdp_double_bubble.geometry import metrics
from ska_sdp_double_bubble.geometry.lattice import make_lattice
from ska_sdp_double_bubble.phase.sweep import PhaseCell, PhaseTable
from ska_sdp_double_bubble.utilities.errors import PreconditionError, UnsupportedLatticeError


def _table(areas: dict[tuple[int, int], float], step: float) -> PhaseTable:
    table = PhaseTable(1.0, step, ("2S",))
    for (i, j), area in areas.items():
        v1, v2 = i * step, j * step
        table.add(PhaseCell(v1, v2, 1.0 - v1 - v2, {"2S": area}, ("2S",)))
    return table


class TestPlateauAngles:
    """Tests for the plateau_angles function"""

    def test_slab_has_no_triple_curves(self, slab):
        """Test flat walls give empty samples and no fractions"""
        report = plateau_angles(slab)
        assert len(report.dihedrals) == 0
        assert report.triple_fraction() is None
        assert report.summary()["triple_quantiles"] is None

    def test_sdb_dihedrals(self, sdb):
        """Test three samples per triple edge, close to 120 degrees"""
        report = plateau_angles(sdb)
        assert len(report.dihedrals) == 3 * len(sdb.triple_edges())
        assert np.median(report.dihedrals) == pytest.approx(120.0, abs=10.0)
        assert report.dihedrals.sum() / len(sdb.triple_edges()) == pytest.approx(360.0)
        assert len(report.cone_angles) == 0

    def test_tetrahedral_constant(self):
        """Test the cone angle of a regular tetrahedral junction"""
        assert TETRAHEDRAL_ANGLE == pytest.approx(109.4712206)


class TestClipping:
    """Tests for plane-pair clipping and bisection"""

    def test_normal(self):
        """Test the normal rotates in the transverse plane"""
        pair = PlanePair(math.pi / 2, 0.1)
        np.testing.assert_allclose(pair.normal(), [-1.0, 0.0, 0.0], atol=1e-15)
        assert pair.complement().offset == pytest.approx(0.6)

    def test_whole_bubble_inside(self, sdb):
        """Test a slab around the bubble clips all of it"""
        pair = PlanePair(0.0, 0.25)
        for region, volume in ((1, 0.02), (2, 0.01)):
            assert clipped_volume(sdb, pair, region) == pytest.approx(volume, rel=1e-6)
            assert clipped_volume(sdb, pair.complement(), region) == pytest.approx(0.0, abs=1e-9)

    def test_plane_through_axis_halves(self, sdb):
        """Test a plane through the bubble axis halves both bodies"""
        pair = PlanePair(0.0, 0.0)
        assert clipped_volume(sdb, pair, 1) == pytest.approx(0.01, rel=1e-6)
        assert clipped_volume(sdb, pair, 2) == pytest.approx(0.005, rel=1e-6)

    @pytest.mark.parametrize("alpha, offset", [(0.7, 0.1), (2.0, 0.43), (3.0, 0.9)])
    def test_additive(self, sdb, alpha, offset):
        """Test a slab and its complement add up to the body"""
        pair = PlanePair(alpha, offset)
        for region in (1, 2):
            total = clipped_volume(sdb, pair, region) + clipped_volume(
                sdb, pair.complement(), region
            )
            assert total == pytest.approx(metrics.volume_values(sdb)[region], rel=1e-9)

    def test_wrapping_bubble(self, slab):
        """Test walls spanning the torus are not inside a cylinder"""
        with pytest.raises(PreconditionError, match="cylinder"):
            clipped_volume(slab, PlanePair(0.0, 0.0), 1)

    def test_rhombic(self):
        """Test plane pairs need a rectangular torus"""
        lattice = make_lattice("rhombic", (1.0, 0.8))
        third = lattice.det / 3.0
        mesh = build(CandidateSpec(CandidateKind.DOUBLE_SLAB, lattice, third, third))
        with pytest.raises(UnsupportedLatticeError, match="rectangular"):
            bisecting_planes(mesh)

    @pytest.mark.slow
    def test_bisecting_planes_halve_both(self, sdb):
        """Test the found pair halves both bodies when re-measured"""
        pair = bisecting_planes(sdb)
        for region, volume in ((1, 0.02), (2, 0.01)):
            assert pair.halving_errors[region] <= HALVING_TOL * volume
            for half in (pair, pair.complement()):
                clipped = clipped_volume(sdb, half, region)
                assert clipped == pytest.approx(volume / 2.0, abs=HALVING_TOL * volume)


class TestConcavity:
    """Tests for the concavity_check function"""

    def test_constant(self):
        """Test a flat table is concave"""
        areas = {(i, j): 1.0 for i in range(1, 5) for j in range(i, 6 - i)}
        assert not concavity_check(_table(areas, 1.0 / 6.0))

    def test_dip(self):
        """Test a cell below the chord of its neighbours is reported"""
        areas = {(i, j): 1.0 for i in range(1, 5) for j in range(i, 6 - i)}
        areas[(1, 2)] = 0.5
        violations = concavity_check(_table(areas, 1.0 / 6.0))
        assert violations
        worst = violations[0]
        assert worst.deficit == pytest.approx(0.5)
        assert worst.midpoint == pytest.approx((1.0 / 6.0, 2.0 / 6.0))

    def test_epsilon(self):
        """Test small deficits are within the allowance"""
        areas = {(i, j): 1.0 for i in range(1, 5) for j in range(i, 6 - i)}
        areas[(1, 2)] = 0.999
        assert not concavity_check(_table(areas, 1.0 / 6.0), epsilon=0.01)

    def test_too_small(self):
        """Test tables with fewer than three cells pass"""
        assert not concavity_check(_table({(1, 1): 1.0}, 0.25))


class TestStructure:
    """Tests for region connectivity and interface flatness"""

    def test_slab_components(self, slab):
        """Test every region of the slabs is bounded by two walls"""
        assert region_components(slab) == {0: 2, 1: 2, 2: 2}

    def test_sdb_components(self, sdb):
        """Test each region of a double bubble has a connected boundary"""
        assert region_components(sdb) == {0: 1, 1: 1, 2: 1}

    def test_slab_interface_wraps(self, slab):
        """Test the flat interface between slabs wraps around the torus"""
        with pytest.raises(PreconditionError, match="wraps"):
            interface_planarity(slab)

    def test_equal_sdb_interface_is_flat(self, cubic):
        """Test equal volumes share a flat disk"""
        mesh = build(CandidateSpec(CandidateKind.SDB, cubic, 0.015, 0.015))
        assert interface_planarity(mesh) == pytest.approx(0.0, abs=1e-6)
