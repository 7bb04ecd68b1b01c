"""Tests for areas, volumes, their gradients and the Monte Carlo oracle."""

import numpy as np
import pytest

from ska_sdp_double_bubble.catalog.candidates import CandidateKind
from ska_sdp_double_bubble.geometry import metrics
from ska_sdp_double_bubble.utilities.errors import AnchoringError, PreconditionError

THIRD = 1.0 / 3.0


class TestAreaAndVolume:
    """Tests for the area and volume functionals"""

    def test_slab_area(self, slab):
        """Test three unit walls"""
        assert metrics.total_area(slab) == pytest.approx(3.0)
        assert metrics.facet_areas(slab).sum() == pytest.approx(3.0)

    def test_slab_volumes(self, slab):
        """Test equal thirds, the complement included"""
        assert metrics.volume_values(slab) == pytest.approx({1: THIRD, 2: THIRD})
        assert metrics.complement_volume(slab) == pytest.approx(THIRD)

    def test_sdb_volumes(self, sdb):
        """Test the built double bubble holds its targets"""
        assert metrics.volume_values(sdb) == pytest.approx({1: 0.02, 2: 0.01}, rel=1e-6)

    def test_stale_constant(self, slab):
        """Test a wrong volume constant is caught"""
        slab.body(1).k += 1
        with pytest.raises(AnchoringError, match="stale"):
            metrics.body_volume(slab, 1)

    def test_reanchor(self, slab):
        """Test anchoring restores the continuous value"""
        slab.body(2).k -= 3
        metrics.reanchor(slab, {1: THIRD, 2: THIRD})
        assert metrics.body_volume(slab, 2).value == pytest.approx(THIRD)

    def test_complement_is_not_a_body(self, slab):
        """Test region 0 has no constrained volume"""
        with pytest.raises(PreconditionError, match="1 or 2"):
            metrics.body_volume(slab, 0)


class TestGradients:
    """Tests for the area and volume gradients"""

    def test_flat_walls_are_critical(self, slab):
        """Test a flat periodic wall has no area gradient"""
        field = metrics.area_gradient(slab)
        np.testing.assert_allclose(field.vectors, 0.0, atol=1e-12)

    def test_translation_invariance(self, sdb):
        """Test gradients sum to zero since translations change nothing"""
        np.testing.assert_allclose(metrics.area_gradient(sdb).vectors.sum(axis=0), 0, atol=1e-9)
        for region in (1, 2):
            total = metrics.volume_gradient(sdb, region).vectors.sum(axis=0)
            np.testing.assert_allclose(total, 0.0, atol=1e-9)

    @pytest.mark.parametrize("region", [1, 2])
    def test_volume_gradient_matches_difference(self, sdb, region):
        """Test the exact volume gradient against a central difference"""
        vid = int(np.flatnonzero(sdb.triple_vertices())[0])
        field = metrics.volume_gradient(sdb, region)
        row = int(np.flatnonzero(field.vertex_ids == vid)[0])
        direction = np.array([0.3, -0.5, 0.8])
        step = 1e-6
        shift = sdb.lattice.to_lattice(step * direction)
        ahead, behind = sdb.positions.copy(), sdb.positions.copy()
        ahead[vid] += shift
        behind[vid] -= shift
        difference = (
            metrics.volume_values(sdb, ahead)[region] - metrics.volume_values(sdb, behind)[region]
        ) / (2 * step)
        assert difference == pytest.approx(field.vectors[row] @ direction, rel=1e-5, abs=1e-9)

    def test_area_gradient_matches_difference(self, sdb):
        """Test the area gradient against a central difference"""
        vid = int(np.flatnonzero(sdb.triple_vertices())[0])
        field = metrics.area_gradient(sdb)
        row = int(np.flatnonzero(field.vertex_ids == vid)[0])
        direction = np.array([1.0, 0.2, -0.4])
        step = 1e-6
        shift = sdb.lattice.to_lattice(step * direction)
        ahead, behind = sdb.positions.copy(), sdb.positions.copy()
        ahead[vid] += shift
        behind[vid] -= shift
        difference = (metrics.total_area(sdb, ahead) - metrics.total_area(sdb, behind)) / (
            2 * step
        )
        assert difference == pytest.approx(field.vectors[row] @ direction, rel=1e-5, abs=1e-9)


class TestMonteCarlo:
    """Tests for the point classifier and Monte Carlo volumes"""

    def test_point_region(self, slab):
        """Test points on each side of the walls"""
        assert metrics.point_region(slab, [THIRD] * 3) == 1
        assert metrics.point_region(slab, [0.66] * 3) == 2
        assert metrics.point_region(slab, [0.95] * 3) == 0

    def test_estimates(self, slab):
        """Test estimates agree with the facet sums"""
        estimates = metrics.monte_carlo_volumes(slab, 4000, seed=3)
        for region in (0, 1, 2):
            assert estimates[region].estimate == pytest.approx(THIRD, abs=0.05)
            assert estimates[region].stderr > 0

    def test_seeded(self, slab):
        """Test identical seeds give identical estimates"""
        first = metrics.monte_carlo_volumes(slab, 500, seed=7)
        second = metrics.monte_carlo_volumes(slab, 500, seed=7)
        assert first[1].estimate == second[1].estimate

    def test_no_samples(self, slab):
        """Test at least one sample is needed"""
        with pytest.raises(PreconditionError, match="at least one"):
            metrics.monte_carlo_volumes(slab, 0)

    @pytest.mark.slow
    @pytest.mark.parametrize("kind", list(CandidateKind))
    def test_catalog_agrees_with_facet_sums(self, catalog, kind):
        """Test sampled volumes of every candidate kind match the anchored values"""
        mesh = catalog[kind]
        estimates = metrics.monte_carlo_volumes(mesh, 100_000, seed=11)
        expected = metrics.volume_values(mesh)
        expected[0] = metrics.complement_volume(mesh)
        for region, value in expected.items():
            estimate = estimates[region]
            assert abs(estimate.estimate - value) <= 4.0 * estimate.stderr + 1e-9
