"""Tests for the periodic mesh, its validation and its file formats."""

import numpy as np
import orjson
import pytest

from ska_sdp_double_bubble.catalog.candidates import CandidateKind
from ska_sdp_double_bubble.geometry import metrics
from ska_sdp_double_bubble.geometry.mesh import region_boundary
from ska_sdp_double_bubble.geometry.mesh_io import export_fe, load_json, mesh_to_dict, save_json
from ska_sdp_double_bubble.geometry.validation import (
    require_valid,
    topology_signature,
    validate,
)
from ska_sdp_double_bubble.utilities.errors import InvalidMeshError, MeshParseError


class TestMesh:
    """Tests for the Mesh class"""

    def test_slab_counts(self, slab):
        """Test three 4 x 4 periodic walls"""
        assert slab.counts() == (48, 144, 96)
        assert not slab.triple_edges()

    def test_region_boundary(self, slab):
        """Test each region touches two of the three walls"""
        for region in (0, 1, 2):
            assert len(region_boundary(slab, region)) == 64

    def test_wrap_keeps_geometry(self, slab):
        """Test moving every vertex across the boundary leaves area and volumes alone"""
        area = metrics.total_area(slab)
        previous = metrics.volume_values(slab)
        assert slab.set_positions(slab.positions + np.array([0.37, 0.61, 0.9]))
        metrics.reanchor(slab, previous)
        assert validate(slab).is_valid
        assert metrics.total_area(slab) == pytest.approx(area)
        for region, value in metrics.volume_values(slab).items():
            assert value == pytest.approx(previous[region], abs=1e-12)

    def test_copy_is_independent(self, slab):
        """Test moving a copy leaves the original untouched"""
        other = slab.copy()
        other.set_positions(other.positions + 0.01)
        assert not np.allclose(other.positions, slab.positions)
        assert other.counts() == slab.counts()

    def test_sdb_has_triple_curve(self, sdb):
        """Test the standard double bubble carries a closed triple curve"""
        assert sdb.triple_edges()
        assert sdb.triple_vertices().sum() == len(sdb.triple_edges())


class TestValidate:
    """Tests for the validate function"""

    def test_valid(self, slab):
        """Test a built mesh passes"""
        report = validate(slab)
        assert report.is_valid
        assert report.to_dict()["valid"] is True

    def test_missing_facet(self, slab):
        """Test a hole breaks the edge valence"""
        slab.remove_facet(slab.live_facet_ids()[0])
        report = validate(slab)
        assert not report.is_valid
        assert "valence" in report.rules()
        with pytest.raises(InvalidMeshError, match="valence"):
            require_valid(slab)

    def test_bad_target(self, slab):
        """Test a body target larger than the torus is reported"""
        slab.body(1).target = 5.0
        assert "target" in validate(slab).rules()

    def test_topology_signature(self, slab):
        """Test slab interfaces are tori wrapping two periods"""
        components = topology_signature(slab)
        assert len(components) == 3
        assert all(component.euler == 0 for component in components)


class TestMeshFiles:
    """Tests for reading and writing meshes"""

    def test_round_trip(self, slab, tmp_path):
        """Test a saved mesh loads with the same topology and positions"""
        path = save_json(slab, tmp_path / "slab.json")
        loaded = load_json(path)
        assert loaded.counts() == slab.counts()
        np.testing.assert_array_equal(loaded.positions, slab.positions)
        assert metrics.volume_values(loaded) == pytest.approx(metrics.volume_values(slab))

    @pytest.mark.parametrize("kind", list(CandidateKind))
    def test_catalog_round_trip(self, catalog, kind, tmp_path):
        """Test every candidate kind reloads bit for bit"""
        mesh = catalog[kind]
        loaded = load_json(save_json(mesh, tmp_path / f"{kind.value}.json"))
        option = orjson.OPT_SERIALIZE_NUMPY
        assert orjson.dumps(mesh_to_dict(loaded), option=option) == orjson.dumps(
            mesh_to_dict(mesh), option=option
        )
        assert loaded.counts() == mesh.counts()
        assert metrics.volume_values(loaded) == metrics.volume_values(mesh)

    def test_malformed_json(self, tmp_path):
        """Test broken JSON reports its byte offset"""
        path = tmp_path / "bad.json"
        path.write_bytes(b'{"format": 1,')
        with pytest.raises(MeshParseError, match="malformed JSON") as info:
            load_json(path)
        assert info.value.offset is not None

    def test_missing_field(self, slab, tmp_path):
        """Test a missing section names the field"""
        path = save_json(slab, tmp_path / "slab.json")
        content = orjson.loads(path.read_bytes())
        del content["facets"]
        path.write_bytes(orjson.dumps(content))
        with pytest.raises(MeshParseError, match="missing required field") as info:
            load_json(path)
        assert info.value.field == "facets"

    @pytest.mark.parametrize(
        "section, column, value, message",
        [
            ("vertices", 0, "0.5", "3-vector of finite numbers"),
            ("vertices", 1, True, "3-vector of finite numbers"),
            ("vertices", 2, None, "3-vector of finite numbers"),
            ("edges", 0, True, "five integers"),
            ("edges", 2, 2, "exceeds one period"),
            ("edges", 4, -2, "exceeds one period"),
            ("edges", 1, 1.0, "five integers"),
            ("facets", 3, False, "five integers"),
        ],
    )
    def test_corrupt_entry(self, slab, tmp_path, section, column, value, message):
        """Test a bad entry names its section and never escapes as a bare error"""
        path = save_json(slab, tmp_path / "slab.json")
        content = orjson.loads(path.read_bytes())
        content[section][0][column] = value
        path.write_bytes(orjson.dumps(content))
        with pytest.raises(MeshParseError, match=message) as info:
            load_json(path)
        assert info.value.field == section
        assert info.value.offset > 0

    @pytest.mark.parametrize("key, value", [("k", True), ("region", True), ("target", "0.3")])
    def test_corrupt_body(self, slab, tmp_path, key, value):
        """Test body fields must be proper numbers"""
        path = save_json(slab, tmp_path / "slab.json")
        content = orjson.loads(path.read_bytes())
        content["bodies"][0][key] = value
        path.write_bytes(orjson.dumps(content))
        with pytest.raises(MeshParseError, match="bad body entry") as info:
            load_json(path)
        assert info.value.field == "bodies"

    def test_export_fe(self, slab, tmp_path):
        """Test the torus datafile sections"""
        text = export_fe(slab, tmp_path / "slab.fe").read_text()
        assert "TORUS" in text
        assert "PERIODS" in text
        assert "\r" not in text
        assert text.count("\nVERTICES\n") == 1
