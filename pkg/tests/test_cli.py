"""Tests for the double-bubble command line."""

import argparse
import logging

import orjson
import pytest

from ska_sdp_double_bubble.cli import common_cli
from ska_sdp_double_bubble.cli.common_cli import lattice_spec_parse
from ska_sdp_double_bubble.cli.main import run
from ska_sdp_double_bubble.geometry.lattice import LatticeKind
from ska_sdp_double_bubble.utilities.errors import UsageError

THIRD = str(1.0 / 3.0)


@pytest.fixture(name="slab_file")
def fixture_slab_file(tmp_path):
    """A double slab mesh written by the build command."""
    path = tmp_path / "slab.json"
    code = run(["build", "--kind", "2s", "--v1", THIRD, "--v2", THIRD, "-o", str(path)])
    assert code == 0
    return path


class TestLatticeSpecParse:
    """Tests for the lattice_spec_parse function"""

    def test_kinds(self):
        """Test each lattice grammar"""
        assert lattice_spec_parse("cubic:2").det == pytest.approx(8.0)
        assert lattice_spec_parse("rect:1,2,3").kind is LatticeKind.RECTANGULAR
        assert lattice_spec_parse("RHOMBIC:1,0.8").kind is LatticeKind.RHOMBIC

    @pytest.mark.parametrize("text", ["cubic", "cubic:", "torus:1", "rect:1,2", "cubic:x"])
    def test_bad(self, text):
        """Test malformed lattices are usage errors"""
        with pytest.raises(UsageError, match="Bad lattice"):
            lattice_spec_parse(text)


class TestConfigureLogging:
    """Tests for the configure_logging function"""

    @pytest.fixture(name="levels")
    def fixture_levels(self, monkeypatch):
        """Capture the level handed to ska_ser_logging"""
        seen = []
        monkeypatch.setattr(common_cli.ska_ser_logging, "configure_logging", seen.append)
        return seen

    @pytest.mark.parametrize(
        "env_level, verbose, debug, expected",
        [
            (logging.WARNING, False, False, logging.WARNING),
            (logging.WARNING, True, False, logging.INFO),
            (logging.WARNING, False, True, logging.DEBUG),
            (logging.DEBUG, False, False, logging.DEBUG),
            (logging.DEBUG, True, False, logging.DEBUG),
        ],
    )
    def test_levels(self, monkeypatch, levels, env_level, verbose, debug, expected):
        """Test the environment level is the default and flags only lower it"""
        monkeypatch.setattr(common_cli, "LOG_LEVEL", env_level)
        common_cli.configure_logging(argparse.Namespace(verbose=verbose, debug=debug))
        assert levels == [expected]


class TestCommands:
    """Tests for the subcommands and their exit codes"""

    def test_build(self, slab_file, capsys):
        """Test build writes the mesh and reports the analytic area"""
        capsys.readouterr()
        assert slab_file.exists()
        code = run(["area", str(slab_file)])
        assert code == 0
        content = orjson.loads(capsys.readouterr().out)
        assert content["area"] == pytest.approx(3.0)
        assert content["complement"] == pytest.approx(1.0 / 3.0)

    def test_build_infeasible(self, tmp_path):
        """Test a domain failure exits with 1"""
        args = ["build", "--kind", "hh", "--v1", "0.3", "--v2", "0.3"]
        assert run(args + ["-o", str(tmp_path / "hh.json")]) == 1

    def test_unknown_kind(self, tmp_path):
        """Test an unknown code is a usage error"""
        args = ["build", "--kind", "zz", "--v1", "0.1", "--v2", "0.1"]
        assert run(args + ["-o", str(tmp_path / "zz.json")]) == 2

    def test_bad_lattice(self, tmp_path):
        """Test a malformed lattice is a usage error"""
        args = ["build", "--kind", "2s", "--lattice", "cube:1", "--v1", "0.1", "--v2", "0.1"]
        assert run(args + ["-o", str(tmp_path / "x.json")]) == 2

    def test_missing_argument(self):
        """Test argparse failures are usage errors"""
        assert run(["build", "--kind", "2s"]) == 2
        assert run([]) == 2

    def test_validate(self, slab_file, capsys):
        """Test a valid mesh exits with 0"""
        capsys.readouterr()
        assert run(["validate", str(slab_file)]) == 0
        assert orjson.loads(capsys.readouterr().out)["valid"] is True

    def test_relax(self, slab_file, tmp_path):
        """Test relax writes the mesh and the report"""
        output, report = tmp_path / "relaxed.json", tmp_path / "report.json"
        code = run(
            [
                "relax",
                str(slab_file),
                "-o",
                str(output),
                "--report",
                str(report),
                "--schedule",
                "20:none",
            ]
        )
        assert code == 0
        assert output.exists()
        assert orjson.loads(report.read_bytes())["converged"] is True

    def test_relax_needs_output(self, slab_file):
        """Test the relaxed mesh must go somewhere"""
        assert run(["relax", str(slab_file)]) == 2

    def test_missing_mesh(self, tmp_path):
        """Test an unreadable file is a failure, not a crash"""
        assert run(["area", str(tmp_path / "none.json")]) == 1

    def test_kinds(self, tmp_path):
        """Test the catalogue listing"""
        path = tmp_path / "kinds.json"
        assert run(["kinds", "-o", str(path)]) == 0
        codes = [row["code"] for row in orjson.loads(path.read_bytes())]
        assert codes[0] == "SDB"
        assert len(codes) == 11

    def test_topology(self, slab_file, tmp_path):
        """Test the topology report of the slabs"""
        path = tmp_path / "topology.json"
        assert run(["topology", str(slab_file), "-o", str(path)]) == 0
        content = orjson.loads(path.read_bytes())
        assert content["interface_planarity"] is None

    def test_export_fe(self, slab_file, tmp_path):
        """Test the datafile export"""
        path = tmp_path / "slab.fe"
        assert run(["export-fe", str(slab_file), "-o", str(path)]) == 0
        assert "TORUS" in path.read_text()
