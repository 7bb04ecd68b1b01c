"""Tests for the phase sweep, its CSV table and the ternary portrait."""

import xml.etree.ElementTree as ET

import pytest

from ska_sdp_double_bubble.catalog.candidates import CandidateKind
from ska_sdp_double_bubble.evolution.relax import RelaxConfig, parse_schedule
from ska_sdp_double_bubble.geometry.lattice import make_lattice
from ska_sdp_double_bubble.phase.sweep import (
    ERR,
    NA,
    GridSpec,
    PhaseCell,
    PhaseTable,
    choose_winners,
    evaluate_column,
    export_csv,
    long_torus_check,
    read_csv,
    single_bubble_edges,
    sweep,
    winner,
)
from ska_sdp_double_bubble.phase.ternary import barycentric_to_xy, render_ternary
from ska_sdp_double_bubble.utilities.errors import InvalidParameterError, MeshParseError

SHORT = RelaxConfig(schedule=parse_schedule("20:none"))


@pytest.fixture(name="table")
def fixture_table():
    """A hand-made quarter-step table on the unit torus."""
    table = PhaseTable(1.0, 0.25, ("2S", "HH"))
    table.add(PhaseCell(0.25, 0.25, 0.5, {"2S": 3.0, "HH": NA}, ("2S",)))
    table.add(PhaseCell(0.25, 0.5, 0.25, {"2S": 3.0, "HH": ERR}, ("2S",)))
    return table


@pytest.fixture(scope="module", name="swept")
def fixture_swept():
    """A two-candidate sweep at quarter steps on the unit cube."""
    grid = GridSpec(
        step=0.25,
        refine_step=0.125,
        candidates=(CandidateKind.DOUBLE_SLAB, CandidateKind.HEXAGONAL_HONEYCOMB),
        relax_config=SHORT,
        jobs=1,
    )
    return sweep(grid, make_lattice("cubic", [1.0]))


class TestWinners:
    """Tests for the choose_winners function"""

    def test_tie(self):
        """Test areas within the tie tolerance share the win"""
        assert choose_winners({"A": 1.0, "B": 1.0001, "C": 1.1}) == ("A", "B")

    def test_unavailable_ignored(self):
        """Test NA and ERR never win"""
        assert choose_winners({"A": NA, "B": 2.0, "C": ERR}) == ("B",)
        assert choose_winners({"A": NA}) == ()


class TestGridSpec:
    """Tests for the GridSpec class"""

    def test_canonical_points(self):
        """Test only v1 <= v2 cells with a positive complement"""
        assert GridSpec(step=0.25, refine_step=0.125).canonical_points() == [(1, 1), (1, 2)]

    def test_step_too_large(self):
        """Test the step must stay at or below a third"""
        with pytest.raises(InvalidParameterError, match="refine_step <= step"):
            GridSpec(step=0.5, refine_step=0.1).validate()

    def test_no_candidates(self):
        """Test an empty candidate list is refused"""
        with pytest.raises(InvalidParameterError, match="No candidates"):
            GridSpec(step=0.25, refine_step=0.125, candidates=()).validate()


class TestPhaseTable:
    """Tests for the PhaseTable and its CSV form"""

    def test_mirror(self, table):
        """Test every cell is stored with its swapped twin"""
        assert len(table.cells) == 3
        assert winner(table, 0.5, 0.25) == (("2S",), False)

    def test_off_grid(self, table):
        """Test an off-grid query uses the nearest cell and says so"""
        codes, off_grid = winner(table, 0.26, 0.24)
        assert codes == ("2S",)
        assert off_grid

    def test_csv_round_trip(self, table, tmp_path):
        """Test areas, markers and winners survive the file"""
        loaded = read_csv(export_csv(table, tmp_path / "phase.csv"))
        assert loaded.candidates == ("2S", "HH")
        assert loaded.step == pytest.approx(0.25)
        cell = loaded.cells[(0.25, 0.5)]
        assert cell.areas == {"2S": 3.0, "HH": ERR}
        assert cell.winners == ("2S",)
        assert loaded.cells[(0.25, 0.25)].areas["HH"] == NA

    def test_csv_header(self, table, tmp_path):
        """Test the column order"""
        text = export_csv(table, tmp_path / "phase.csv").read_text()
        assert text.splitlines()[0] == "v1,v2,v3,2S,HH,winner"

    def test_missing_column(self, tmp_path):
        """Test a table without winners is rejected"""
        path = tmp_path / "bad.csv"
        path.write_text("v1,v2,v3,2S\n0.25,0.25,0.5,3\n")
        with pytest.raises(MeshParseError) as info:
            read_csv(path)
        assert info.value.field == "winner"

    def test_bad_area(self, tmp_path):
        """Test an unparsable area names its column"""
        path = tmp_path / "bad.csv"
        path.write_text("v1,v2,v3,2S,winner\n0.25,0.25,0.5,lots,2S\n")
        with pytest.raises(MeshParseError, match="Bad area") as info:
            read_csv(path)
        assert info.value.field == "2S"


class TestSweep:
    """Tests for the sweep driver"""

    def test_cells(self, swept):
        """Test both halves of the quarter grid are present"""
        assert sorted(swept.cells) == [(0.25, 0.25), (0.25, 0.5), (0.5, 0.25)]

    def test_slab_wins_on_cube(self, swept):
        """Test the honeycomb is not applicable and the slabs win"""
        for cell in swept.cells.values():
            assert cell.areas["HH"] == NA
            assert cell.areas["2S"] == pytest.approx(3.0)
            assert cell.winners == ("2S",)

    def test_single_bubble_edges(self, swept):
        """Test edge cells are paired with the best single bubble of the merged volume"""
        edges = single_bubble_edges(swept, make_lattice("cubic", [1.0]))
        assert len(edges) == 3
        assert {edge.single_bubble for edge in edges} == {"slab"}
        assert all(edge.single_bubble_area == pytest.approx(2.0) for edge in edges)

    def test_long_torus(self):
        """Test the slabs on a unit box through the fixed-volume check"""
        grid = GridSpec(candidates=(CandidateKind.DOUBLE_SLAB,), relax_config=SHORT)
        results = long_torus_check([1.0, 2.0], 1.0 / 3.0, 1.0 / 3.0, grid)
        assert [r["winners"] for r in results] == [["2S"], ["2S"]]
        assert results[0]["areas"]["2S"] == pytest.approx(3.0)
        assert results[1]["areas"]["2S"] == pytest.approx(3.0)

    def test_mirror_symmetry(self, swept):
        """Test swapping the enclosed volumes keeps areas and winners"""
        for (v1, v2), cell in swept.cells.items():
            twin = swept.cells[(v2, v1)]
            assert twin.areas == cell.areas
            assert twin.winners == cell.winners
            assert twin.v3 == pytest.approx(cell.v3)


@pytest.mark.slow
class TestPhaseStructure:
    """Tests for the shape of the full-catalogue phase portrait on the unit cube"""

    @staticmethod
    def _cells(points: list[tuple[float, float]], warm_start: bool = False) -> list[PhaseCell]:
        grid = GridSpec(step=0.05, refine_step=0.05, warm_start=warm_start, jobs=1)
        return evaluate_column(make_lattice("cubic", [1.0]), grid, points)

    @pytest.mark.parametrize("v1, v2", [(0.01, 0.01), (0.01, 0.005)])
    def test_small_volumes_are_standard(self, v1, v2):
        """Test the standard double bubble beats every other kind at small volumes"""
        (cell,) = self._cells([(v1, v2)])
        assert cell.winners == ("SDB",)
        others = [a for code, a in cell.areas.items() if code != "SDB" and isinstance(a, float)]
        assert all(cell.areas["SDB"] < area for area in others)

    def test_slab_lens_near_thin_corner(self):
        """Test a tiny bubble beside a near half-torus slab is a slab lens"""
        (cell,) = self._cells([(0.01, 0.45)])
        assert "SL" in cell.winners

    def test_equal_volume_diagonal(self):
        """Test the first change along the diagonal is from standard to a chain"""
        points = [(0.05 * k, 0.05 * k) for k in range(1, 9)]
        cells = self._cells(points, warm_start=True)
        assert "SDB" in cells[0].winners
        changed = [cell for cell in cells if "SDB" not in cell.winners]
        assert changed
        assert "DC" in changed[0].winners


class TestTernary:
    """Tests for the ternary portrait"""

    def test_corners(self):
        """Test the three pure volumes land on the triangle corners"""
        assert barycentric_to_xy(1.0, 0.0, 0.0) == (0.0, 0.0)
        assert barycentric_to_xy(0.0, 1.0, 0.0) == (1.0, 0.0)
        assert barycentric_to_xy(0.0, 0.0, 1.0) == pytest.approx((0.5, 3**0.5 / 2))

    def test_svg(self, table, tmp_path):
        """Test the output is well-formed SVG"""
        path = render_ternary(table, tmp_path / "portrait.svg", title="quarter grid")
        root = ET.parse(path).getroot()
        assert root.tag.endswith("svg")

    def test_deterministic(self, table, tmp_path):
        """Test the same table always gives the same bytes"""
        first = render_ternary(table, tmp_path / "a.svg").read_bytes()
        second = render_ternary(table, tmp_path / "b.svg").read_bytes()
        assert first == second
