"""Sweep of volume triples: relax every candidate per cell and record the winners.

Volumes on the grid are fractions of the cell volume. Only cells with ``v1 <= v2``
are computed; their mirror images are copied with the volumes swapped.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import polars as pl

from ska_sdp_double_bubble.catalog.candidates import (
    CandidateKind,
    CandidateSpec,
    build,
    list_kinds,
    single_bubble_reference,
)
from ska_sdp_double_bubble.configuration.config import (
    BASE_REFINEMENT,
    GRID_STEP,
    JOBS,
    REFINE_STEP,
    TIE_TOLERANCE,
)
from ska_sdp_double_bubble.evolution.projection import project_volumes
from ska_sdp_double_bubble.evolution.relax import RelaxConfig, Stage, relax
from ska_sdp_double_bubble.geometry.lattice import Lattice, make_lattice
from ska_sdp_double_bubble.geometry.mesh import Mesh
from ska_sdp_double_bubble.utilities.errors import (
    DoubleBubbleError,
    InfeasibleSpecError,
    InvalidParameterError,
    MeshParseError,
    UnsupportedLatticeError,
)
from ska_sdp_double_bubble.utilities.helper_functions import format_significant

logger = logging.getLogger(__name__)

NA = "NA"
ERR = "ERR"
KEY_DIGITS = 9


def cell_key(v1: float, v2: float) -> tuple[float, float]:
    """Rounded volumes used to index cells."""
    return round(v1, KEY_DIGITS), round(v2, KEY_DIGITS)


@dataclass
class GridSpec:
    """Resolution, candidates and relaxation settings of a sweep."""

    step: float = GRID_STEP
    refine_step: float = REFINE_STEP
    candidates: tuple[CandidateKind, ...] = field(
        default_factory=lambda: tuple(info.kind for info in list_kinds())
    )
    relax_config: RelaxConfig = field(default_factory=RelaxConfig)
    warm_start: bool = True
    refinement: int = BASE_REFINEMENT
    jobs: int = JOBS

    def validate(self):
        """
        Raises:
            InvalidParameterError: unless 0 < refine_step <= step <= 1/3, or with no candidates.
        """
        if not 0.0 < self.refine_step <= self.step <= 1.0 / 3.0 + 1e-12:
            raise InvalidParameterError(
                f"Need 0 < refine_step <= step <= 1/3, got {self.refine_step}, {self.step}"
            )
        if not self.candidates:
            raise InvalidParameterError("No candidates to sweep")
        self.relax_config.validate()

    @property
    def divisions(self) -> int:
        """Grid intervals along each simplex edge."""
        return int(round(1.0 / self.step))

    def canonical_points(self) -> list[tuple[int, int]]:
        """Index pairs (i, j), i <= j, with all three volumes positive."""
        n = self.divisions
        return [(i, j) for i in range(1, n) for j in range(i, n - i)]


@dataclass
class PhaseCell:
    """Areas of every candidate at one volume triple."""

    v1: float
    v2: float
    v3: float
    areas: dict[str, float | str]
    winners: tuple[str, ...] = ()

    @property
    def min_area(self) -> float | None:
        """Least available area."""
        values = [a for a in self.areas.values() if isinstance(a, float)]
        return min(values) if values else None

    def mirrored(self) -> "PhaseCell":
        """The same cell with the two enclosed volumes swapped."""
        return PhaseCell(self.v2, self.v1, self.v3, dict(self.areas), self.winners)


@dataclass
class PhaseTable:
    """Cells of a sweep keyed by their rounded (v1, v2)."""

    det: float
    step: float
    candidates: tuple[str, ...]
    cells: dict[tuple[float, float], PhaseCell] = field(default_factory=dict)
    refine_step: float | None = None

    def add(self, cell: PhaseCell):
        """Store a cell and its mirror image."""
        self.cells[cell_key(cell.v1, cell.v2)] = cell
        mirror = cell.mirrored()
        self.cells[cell_key(mirror.v1, mirror.v2)] = mirror

    def sorted_cells(self) -> list[PhaseCell]:
        """Cells in lexicographic (v1, v2) order."""
        return [self.cells[key] for key in sorted(self.cells)]

    def min_areas(self) -> dict[tuple[float, float], float]:
        """Least area per cell, cells without any available area omitted."""
        return {
            key: cell.min_area for key, cell in self.cells.items() if cell.min_area is not None
        }


def choose_winners(areas: dict[str, float | str], tie: float = TIE_TOLERANCE) -> tuple[str, ...]:
    """Codes whose areas are within ``tie`` of the least available area."""
    available = {code: a for code, a in areas.items() if isinstance(a, float)}
    if not available:
        return ()
    best = min(available.values())
    return tuple(code for code, a in available.items() if a <= best + tie)


def _warm_schedule(config: RelaxConfig) -> RelaxConfig:
    stages = tuple(
        Stage(stage.descent_steps, tuple(op for op in stage.then if op != "refine"))
        for stage in config.schedule
    )
    return replace(config, schedule=stages)


def _warm_mesh(previous: Mesh, v1: float, v2: float) -> Mesh | None:
    mesh = previous.copy()
    for body, target in zip(sorted(mesh.bodies, key=lambda b: b.region), (v1, v2)):
        body.target = target
    try:
        project_volumes(mesh)
    except DoubleBubbleError as err:
        logger.debug("Warm start rejected: %s", err)
        return None
    return mesh


def _relaxed_area(
    kind: CandidateKind,
    lattice: Lattice,
    v1: float,
    v2: float,
    grid: GridSpec,
    previous: Mesh | None,
) -> tuple[float | str, Mesh | None]:
    try:
        mesh = _warm_mesh(previous, v1, v2) if previous is not None else None
        if mesh is None:
            mesh = build(CandidateSpec(kind, lattice, v1, v2, grid.refinement))
            config = grid.relax_config
        else:
            config = _warm_schedule(grid.relax_config)
        mesh, report = relax(mesh, config)
    except (InfeasibleSpecError, UnsupportedLatticeError) as err:
        logger.debug("%s not applicable at (%g, %g): %s", kind.value, v1, v2, err)
        return NA, None
    except DoubleBubbleError as err:
        logger.warning("%s failed at (%g, %g): %s", kind.value, v1, v2, err)
        return ERR, None
    if not report.converged:
        logger.warning("%s did not converge at (%g, %g)", kind.value, v1, v2)
    return report.final_area, mesh


def evaluate_column(
    lattice: Lattice, grid: GridSpec, points: list[tuple[float, float]]
) -> list[PhaseCell]:
    """Relax every candidate along a run of neighbouring cells.

    Each cell warm starts from the relaxed meshes of the one before it.
    """
    det = lattice.det
    previous: dict[str, Mesh | None] = {}
    cells = []
    for f1, f2 in points:
        v1, v2 = f1 * det, f2 * det
        areas: dict[str, float | str] = {}
        for kind in grid.candidates:
            warm = previous.get(kind.value) if grid.warm_start else None
            area, mesh = _relaxed_area(kind, lattice, v1, v2, grid, warm)
            areas[kind.value] = area
            previous[kind.value] = mesh
        cell = PhaseCell(v1, v2, det - v1 - v2, areas, choose_winners(areas))
        logger.info("Cell (%.6g, %.6g): winner %s", v1, v2, "/".join(cell.winners) or NA)
        cells.append(cell)
    return cells


def _run(lattice: Lattice, grid: GridSpec, columns: list[list[tuple[float, float]]]):
    if grid.jobs <= 1 or len(columns) <= 1:
        return [evaluate_column(lattice, grid, column) for column in columns]
    with ProcessPoolExecutor(max_workers=grid.jobs) as executor:
        futures = [executor.submit(evaluate_column, lattice, grid, c) for c in columns]
        return [future.result() for future in futures]


def boundary_points(table: PhaseTable, grid: GridSpec) -> list[tuple[float, float]]:
    """Canonical refined fractions between neighbouring cells with different winners.

    Each such pair of grid cells gets the ``refine_step`` points on the segment joining
    them, mirrored into ``v1 <= v2``.
    """
    det = table.det
    step, fine = grid.step, grid.refine_step
    ratio = max(1, int(round(step / fine)))
    points = set()
    for i, j in grid.canonical_points():
        cell = table.cells.get(cell_key(i * step * det, j * step * det))
        if cell is None:
            continue
        for di, dj in ((1, 0), (0, 1), (1, -1)):
            other = table.cells.get(cell_key((i + di) * step * det, (j + dj) * step * det))
            if other is None or set(other.winners) == set(cell.winners):
                continue
            for k in range(1, ratio):
                f1, f2 = sorted((i * step + k * di * fine, j * step + k * dj * fine))
                if cell_key(f1 * det, f2 * det) not in table.cells:
                    points.add((round(f1, KEY_DIGITS), round(f2, KEY_DIGITS)))
    return sorted(points)


def sweep(grid: GridSpec, lattice: Lattice) -> PhaseTable:
    """
    Relax every candidate on every cell of the grid and pick the winners.

    Cells along a line of constant v1 run in one worker so each can warm start from
    its neighbour. A second pass evaluates cells at ``refine_step`` between
    neighbouring cells whose winners differ. Failures never abort the sweep;
    they are stored as ``NA`` (not applicable) or ``ERR``.

    Returns:
        PhaseTable: both halves of the grid.
    """
    grid.validate()
    step = grid.step
    table = PhaseTable(
        lattice.det,
        step,
        tuple(kind.value for kind in grid.candidates),
        refine_step=grid.refine_step,
    )

    columns: dict[int, list[tuple[float, float]]] = {}
    for i, j in grid.canonical_points():
        columns.setdefault(i, []).append((i * step, j * step))
    total = sum(map(len, columns.values()))
    logger.info("Sweeping %d cell(s) in %d column(s)", total, len(columns))
    for cells in _run(lattice, grid, list(columns.values())):
        for cell in cells:
            table.add(cell)

    refined = boundary_points(table, grid)
    if refined:
        logger.info("Refining %d cell(s) along phase boundaries", len(refined))
        cold = replace(grid, warm_start=False)
        for cells in _run(lattice, cold, [[point] for point in refined]):
            for cell in cells:
                table.add(cell)
    return table


def winner(table: PhaseTable, v1: float, v2: float) -> tuple[tuple[str, ...], bool]:
    """
    Stored winner code(s) of a cell.

    Returns:
        tuple: the codes and a flag that is True when (v1, v2) was off the grid and
        the nearest cell was used instead.
    """
    cell = table.cells.get(cell_key(v1, v2))
    if cell is not None:
        return cell.winners, False
    nearest = min(table.cells.values(), key=lambda c: math.hypot(c.v1 - v1, c.v2 - v2))
    logger.warning(
        "(%g, %g) is off the grid, using the nearest cell (%g, %g)", v1, v2, nearest.v1, nearest.v2
    )
    return nearest.winners, True


def export_csv(table: PhaseTable, path: Path | str) -> Path:
    """Write one row per cell: v1, v2, v3, an area per candidate and the winner(s)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns: dict[str, list[str]] = {"v1": [], "v2": [], "v3": []}
    columns.update({code: [] for code in table.candidates})
    columns["winner"] = []
    for cell in table.sorted_cells():
        columns["v1"].append(format_significant(cell.v1))
        columns["v2"].append(format_significant(cell.v2))
        columns["v3"].append(format_significant(cell.v3))
        for code in table.candidates:
            area = cell.areas.get(code, NA)
            columns[code].append(format_significant(area) if isinstance(area, float) else area)
        columns["winner"].append("+".join(cell.winners) or NA)
    pl.DataFrame(columns, schema={name: pl.String for name in columns}).write_csv(path)
    logger.info("Wrote %d cell(s) to %s", len(table.cells), path)
    return path


def _parse_area(text: str, column: str, row: int) -> float | str:
    if text in (NA, ERR):
        return text
    try:
        return float(text)
    except ValueError as err:
        raise MeshParseError(f"Bad area {text!r} in row {row}", field=column) from err


def read_csv(path: Path | str, step: float | None = None) -> PhaseTable:
    """
    Read a table written by ``export_csv``.

    Args:
        path: CSV file.
        step: grid step; defaults to the smallest v1 fraction in the file.

    Raises:
        MeshParseError: if a column is missing or a value cannot be parsed.
    """
    frame = pl.read_csv(path, infer_schema_length=0)
    for column in ("v1", "v2", "v3", "winner"):
        if column not in frame.columns:
            raise MeshParseError("Missing column in phase table", field=column)
    candidates = tuple(c for c in frame.columns if c not in ("v1", "v2", "v3", "winner"))
    rows = list(frame.iter_rows(named=True))
    cells = []
    for number, row in enumerate(rows, start=1):
        v1, v2, v3 = (float(_parse_area(row[c], c, number)) for c in ("v1", "v2", "v3"))
        areas = {code: _parse_area(row[code], code, number) for code in candidates}
        winners = () if row["winner"] == NA else tuple(row["winner"].split("+"))
        cells.append(PhaseCell(v1, v2, v3, areas, winners))
    det = cells[0].v1 + cells[0].v2 + cells[0].v3 if cells else 1.0
    if step is None:
        step = min((c.v1 for c in cells), default=det) / det
    table = PhaseTable(det, step, candidates)
    for cell in cells:
        table.cells[cell_key(cell.v1, cell.v2)] = cell
    return table


@dataclass(frozen=True)
class EdgeCell:
    """A portrait edge cell next to the single-bubble shape of its merged volume."""

    v1: float
    v2: float
    winners: tuple[str, ...]
    single_bubble: str
    single_bubble_area: float

    def to_dict(self) -> dict:
        return {
            "v1": self.v1,
            "v2": self.v2,
            "winners": list(self.winners),
            "single_bubble": self.single_bubble,
            "single_bubble_area": self.single_bubble_area,
        }


def single_bubble_edges(table: PhaseTable, lattice: Lattice) -> list[EdgeCell]:
    """Cells with one volume at the smallest grid value and the best single bubble of v1 + v2."""
    smallest = table.step * table.det
    edges = []
    for cell in table.sorted_cells():
        if not math.isclose(min(cell.v1, cell.v2), smallest, rel_tol=1e-6):
            continue
        area, shape = single_bubble_reference(lattice, cell.v1 + cell.v2)
        edges.append(EdgeCell(cell.v1, cell.v2, cell.winners, shape, area))
    return edges


def long_torus_check(
    lengths, v1: float, v2: float, grid: GridSpec | None = None
) -> list[dict]:
    """Winners at fixed volumes on the rectangular tori (1, 1, L) for each L in ``lengths``."""
    grid = grid or GridSpec(warm_start=False)
    results = []
    for length in lengths:
        lattice = make_lattice("rect", (1.0, 1.0, float(length)))
        areas = {
            kind.value: _relaxed_area(kind, lattice, v1, v2, grid, None)[0]
            for kind in grid.candidates
        }
        winners = choose_winners(areas)
        logger.info("Torus (1, 1, %g): winner %s", length, "/".join(winners) or NA)
        results.append({"length": float(length), "areas": areas, "winners": list(winners)})
    return results
