"""Candidate double bubbles: kinds, specs, mesh construction and analytic areas."""

import logging
from dataclasses import dataclass
from enum import Enum

from ska_sdp_double_bubble.catalog import profiles, recipes
from ska_sdp_double_bubble.catalog.builders import MeshBuilder
from ska_sdp_double_bubble.configuration.config import (
    BASE_REFINEMENT,
    BUILD_VOLUME_TOL,
    FEASIBILITY_FACTOR,
)
from ska_sdp_double_bubble.evolution.projection import project_volumes
from ska_sdp_double_bubble.geometry import metrics
from ska_sdp_double_bubble.geometry.lattice import Lattice
from ska_sdp_double_bubble.geometry.mesh import Mesh
from ska_sdp_double_bubble.geometry.validation import require_valid, topology_signature
from ska_sdp_double_bubble.utilities.errors import (
    InfeasibleSpecError,
    InvalidMeshError,
    InvalidParameterError,
    UsageError,
)

logger = logging.getLogger(__name__)


class CandidateKind(str, Enum):
    """The candidate topologies, valued by their legend codes."""

    SDB = "SDB"
    DELAUNAY_CHAIN = "DC"
    CYLINDER_LENS = "CL"
    CYLINDER_CROSS = "CC"
    DOUBLE_CYLINDER = "2C"
    SLAB_LENS = "SL"
    CENTER_BUBBLE = "CB"
    CYLINDER_STRING = "CS"
    SLAB_CYLINDER = "SC"
    DOUBLE_SLAB = "2S"
    HEXAGONAL_HONEYCOMB = "HH"

    @classmethod
    def parse(cls, code: str) -> "CandidateKind":
        """Look a kind up by its code, ignoring case."""
        try:
            return cls(code.strip().upper())
        except ValueError as err:
            codes = ", ".join(kind.value.lower() for kind in cls)
            raise UsageError(f"Unknown candidate kind '{code}', expected one of {codes}") from err


@dataclass(frozen=True)
class KindInfo:
    """Catalogue entry of a kind."""

    kind: CandidateKind
    name: str
    analytic: bool
    lattices: str

    def to_dict(self) -> dict:
        """Row of the ``kinds`` listing."""
        return {
            "code": self.kind.value,
            "name": self.name,
            "analytic": self.analytic,
            "lattices": self.lattices,
        }


_CATALOGUE = (
    KindInfo(CandidateKind.SDB, "Standard Double Bubble", True, "any"),
    KindInfo(CandidateKind.DELAUNAY_CHAIN, "Delaunay Chain", False, "any"),
    KindInfo(CandidateKind.CYLINDER_LENS, "Cylinder Lens", False, "any"),
    KindInfo(CandidateKind.CYLINDER_CROSS, "Cylinder Cross", False, "cubic, rect"),
    KindInfo(CandidateKind.DOUBLE_CYLINDER, "Double Cylinder", True, "cubic, rect"),
    KindInfo(CandidateKind.SLAB_LENS, "Slab Lens", False, "cubic, rect"),
    KindInfo(CandidateKind.CENTER_BUBBLE, "Center Bubble", False, "cubic, rect"),
    KindInfo(CandidateKind.CYLINDER_STRING, "Cylinder String", True, "cubic, rect"),
    KindInfo(CandidateKind.SLAB_CYLINDER, "Slab Cylinder", True, "cubic, rect"),
    KindInfo(CandidateKind.DOUBLE_SLAB, "Double Slab", True, "any"),
    KindInfo(CandidateKind.HEXAGONAL_HONEYCOMB, "Hexagonal Honeycomb", True, "rhombic"),
)


def list_kinds() -> list[KindInfo]:
    """All kinds in legend order."""
    return list(_CATALOGUE)


@dataclass(frozen=True)
class CandidateSpec:
    """What to build: a kind on a lattice with two target volumes."""

    kind: CandidateKind
    lattice: Lattice
    v1: float
    v2: float
    refinement: int = BASE_REFINEMENT

    def validate(self):
        """
        Check the volumes and refinement level.

        Raises:
            InvalidParameterError: if a volume is not positive, the volumes fill the
                torus, or the refinement is negative.
        """
        det = self.lattice.det
        if not (self.v1 > 0 and self.v2 > 0):
            raise InvalidParameterError(f"Volumes must be positive, got {self.v1}, {self.v2}")
        if self.v1 + self.v2 >= det:
            raise InvalidParameterError(
                f"Volumes {self.v1} + {self.v2} must leave room in a torus of volume {det:.6g}"
            )
        if self.refinement < 0:
            raise InvalidParameterError(f"Refinement must be >= 0, got {self.refinement}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "lattice": self.lattice.to_dict(),
            "v1": self.v1,
            "v2": self.v2,
            "refinement": self.refinement,
        }


@dataclass(frozen=True)
class AnalyticArea:
    """Closed-form area, ``value`` is None when no closed form is implemented."""

    value: float | None
    note: str

    @property
    def available(self) -> bool:
        return self.value is not None

    def to_dict(self) -> dict:
        return {"value": self.value, "note": self.note}


def _plan(spec: CandidateSpec) -> tuple[recipes.Recipe, recipes.Plan]:
    spec.validate()
    recipe = recipes.RECIPES[spec.kind.value]
    plan = recipe.plan(spec.lattice, spec.v1, spec.v2, spec.refinement)
    return recipe, plan


def _check_components(mesh: Mesh, spec: CandidateSpec, plan: recipes.Plan):
    expected = recipes.EXPECTED_COMPONENTS[spec.kind.value]
    pairs = (
        tuple(sorted((0, plan.large))),
        tuple(sorted((0, plan.small))),
        tuple(sorted((plan.large, plan.small))),
    )
    signature = topology_signature(mesh)
    for pair, count in zip(pairs, expected):
        found = sum(1 for component in signature if component.pair == pair)
        if found != count:
            raise InvalidMeshError(
                f"{spec.kind.value} mesh has {found} interface component(s) between regions "
                f"{pair[0]} and {pair[1]}, expected {count}"
            )


def build(spec: CandidateSpec) -> Mesh:
    """
    Construct the initial mesh of a candidate.

    The mesh is welded from the kind's recipe, validated, projected onto the target
    volumes and checked against the kind's interface component counts.

    Args:
        spec: kind, lattice, volumes and refinement level.

    Returns:
        Mesh: a valid mesh with both volumes within ``BUILD_VOLUME_TOL`` of target.

    Raises:
        InvalidParameterError: for invalid volumes.
        InfeasibleSpecError: if the volumes cannot be realised by the topology.
        UnsupportedLatticeError: if the kind is not built on this lattice kind.
    """
    recipe, plan = _plan(spec)
    builder = MeshBuilder(spec.lattice)
    recipe.emit(builder, plan)
    mesh = builder.build({1: spec.v1, 2: spec.v2})
    require_valid(mesh)
    project_volumes(mesh)

    values = metrics.volume_values(mesh)
    for region, target in ((1, spec.v1), (2, spec.v2)):
        if abs(values[region] - target) > BUILD_VOLUME_TOL:
            raise InfeasibleSpecError(
                f"{spec.kind.value} body {region} settled at {values[region]:.9g}, "
                f"target {target:.9g}"
            )
    _check_components(mesh, spec, plan)
    logger.info(
        "Built %s on %s lattice (%d, %d, %d): area %.9g",
        spec.kind.value,
        spec.lattice.kind.value,
        *mesh.counts(),
        metrics.total_area(mesh),
    )
    return mesh


def analytic_area(spec: CandidateSpec) -> AnalyticArea:
    """
    Closed-form area of a candidate, when one is implemented.

    Raises:
        The same feasibility errors as ``build``.
    """
    _, plan = _plan(spec)
    return AnalyticArea(plan.area, plan.note)


def single_bubble_reference(lattice: Lattice, v: float) -> tuple[float, str]:
    """Least of the sphere, tube and slab areas enclosing ``v``, with its shape name."""
    areas = profiles.single_bubble_areas(
        lattice.periods, lattice.widths, lattice.det, v, FEASIBILITY_FACTOR
    )
    kind = min(areas, key=areas.get)
    return areas[kind], kind
