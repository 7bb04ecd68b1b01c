"""Constrained gradient descent on total area with a refinement schedule."""

import logging
from dataclasses import dataclass, field

import numpy as np

from ska_sdp_double_bubble.configuration.config import (
    AREA_TOL,
    AREA_WINDOW,
    ARMIJO_C,
    BACKTRACK,
    DEFAULT_SCHEDULE,
    MAX_HALVINGS,
    MAX_STEP_FRACTION,
)
from ska_sdp_double_bubble.evolution import remesh
from ska_sdp_double_bubble.evolution.projection import (
    constraint_gradients,
    default_volume_tol,
    project_positions,
    project_volumes,
    solve_gram,
    volume_errors,
)
from ska_sdp_double_bubble.geometry import metrics
from ska_sdp_double_bubble.geometry.mesh import Mesh
from ska_sdp_double_bubble.geometry.validation import require_valid
from ska_sdp_double_bubble.utilities.errors import (
    AnchoringError,
    DegenerateConstraintError,
    InvalidParameterError,
    PreconditionError,
    ProjectionError,
)
from ska_sdp_double_bubble.utilities.helper_functions import relative_change

logger = logging.getLogger(__name__)

OPERATIONS = {
    "refine": remesh.refine,
    "equiangulate": remesh.equiangulate,
    "average": remesh.vertex_average,
}


@dataclass(frozen=True)
class Stage:
    """Descent steps followed by mesh operations."""

    descent_steps: int
    then: tuple[str, ...] = ()

    def label(self) -> str:
        """Schedule notation, e.g. ``300:refine``."""
        return f"{self.descent_steps}:{'+'.join(self.then) or 'none'}"


def parse_schedule(text: str) -> tuple[Stage, ...]:
    """Parse ``"300:refine,300:equiangulate+average,1000:none"``."""
    stages = []
    for item in text.split(","):
        steps, _, ops = item.strip().partition(":")
        try:
            count = int(steps)
        except ValueError as exc:
            raise InvalidParameterError(f"Bad schedule stage {item!r}") from exc
        then = tuple(op for op in ops.split("+") if op and op != "none")
        stages.append(Stage(count, then))
    return tuple(stages)


def _default_stages() -> tuple[Stage, ...]:
    return tuple(
        Stage(steps, tuple(op for op in ops.split("+") if op != "none"))
        for steps, ops in DEFAULT_SCHEDULE
    )


@dataclass
class RelaxConfig:
    """
    Schedule and tolerances of a relaxation.

    ``volume_tol`` and ``max_step`` default to values scaled by the lattice.
    """

    schedule: tuple[Stage, ...] = field(default_factory=_default_stages)
    area_tol: float = AREA_TOL
    window: int = AREA_WINDOW
    volume_tol: float | None = None
    max_step: float | None = None
    armijo_c: float = ARMIJO_C
    backtrack: float = BACKTRACK
    max_halvings: int = MAX_HALVINGS
    dump_gradients: bool = False

    def validate(self):
        """
        Raises:
            InvalidParameterError: on an empty schedule, non-positive steps or unknown operations.
        """
        if not self.schedule:
            raise InvalidParameterError("Schedule has no stages")
        for stage in self.schedule:
            if stage.descent_steps <= 0:
                raise InvalidParameterError(f"Stage {stage.label()} needs descent_steps > 0")
            unknown = set(stage.then) - set(OPERATIONS)
            if unknown:
                raise InvalidParameterError(f"Unknown mesh operation(s) {sorted(unknown)}")
        if self.area_tol <= 0 or self.window < 1:
            raise InvalidParameterError("area_tol must be positive and window at least 1")
        if not 0.0 < self.backtrack < 1.0 or not 0.0 < self.armijo_c < 1.0:
            raise InvalidParameterError("armijo_c and backtrack must lie in (0, 1)")

    def tolerance(self, mesh: Mesh) -> float:
        """Absolute volume tolerance for this mesh."""
        return default_volume_tol(mesh) if self.volume_tol is None else self.volume_tol

    def step_cap(self, mesh: Mesh) -> float:
        """Largest vertex displacement per step."""
        if self.max_step is not None:
            return self.max_step
        return MAX_STEP_FRACTION * mesh.lattice.shortest_period


@dataclass
class StepStats:
    """Outcome of one descent step."""

    area: float
    volume_errors: tuple[float, float]
    step_length: float
    scale: float
    stalled: bool = False


@dataclass
class StageRecord:
    """Per-step history of one stage."""

    stage: Stage
    steps: list[StepStats] = field(default_factory=list)

    @property
    def areas(self) -> list[float]:
        """Area after each step."""
        return [s.area for s in self.steps]

    def to_dict(self) -> dict:
        """JSON-ready form."""
        return {
            "stage": self.stage.label(),
            "areas": self.areas,
            "v1_errors": [s.volume_errors[0] for s in self.steps],
            "v2_errors": [s.volume_errors[1] for s in self.steps],
            "step_lengths": [s.step_length for s in self.steps],
            "stalled": any(s.stalled for s in self.steps),
        }


@dataclass
class RelaxReport:
    """History and verdict of a relaxation."""

    stages: list[StageRecord] = field(default_factory=list)
    converged: bool = False
    stage_reached: int = 0
    final_area: float = float("nan")
    gradients: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        """JSON-ready form."""
        content = {
            "converged": self.converged,
            "stage_reached": self.stage_reached,
            "final_area": self.final_area,
            "stages": [s.to_dict() for s in self.stages],
        }
        if self.gradients:
            content["gradients"] = self.gradients
        return content


def _descent_direction(mesh: Mesh) -> np.ndarray:
    """Negative area gradient with its components along both volume gradients removed."""
    # pylint: disable=protected-access
    gradient = metrics._area_gradient_array(mesh)
    constraints = constraint_gradients(mesh)
    rhs = constraints.reshape(2, -1) @ gradient.reshape(-1)
    multipliers = solve_gram(constraints, rhs)
    return -(gradient - np.tensordot(multipliers, constraints, axes=1))


def descent_step(
    mesh: Mesh, config: RelaxConfig | None = None, scale: float | None = None
) -> StepStats:
    """
    One projected gradient step with Armijo backtracking (in place).

    Args:
        mesh: a mesh on its volume targets.
        config: tolerances; defaults to ``RelaxConfig()``.
        scale: initial trial step length; defaults to the largest allowed step.

    Returns:
        StepStats: the accepted step, or a zero step flagged ``stalled``.

    Raises:
        PreconditionError: if the volumes are off target on entry.
    """
    config = config or RelaxConfig()
    tol = config.tolerance(mesh)
    errors = volume_errors(mesh)
    if np.max(np.abs(errors)) > tol:
        raise PreconditionError(f"Volumes off target before descent: {errors.tolist()}")
    area = metrics.total_area(mesh)
    direction = _descent_direction(mesh)
    norm_sq = float(np.sum(direction * direction))
    largest = float(np.max(np.linalg.norm(direction, axis=1), initial=0.0))
    zero = StepStats(area, tuple(errors.tolist()), 0.0, 0.0)
    if largest <= 1e-14:
        return zero

    cap = config.step_cap(mesh) / largest
    t = cap if scale is None else min(scale, cap)
    inverse_t = mesh.lattice.inverse.T
    for _ in range(config.max_halvings + 1):
        trial = mesh.positions + t * (direction @ inverse_t)
        try:
            trial, _ = project_positions(mesh, trial, tol)
            trial_area = metrics.total_area(mesh, trial)
        except (ProjectionError, DegenerateConstraintError, AnchoringError):
            trial_area = np.inf
        if trial_area <= area - config.armijo_c * t * norm_sq:
            values = metrics.volume_values(mesh, trial)
            moved = np.max(np.linalg.norm((trial - mesh.positions) @ mesh.lattice.basis.T, axis=1))
            if mesh.set_positions(trial):
                metrics.reanchor(mesh, values)
            return StepStats(trial_area, tuple(volume_errors(mesh).tolist()), float(moved), t)
        t *= config.backtrack
    logger.debug("Line search stalled at area %.12g", area)
    zero.stalled = True
    return zero


def _window_change(areas: list[float], window: int) -> float:
    """Relative area change across the trailing window; inf until the window is full."""
    if len(areas) <= window:
        return np.inf
    return relative_change(areas[-(window + 1)], areas[-1])


def relax(mesh: Mesh, config: RelaxConfig | None = None) -> tuple[Mesh, RelaxReport]:
    """
    Run the descent schedule on a valid mesh (in place).

    Convergence means the relative area change over the trailing window of the
    last stage run is below ``area_tol`` with both volumes on target. A stage whose
    steps never move the mesh ends the schedule early.

    Returns:
        tuple: the mesh and its ``RelaxReport``.
    """
    config = config or RelaxConfig()
    config.validate()
    require_valid(mesh)
    tol = config.tolerance(mesh)
    project_volumes(mesh, tol)

    report = RelaxReport()
    for number, stage in enumerate(config.schedule, start=1):
        record = StageRecord(stage)
        report.stages.append(record)
        report.stage_reached = number
        scale = None
        for _ in range(stage.descent_steps):
            stats = descent_step(mesh, config, scale)
            record.steps.append(stats)
            if stats.stalled:
                break
            scale = stats.scale / config.backtrack if stats.scale else None
            if _window_change(record.areas, config.window) < config.area_tol:
                break
        logger.info(
            "Stage %d (%s): %d step(s), area %.12g",
            number,
            stage.label(),
            len(record.steps),
            record.steps[-1].area,
        )
        if all(s.step_length == 0.0 for s in record.steps):
            break
        for operation in stage.then:
            OPERATIONS[operation](mesh, tol)

    errors = volume_errors(mesh)
    report.final_area = metrics.total_area(mesh)
    last = report.stages[-1]
    flat = all(s.step_length == 0.0 for s in last.steps)
    settled = flat or _window_change(last.areas, config.window) < config.area_tol
    report.converged = bool(settled and np.max(np.abs(errors)) <= tol)
    if config.dump_gradients:
        report.gradients = {
            "area": metrics.area_gradient(mesh).to_dict(),
            "volume_1": metrics.volume_gradient(mesh, 1).to_dict(),
            "volume_2": metrics.volume_gradient(mesh, 2).to_dict(),
        }
    logger.info(
        "Relaxation %s after stage %d, area %.12g",
        "converged" if report.converged else "did not converge",
        report.stage_reached,
        report.final_area,
    )
    return mesh, report
