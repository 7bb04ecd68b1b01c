"""Newton projection onto the two volume constraints."""

import logging

import numpy as np

from ska_sdp_double_bubble.configuration.config import (
    GRAM_CONDITION_LIMIT,
    PROJECTION_ITERATIONS,
    VOLUME_TOL_FRACTION,
)
from ska_sdp_double_bubble.geometry import metrics
from ska_sdp_double_bubble.geometry.mesh import BODY_REGIONS, Mesh
from ska_sdp_double_bubble.utilities.errors import DegenerateConstraintError, ProjectionError

logger = logging.getLogger(__name__)


def default_volume_tol(mesh: Mesh) -> float:
    """Absolute volume tolerance scaled by the cell volume."""
    return VOLUME_TOL_FRACTION * mesh.lattice.det


def volume_errors(mesh: Mesh, positions: np.ndarray | None = None) -> np.ndarray:
    """target - value for regions 1 and 2."""
    values = metrics.volume_values(mesh, positions)
    return np.array([mesh.body(r).target - values[r] for r in BODY_REGIONS])


def constraint_gradients(mesh: Mesh, positions: np.ndarray | None = None) -> np.ndarray:
    """Stacked ambient volume gradients, shape (2, V, 3)."""
    # pylint: disable=protected-access
    return np.stack([metrics._volume_gradient_array(mesh, r, positions) for r in BODY_REGIONS])


def solve_gram(gradients: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """
    Solve the 2x2 Gram system of the constraint gradients.

    Raises:
        DegenerateConstraintError: if the gradients are numerically dependent.
    """
    flat = gradients.reshape(2, -1)
    gram = flat @ flat.T
    condition = np.linalg.cond(gram)
    if not np.isfinite(condition) or condition > GRAM_CONDITION_LIMIT:
        raise DegenerateConstraintError(
            f"Volume gradients are linearly dependent (Gram condition {condition:.3g})"
        )
    return np.linalg.solve(gram, rhs)


def project_positions(
    mesh: Mesh, positions: np.ndarray, volume_tol: float
) -> tuple[np.ndarray, int]:
    """Newton iterations along span{grad V1, grad V2} until both errors are within tolerance.

    Returns the projected lattice coordinates and the number of iterations used.
    """
    inverse_t = mesh.lattice.inverse.T
    for iteration in range(PROJECTION_ITERATIONS + 1):
        errors = volume_errors(mesh, positions)
        if np.max(np.abs(errors)) <= volume_tol:
            return positions, iteration
        if iteration == PROJECTION_ITERATIONS:
            break
        gradients = constraint_gradients(mesh, positions)
        multipliers = solve_gram(gradients, errors)
        move = np.tensordot(multipliers, gradients, axes=1)
        positions = positions + move @ inverse_t
    raise ProjectionError(
        f"Volume projection did not converge in {PROJECTION_ITERATIONS} iterations "
        f"(errors {errors.tolist()})"
    )


def project_volumes(mesh: Mesh, volume_tol: float | None = None) -> Mesh:
    """
    Move the mesh onto both volume targets (in place).

    Args:
        mesh: a valid mesh.
        volume_tol: absolute tolerance; defaults to 1e-9 times the cell volume.

    Returns:
        Mesh: the same mesh, projected.

    Raises:
        DegenerateConstraintError: singular Gram matrix.
        ProjectionError: no convergence within the iteration limit.
    """
    tol = default_volume_tol(mesh) if volume_tol is None else volume_tol
    before = metrics.volume_values(mesh)
    positions, iterations = project_positions(mesh, mesh.positions.copy(), tol)
    if iterations:
        values = metrics.volume_values(mesh, positions)
        if mesh.set_positions(positions):
            metrics.reanchor(mesh, values)
        logger.debug(
            "Projected volumes in %d iteration(s): %s -> %s",
            iterations,
            before,
            metrics.volume_values(mesh),
        )
    return mesh
