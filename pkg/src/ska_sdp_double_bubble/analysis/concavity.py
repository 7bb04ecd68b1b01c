"""Midpoint concavity of the least-area function over a phase table."""

import logging
from dataclasses import dataclass

import numpy as np

from ska_sdp_double_bubble.configuration.config import CONCAVITY_EPSILON
from ska_sdp_double_bubble.phase.sweep import PhaseTable

logger = logging.getLogger(__name__)

# Cells further than this from the finest grid, in grid units, are skipped.
GRID_TOLERANCE = 1e-6


@dataclass(frozen=True)
class ConcavityViolation:
    """Cells x, y and (x + y) / 2 where A(mid) < (A(x) + A(y)) / 2 - epsilon."""

    first: tuple[float, float]
    second: tuple[float, float]
    midpoint: tuple[float, float]
    deficit: float

    def to_dict(self) -> dict:
        return {
            "first": list(self.first),
            "second": list(self.second),
            "midpoint": list(self.midpoint),
            "deficit": self.deficit,
        }


def concavity_check(
    table: PhaseTable, epsilon: float = CONCAVITY_EPSILON
) -> list[ConcavityViolation]:
    """
    Test A((x + y) / 2) >= (A(x) + A(y)) / 2 - epsilon for every pair of cells whose
    midpoint is also a cell.

    Args:
        table: a phase table; cells without an available area are ignored.
        epsilon: allowance for relaxation noise.

    Returns:
        list: the violations, largest deficit first. Empty when the table looks concave.
    """
    areas = table.min_areas()
    if len(areas) < 3:
        return []
    points = np.array(sorted(areas))
    values = np.array([areas[tuple(p)] for p in points])
    scaled = points / (table.det * (table.refine_step or table.step))
    keys = np.rint(scaled).astype(np.int64)
    on_grid = np.all(np.abs(scaled - keys) < GRID_TOLERANCE, axis=1)
    points, values, keys = points[on_grid], values[on_grid], keys[on_grid]
    if len(points) < 3:
        return []
    # one integer per cell for sorted lookup
    span = int(keys.max()) + 1
    codes = keys[:, 0] * span + keys[:, 1]
    order = np.argsort(codes)
    sorted_codes = codes[order]

    violations = []
    for i in range(len(points) - 1):
        others = np.arange(i + 1, len(points))
        total = keys[i] + keys[others]
        even = np.all(total % 2 == 0, axis=1)
        if not even.any():
            continue
        others, mid = others[even], total[even] // 2
        mid_codes = mid[:, 0] * span + mid[:, 1]
        slots = np.clip(np.searchsorted(sorted_codes, mid_codes), 0, len(codes) - 1)
        found = sorted_codes[slots] == mid_codes
        for j, slot in zip(others[found], slots[found]):
            m = order[slot]
            if m in (i, j):
                continue
            deficit = (values[i] + values[j]) / 2.0 - values[m]
            if deficit > epsilon:
                violations.append(
                    ConcavityViolation(
                        tuple(points[i].tolist()),
                        tuple(points[j].tolist()),
                        tuple(points[m].tolist()),
                        float(deficit),
                    )
                )
    violations.sort(key=lambda v: -v.deficit)
    logger.info("Concavity check: %d violation(s) at epsilon %g", len(violations), epsilon)
    return violations
