"""
Configure variables to be used.
"""

import logging
from pathlib import Path

from starlette.config import Config

ENV_FILE: Path | None = Path(".env")
if not ENV_FILE.exists():
    ENV_FILE = None

config: Config = Config(ENV_FILE)

VERBOSE: bool = config("DOUBLE_BUBBLE_VERBOSE", cast=bool, default=False)
LOG_LEVEL: int = logging.DEBUG if VERBOSE else logging.WARNING

OUTPUT_ROOT: Path = Path(config("DOUBLE_BUBBLE_OUTPUT_ROOT", default="outputs/"))
JOBS: int = int(config("DOUBLE_BUBBLE_JOBS", default=1))
MC_SAMPLES: int = int(config("DOUBLE_BUBBLE_MC_SAMPLES", default=1_000_000))
GRID_STEP: float = float(config("DOUBLE_BUBBLE_GRID_STEP", default=0.05))
REFINE_STEP: float = float(config("DOUBLE_BUBBLE_REFINE_STEP", default=0.005))
BASE_REFINEMENT: int = int(config("DOUBLE_BUBBLE_BASE_REFINEMENT", default=0))

# Relaxation
ARMIJO_C: float = 1e-4
BACKTRACK: float = 0.5
MAX_HALVINGS: int = 40
MAX_STEP_FRACTION: float = 0.05
AREA_TOL: float = 1e-7
AREA_WINDOW: int = 10
VOLUME_TOL_FRACTION: float = 1e-9
PROJECTION_ITERATIONS: int = 20
GRAM_CONDITION_LIMIT: float = 1e12
EQUIANGULATE_MAX_DIHEDRAL: float = 20.0
DEFAULT_SCHEDULE: tuple[tuple[int, str], ...] = (
    (300, "refine"),
    (300, "refine"),
    (300, "equiangulate+average"),
    (1000, "none"),
)

# Candidates
FEASIBILITY_FACTOR: float = 0.45
CIRCLE_SEGMENTS: int = 24
EXTRUSION_SEGMENTS: int = 4
BUILD_VOLUME_TOL: float = 1e-6

# Comparisons
TIE_TOLERANCE: float = 2e-4
CONCAVITY_EPSILON: float = 2e-3

# Monte Carlo / ray casting
CLASSIFICATION_RETRIES: int = 8
ORACLE_FAILURE_RATE: float = 1e-3

# Plateau angles
ANGLE_WINDOW_DEGREES: float = 2.0

# Bisecting planes
ALPHA_SAMPLES: int = 129
HALVING_TOL: float = 1e-3

PHASE_COLOURS: dict[str, str] = {
    "SDB": "#1f77b4",
    "DC": "#ff7f0e",
    "CL": "#2ca02c",
    "CC": "#d62728",
    "2C": "#9467bd",
    "SL": "#8c564b",
    "CB": "#e377c2",
    "CS": "#7f7f7f",
    "SC": "#bcbd22",
    "2S": "#17becf",
    "HH": "#393b79",
}
