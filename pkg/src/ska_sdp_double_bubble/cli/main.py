"""Build, relax and compare double bubbles in flat three-tori."""

import logging
import sys
from pathlib import Path

from ska_sdp_double_bubble.analysis.angles import plateau_angles
from ska_sdp_double_bubble.analysis.clipping import bisecting_planes
from ska_sdp_double_bubble.analysis.concavity import concavity_check
from ska_sdp_double_bubble.analysis.structure import interface_planarity, region_components
from ska_sdp_double_bubble.catalog.candidates import (
    CandidateKind,
    CandidateSpec,
    analytic_area,
    build,
    list_kinds,
)
from ska_sdp_double_bubble.cli.common_cli import (
    configure_logging,
    lattice_spec_parse,
    setup_parser,
)
from ska_sdp_double_bubble.configuration.config import (
    ALPHA_SAMPLES,
    ANGLE_WINDOW_DEGREES,
    AREA_TOL,
    BASE_REFINEMENT,
    CONCAVITY_EPSILON,
    GRID_STEP,
    JOBS,
    MC_SAMPLES,
    OUTPUT_ROOT,
    REFINE_STEP,
)
from ska_sdp_double_bubble.evolution.relax import RelaxConfig, parse_schedule, relax
from ska_sdp_double_bubble.geometry import metrics
from ska_sdp_double_bubble.geometry.mesh_io import export_fe, load_json, save_json
from ska_sdp_double_bubble.geometry.validation import topology_signature, validate
from ska_sdp_double_bubble.phase.sweep import (
    GridSpec,
    export_csv,
    long_torus_check,
    read_csv,
    single_bubble_edges,
    sweep,
)
from ska_sdp_double_bubble.phase.ternary import render_ternary
from ska_sdp_double_bubble.utilities.errors import (
    DoubleBubbleError,
    PreconditionError,
    UsageError,
)
from ska_sdp_double_bubble.utilities.helper_functions import dumps_json, write_json

logger = logging.getLogger(__name__)


def _emit(content, output: str | None):
    if output:
        write_json(output, content)
    else:
        sys.stdout.write(dumps_json(content) + "\n")


def _candidates(text: str) -> tuple[CandidateKind, ...]:
    if text.strip().lower() == "all":
        return tuple(info.kind for info in list_kinds())
    return tuple(CandidateKind.parse(code) for code in text.split(",") if code.strip())


def _relax_config(args) -> RelaxConfig:
    config = RelaxConfig(
        area_tol=args.area_tol,
        volume_tol=args.volume_tol,
        dump_gradients=getattr(args, "dump_gradients", False),
    )
    if args.schedule:
        config.schedule = parse_schedule(args.schedule)
    config.validate()
    return config


def cmd_build(args) -> int:
    """Construct a candidate mesh."""
    spec = CandidateSpec(
        CandidateKind.parse(args.kind),
        lattice_spec_parse(args.lattice),
        args.v1,
        args.v2,
        args.refinement,
    )
    mesh = build(spec)
    save_json(mesh, args.output)
    vertices, edges, facets = mesh.counts()
    _emit(
        {
            "spec": spec.to_dict(),
            "area": metrics.total_area(mesh),
            "analytic": analytic_area(spec).to_dict(),
            "vertices": vertices,
            "edges": edges,
            "facets": facets,
        },
        None,
    )
    return 0


def cmd_relax(args) -> int:
    """Relax a mesh file."""
    mesh = load_json(args.mesh)
    mesh, report = relax(mesh, _relax_config(args))
    save_json(mesh, args.output)
    if args.report:
        write_json(args.report, report.to_dict())
    if not report.converged:
        logger.warning("Relaxation did not converge by stage %d", report.stage_reached)
    _emit(
        {
            "converged": report.converged,
            "stage_reached": report.stage_reached,
            "final_area": report.final_area,
        },
        None,
    )
    return 0


def cmd_area(args) -> int:
    """Area and volumes of a mesh file."""
    mesh = load_json(args.mesh)
    values = metrics.volume_values(mesh)
    _emit(
        {
            "area": metrics.total_area(mesh),
            "volumes": {str(region): value for region, value in values.items()},
            "complement": metrics.complement_volume(mesh),
        },
        args.output,
    )
    return 0


def cmd_validate(args) -> int:
    """Structural checks; exit code 1 when violations are found."""
    report = validate(load_json(args.mesh))
    _emit(report.to_dict(), args.output)
    if not report.is_valid:
        logger.error("Mesh has %d violation(s)", len(report.violations))
        return 1
    return 0


def cmd_angles(args) -> int:
    """Plateau angle report."""
    _emit(plateau_angles(load_json(args.mesh), args.window).to_dict(), args.output)
    return 0


def cmd_bisect(args) -> int:
    """Plane pair halving both bodies."""
    pair = bisecting_planes(load_json(args.mesh), args.axis, args.samples)
    _emit(pair.to_dict(), args.output)
    return 0


def cmd_topology(args) -> int:
    """Interface components, region connectivity and interface flatness."""
    mesh = load_json(args.mesh)
    try:
        planarity = interface_planarity(mesh)
    except PreconditionError as err:
        logger.info("Interface planarity skipped: %s", err)
        planarity = None
    _emit(
        {
            "interfaces": [component.to_dict() for component in topology_signature(mesh)],
            "region_components": {str(r): n for r, n in region_components(mesh).items()},
            "interface_planarity": planarity,
        },
        args.output,
    )
    return 0


def cmd_mc(args) -> int:
    """Monte Carlo region volumes."""
    estimates = metrics.monte_carlo_volumes(load_json(args.mesh), args.samples, args.seed)
    _emit(
        {
            str(region): {"estimate": e.estimate, "stderr": e.stderr}
            for region, e in estimates.items()
        },
        args.output,
    )
    return 0


def cmd_export_fe(args) -> int:
    """Write a Surface Evolver datafile."""
    export_fe(load_json(args.mesh), args.output)
    return 0


def cmd_kinds(args) -> int:
    """List the candidate kinds."""
    _emit([info.to_dict() for info in list_kinds()], args.output)
    return 0


def cmd_phase(args) -> int:
    """Sweep the volume simplex and draw the phase portrait."""
    lattice = lattice_spec_parse(args.lattice)
    grid = GridSpec(
        step=args.step,
        refine_step=args.refine_step,
        candidates=_candidates(args.candidates),
        relax_config=_relax_config(args),
        warm_start=not args.no_warm_start,
        refinement=args.refinement,
        jobs=args.jobs,
    )
    table = sweep(grid, lattice)
    export_csv(table, args.csv or OUTPUT_ROOT / "phase.csv")
    render_ternary(table, args.svg or OUTPUT_ROOT / "phase.svg")
    if args.edges:
        write_json(args.edges, [edge.to_dict() for edge in single_bubble_edges(table, lattice)])
    return 0


def cmd_concavity(args) -> int:
    """Midpoint concavity report of a phase CSV."""
    violations = concavity_check(read_csv(args.csv, args.step), args.epsilon)
    _emit([violation.to_dict() for violation in violations], args.output)
    return 0


def cmd_long_torus(args) -> int:
    """Winners at fixed volumes on tori (1, 1, L)."""
    try:
        lengths = [float(v) for v in args.lengths.split(",")]
    except ValueError as err:
        raise UsageError(f"Bad --lengths {args.lengths!r}") from err
    grid = GridSpec(
        candidates=_candidates(args.candidates),
        relax_config=_relax_config(args),
        warm_start=False,
        refinement=args.refinement,
    )
    _emit(long_torus_check(lengths, args.v1, args.v2, grid), args.output)
    return 0


def _mesh_command(subparsers, name: str, handler, output_help: str = "", required=False):
    command = subparsers.add_parser(name, help=handler.__doc__)
    command.add_argument("mesh", type=Path, help="Mesh JSON file")
    command.add_argument(
        "-o", "--output", required=required, help=output_help or "JSON output file"
    )
    command.set_defaults(handler=handler)
    return command


def _relax_flags(command):
    command.add_argument("--schedule", help="Stages, e.g. 300:refine,1000:none")
    command.add_argument("--area-tol", type=float, default=AREA_TOL)
    command.add_argument("--volume-tol", type=float, default=None)


def build_parser():
    """The ``double-bubble`` argument parser."""
    parser = setup_parser(__doc__)
    subparsers = parser.add_subparsers(dest="command", required=True)

    command = subparsers.add_parser("build", help=cmd_build.__doc__)
    command.add_argument("--kind", required=True, help="Candidate code, e.g. sdb or 2s")
    command.add_argument("--lattice", default="cubic:1", help="cubic:L | rect:a,b,c | rhombic:s,h")
    command.add_argument("--v1", type=float, required=True)
    command.add_argument("--v2", type=float, required=True)
    command.add_argument("--refinement", type=int, default=BASE_REFINEMENT)
    command.add_argument("-o", "--output", required=True, help="Mesh JSON file")
    command.set_defaults(handler=cmd_build)

    command = _mesh_command(subparsers, "relax", cmd_relax, "Relaxed mesh JSON file", True)
    command.add_argument("--report", help="RelaxReport JSON file")
    command.add_argument("--dump-gradients", action="store_true", default=False)
    _relax_flags(command)

    _mesh_command(subparsers, "area", cmd_area)
    _mesh_command(subparsers, "validate", cmd_validate)
    command = _mesh_command(subparsers, "angles", cmd_angles)
    command.add_argument("--window", type=float, default=ANGLE_WINDOW_DEGREES)
    command = _mesh_command(subparsers, "bisect", cmd_bisect)
    command.add_argument("--axis", type=int, choices=(0, 1, 2), default=2)
    command.add_argument("--samples", type=int, default=ALPHA_SAMPLES)
    _mesh_command(subparsers, "topology", cmd_topology)
    command = _mesh_command(subparsers, "mc", cmd_mc)
    command.add_argument("--samples", type=int, default=MC_SAMPLES)
    command.add_argument("--seed", type=int, default=0)
    _mesh_command(subparsers, "export-fe", cmd_export_fe, "Surface Evolver .fe file", True)

    command = subparsers.add_parser("kinds", help=cmd_kinds.__doc__)
    command.add_argument("-o", "--output", help="JSON output file")
    command.set_defaults(handler=cmd_kinds)

    command = subparsers.add_parser("phase", help=cmd_phase.__doc__)
    command.add_argument("--lattice", default="cubic:1")
    command.add_argument("--step", type=float, default=GRID_STEP)
    command.add_argument("--refine-step", type=float, default=REFINE_STEP)
    command.add_argument("--candidates", default="all", help="Comma separated codes or 'all'")
    command.add_argument("--jobs", type=int, default=JOBS)
    command.add_argument("--refinement", type=int, default=BASE_REFINEMENT)
    command.add_argument("--no-warm-start", action="store_true", default=False)
    command.add_argument("--csv", help="Phase table CSV file")
    command.add_argument("--svg", help="Phase portrait SVG file")
    command.add_argument("--edges", help="Single-bubble edge report JSON file")
    _relax_flags(command)
    command.set_defaults(handler=cmd_phase)

    command = subparsers.add_parser("concavity", help=cmd_concavity.__doc__)
    command.add_argument("csv", type=Path, help="CSV written by the phase command")
    command.add_argument("--epsilon", type=float, default=CONCAVITY_EPSILON)
    command.add_argument("--step", type=float, default=None)
    command.add_argument("-o", "--output", help="JSON output file")
    command.set_defaults(handler=cmd_concavity)

    command = subparsers.add_parser("long-torus", help=cmd_long_torus.__doc__)
    command.add_argument("--lengths", default="1,2,4")
    command.add_argument("--v1", type=float, required=True)
    command.add_argument("--v2", type=float, required=True)
    command.add_argument("--candidates", default="all")
    command.add_argument("--refinement", type=int, default=BASE_REFINEMENT)
    command.add_argument("-o", "--output", help="JSON output file")
    _relax_flags(command)
    command.set_defaults(handler=cmd_long_torus)
    return parser


def run(argv=None) -> int:
    """
    Run one command.

    Returns:
        int: 0 on success, 1 on a domain error, 2 on a usage error.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as err:
        logger.error("%s", err)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    configure_logging(args)

    try:
        return args.handler(args)
    except UsageError as err:
        logger.error("%s", err)
        return 2
    except (DoubleBubbleError, OSError) as err:
        logger.error("%s failed: %s", args.command, err)
        return 1


def main():
    """Main function."""
    sys.exit(run())


if __name__ == "__main__":
    main()
