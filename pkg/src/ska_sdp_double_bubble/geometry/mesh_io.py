"""Mesh files: versioned JSON round-trip and Surface Evolver torus datafiles."""

import logging
import math
from pathlib import Path

import numpy as np
import orjson

from ska_sdp_double_bubble.geometry.lattice import Lattice, LatticeKind, make_lattice
from ska_sdp_double_bubble.geometry.mesh import BODY_REGIONS, REGIONS, Body, Edge, Facet, Mesh
from ska_sdp_double_bubble.geometry.validation import require_valid
from ska_sdp_double_bubble.utilities.errors import DoubleBubbleError, MeshParseError

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
WRAP_SYMBOLS = {-1: "-", 0: "*", 1: "+"}


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_real(value) -> bool:
    return (_is_int(value) or isinstance(value, float)) and math.isfinite(value)


def mesh_to_dict(mesh: Mesh) -> dict:
    """JSON-ready mesh; tombstones are written as null so ids survive."""
    vertices = [
        mesh.positions[i].tolist() if alive else None for i, alive in enumerate(mesh.vertex_alive)
    ]
    edges = [None if e is None else [e.tail, e.head, *e.wrap] for e in mesh.edges]
    facets = [
        None
        if f is None
        else [s * (e + 1) for e, s in zip(f.edges, f.signs)] + [f.front, f.back]
        for f in mesh.facets
    ]
    return {
        "format": FORMAT_VERSION,
        "lattice": mesh.lattice.to_dict(),
        "vertices": vertices,
        "edges": edges,
        "facets": facets,
        "bodies": [{"region": b.region, "target": b.target, "k": b.k} for b in mesh.bodies],
    }


def save_json(mesh: Mesh, path: Path | str) -> Path:
    """Write a valid mesh to ``path``."""
    require_valid(mesh)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(orjson.dumps(mesh_to_dict(mesh), option=orjson.OPT_SERIALIZE_NUMPY))
    logger.info("Saved mesh to %s", path)
    return path


class _Reader:
    """Field access with byte-offset error reporting."""

    def __init__(self, raw: bytes):
        self.raw = raw

    def offset(self, field: str) -> int:
        """Byte offset of a key in the file, or 0."""
        position = self.raw.find(f'"{field}"'.encode())
        return max(position, 0)

    def fail(self, message: str, field: str):
        """Raise a parse error located at ``field``."""
        raise MeshParseError(message, offset=self.offset(field), field=field)

    def get(self, content: dict, field: str, kind):
        """A required field of the given type."""
        if field not in content:
            self.fail("missing required field", field)
        value = content[field]
        if not isinstance(value, kind):
            self.fail(f"expected {getattr(kind, '__name__', kind)}", field)
        return value


def _parse_lattice(reader: _Reader, content: dict) -> Lattice:
    header = reader.get(content, "lattice", dict)
    try:
        lattice = make_lattice(LatticeKind(header["kind"]), header["params"])
    except (KeyError, ValueError, TypeError, DoubleBubbleError) as exc:
        reader.fail(f"bad lattice header: {exc}", "lattice")
    if "basis" in header and not np.allclose(np.asarray(header["basis"]), lattice.basis):
        reader.fail("basis does not match kind and params", "basis")
    return lattice


def _parse_vertices(reader: _Reader, content: dict, mesh: Mesh):
    rows = reader.get(content, "vertices", list)
    positions = np.zeros((len(rows), 3))
    for i, row in enumerate(rows):
        if row is None:
            mesh.vertex_alive.append(False)
            continue
        if not (isinstance(row, list) and len(row) == 3 and all(_is_real(x) for x in row)):
            reader.fail(f"vertex {i} is not a 3-vector of finite numbers", "vertices")
        positions[i] = row
        mesh.vertex_alive.append(True)
    mesh.positions = positions


def _parse_edges(reader: _Reader, content: dict, mesh: Mesh):
    for i, row in enumerate(reader.get(content, "edges", list)):
        if row is None:
            mesh.edges.append(None)
            continue
        if not (isinstance(row, list) and len(row) == 5 and all(_is_int(x) for x in row)):
            reader.fail(f"edge {i} must be five integers", "edges")
        tail, head, *wrap = row
        if any(abs(w) > 1 for w in wrap):
            reader.fail(f"edge {i} wrap {wrap} exceeds one period", "edges")
        if not (0 <= tail < len(mesh.vertex_alive) and 0 <= head < len(mesh.vertex_alive)):
            reader.fail(f"edge {i} references a missing vertex", "edges")
        mesh.edges.append(Edge(tail, head, tuple(wrap)))


def _parse_facets(reader: _Reader, content: dict, mesh: Mesh):
    for i, row in enumerate(reader.get(content, "facets", list)):
        if row is None:
            mesh.facets.append(None)
            continue
        if not (isinstance(row, list) and len(row) == 5 and all(_is_int(x) for x in row)):
            reader.fail(f"facet {i} must be five integers", "facets")
        signed, front, back = row[:3], row[3], row[4]
        if 0 in signed or any(abs(s) > len(mesh.edges) for s in signed):
            reader.fail(f"facet {i} references a missing edge", "facets")
        if front not in REGIONS or back not in REGIONS:
            reader.fail(f"facet {i} has unknown region", "facets")
        mesh.facets.append(
            Facet(
                tuple(abs(s) - 1 for s in signed),
                tuple(1 if s > 0 else -1 for s in signed),
                front,
                back,
            )
        )


def _parse_bodies(reader: _Reader, content: dict, mesh: Mesh):
    for entry in reader.get(content, "bodies", list):
        if not isinstance(entry, dict) or not {"region", "target", "k"} <= set(entry):
            reader.fail("body needs region, target and k", "bodies")
        if (
            not _is_int(entry["region"])
            or entry["region"] not in BODY_REGIONS
            or not _is_int(entry["k"])
            or not _is_real(entry["target"])
        ):
            reader.fail("bad body entry", "bodies")
        mesh.bodies.append(Body(entry["region"], float(entry["target"]), entry["k"]))


def load_json(path: Path | str) -> Mesh:
    """
    Read a mesh written by ``save_json``.

    Raises:
        MeshParseError: on malformed JSON or schema violations, naming the byte
            offset and field.
    """
    raw = Path(path).read_bytes()
    try:
        content = orjson.loads(raw)
    except orjson.JSONDecodeError as exc:
        raise MeshParseError(f"malformed JSON: {exc.msg}", offset=exc.pos) from exc
    reader = _Reader(raw)
    if not isinstance(content, dict):
        raise MeshParseError("top level must be an object", offset=0)
    if reader.get(content, "format", int) != FORMAT_VERSION:
        reader.fail(f"unsupported format, expected {FORMAT_VERSION}", "format")

    mesh = Mesh(_parse_lattice(reader, content))
    _parse_vertices(reader, content, mesh)
    _parse_edges(reader, content, mesh)
    _parse_facets(reader, content, mesh)
    _parse_bodies(reader, content, mesh)
    mesh.rebuild_edge_index()
    logger.info("Loaded mesh from %s: %s (V, E, F)", path, mesh.counts())
    return mesh


def export_fe(mesh: Mesh, path: Path | str) -> Path:
    """Write a torus-model Surface Evolver datafile (1-based ids, LF line ends)."""
    require_valid(mesh)
    vertex_ids = mesh.live_vertex_ids()
    vertex_number = {vid: n + 1 for n, vid in enumerate(vertex_ids)}
    edge_ids = mesh.live_edge_ids()
    edge_number = {eid: n + 1 for n, eid in enumerate(edge_ids)}
    facet_ids = mesh.live_facet_ids()
    facet_number = {fid: n + 1 for n, fid in enumerate(facet_ids)}

    def num(value: float) -> str:
        return f"{float(value):.17g}"

    lines = ["// Double bubble exported from ska-sdp-double-bubble", "TORUS", "", "PERIODS"]
    for column in mesh.lattice.basis.T:
        lines.append(" ".join(num(x) for x in column))
    lines += ["", "VERTICES"]
    for vid, x in zip(vertex_ids, mesh.ambient_positions()[vertex_ids]):
        lines.append(f"{vertex_number[vid]} {' '.join(num(c) for c in x)}")
    lines += ["", "EDGES"]
    for eid in edge_ids:
        edge = mesh.edges[eid]
        symbols = " ".join(WRAP_SYMBOLS[w] for w in edge.wrap)
        ends = f"{vertex_number[edge.tail]} {vertex_number[edge.head]}"
        lines.append(f"{edge_number[eid]} {ends} {symbols}")
    lines += ["", "FACES"]
    for fid in facet_ids:
        facet = mesh.facets[fid]
        signed = " ".join(str(s * edge_number[e]) for e, s in zip(facet.edges, facet.signs))
        lines.append(f"{facet_number[fid]} {signed}")
    lines += ["", "BODIES"]
    for body in sorted(mesh.bodies, key=lambda b: b.region):
        faces = []
        for fid in facet_ids:
            orientation = mesh.facets[fid].orientation(body.region)
            if orientation:
                faces.append(str(orientation * facet_number[fid]))
        lines.append(f"{body.region} {' '.join(faces)} VOLUME {num(body.target)}")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as file:
        file.write("\n".join(lines) + "\n")
    logger.info("Exported Evolver datafile %s", path)
    return path
