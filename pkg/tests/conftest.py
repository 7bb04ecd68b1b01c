"""Shared fixtures: small meshes built from the candidate catalogue."""

import pytest

from ska_sdp_double_bubble.catalog.candidates import CandidateKind, CandidateSpec, build
from ska_sdp_double_bubble.geometry.lattice import make_lattice

THIRD = 1.0 / 3.0


@pytest.fixture(name="cubic")
def fixture_cubic():
    """The unit cubic torus."""
    return make_lattice("cubic", [1.0])


@pytest.fixture(name="slab")
def fixture_slab(cubic):
    """Three flat walls splitting the unit torus into equal thirds."""
    return build(CandidateSpec(CandidateKind.DOUBLE_SLAB, cubic, THIRD, THIRD))


@pytest.fixture(scope="module", name="sdb_template")
def fixture_sdb_template():
    """A small unequal standard double bubble, shared read-only."""
    lattice = make_lattice("cubic", [1.0])
    return build(CandidateSpec(CandidateKind.SDB, lattice, 0.02, 0.01))


@pytest.fixture(name="sdb")
def fixture_sdb(sdb_template):
    """A private copy of the standard double bubble."""
    return sdb_template.copy()


CATALOG_VOLUMES = {
    CandidateKind.SDB: (0.02, 0.01),
    CandidateKind.DELAUNAY_CHAIN: (0.05, 0.04),
    CandidateKind.CYLINDER_LENS: (0.1, 0.02),
    CandidateKind.CYLINDER_CROSS: (0.02, 0.02),
    CandidateKind.DOUBLE_CYLINDER: (0.05, 0.03),
    CandidateKind.SLAB_LENS: (0.3, 0.02),
    CandidateKind.CENTER_BUBBLE: (0.3, 0.05),
    CandidateKind.CYLINDER_STRING: (0.15, 0.15),
    CandidateKind.SLAB_CYLINDER: (0.3, 0.05),
    CandidateKind.DOUBLE_SLAB: (THIRD, THIRD),
}


@pytest.fixture(scope="session", name="catalog")
def fixture_catalog():
    """One built mesh per candidate kind, shared read-only."""
    cubic = make_lattice("cubic", [1.0])
    meshes = {
        kind: build(CandidateSpec(kind, cubic, v1, v2))
        for kind, (v1, v2) in CATALOG_VOLUMES.items()
    }
    rhombic = make_lattice("rhombic", (1.0, 0.8))
    third = rhombic.det / 3.0
    meshes[CandidateKind.HEXAGONAL_HONEYCOMB] = build(
        CandidateSpec(CandidateKind.HEXAGONAL_HONEYCOMB, rhombic, third, third)
    )
    return meshes
