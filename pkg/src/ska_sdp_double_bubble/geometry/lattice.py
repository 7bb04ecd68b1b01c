"""Flat three-torus geometry.

Points are stored in lattice coordinates ``u`` (the fundamental domain is the unit
cube); ambient positions are ``basis @ u``. Edges crossing the domain boundary carry an
integer wrap vector.
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ska_sdp_double_bubble.utilities.errors import InvalidParameterError

logger = logging.getLogger(__name__)

# Offsets of the 27 nearest images.
IMAGE_OFFSETS = np.array(list(itertools.product((-1, 0, 1), repeat=3)), dtype=np.int64)


class LatticeKind(str, Enum):
    """Supported torus shapes."""

    CUBIC = "cubic"
    RECTANGULAR = "rect"
    RHOMBIC = "rhombic"


@dataclass(frozen=True, eq=False)
class Lattice:
    """A flat torus: the columns of ``basis`` are the period vectors."""

    kind: LatticeKind
    params: tuple[float, ...]
    basis: np.ndarray = field(repr=False, compare=False)

    @property
    def det(self) -> float:
        """Volume of the fundamental domain."""
        return float(np.linalg.det(self.basis))

    @property
    def inverse(self) -> np.ndarray:
        """Map from ambient to lattice coordinates."""
        return np.linalg.inv(self.basis)

    @property
    def periods(self) -> np.ndarray:
        """Lengths of the three period vectors."""
        return np.linalg.norm(self.basis, axis=0)

    @property
    def shortest_period(self) -> float:
        """Length of the shortest period vector."""
        return float(self.periods.min())

    @property
    def widths(self) -> np.ndarray:
        """Spacing of the lattice planes u_j = const, for each j."""
        return 1.0 / np.linalg.norm(self.inverse, axis=1)

    @property
    def is_rectangular(self) -> bool:
        """True when the basis is diagonal."""
        return self.kind in (LatticeKind.CUBIC, LatticeKind.RECTANGULAR)

    def face_area(self, axis: int) -> float:
        """Area of the lattice face spanned by the two periods other than ``axis``."""
        other = [a for a in range(3) if a != axis]
        return float(np.linalg.norm(np.cross(self.basis[:, other[0]], self.basis[:, other[1]])))

    def to_ambient(self, u: np.ndarray) -> np.ndarray:
        """Lattice coordinates (..., 3) to ambient positions."""
        return np.asarray(u, dtype=float) @ self.basis.T

    def to_lattice(self, x: np.ndarray) -> np.ndarray:
        """Ambient positions (..., 3) to lattice coordinates."""
        return np.asarray(x, dtype=float) @ self.inverse.T

    def to_dict(self) -> dict:
        """Mesh-file header representation."""
        return {
            "kind": self.kind.value,
            "params": [float(p) for p in self.params],
            "basis": self.basis.tolist(),
        }

    def __eq__(self, other) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.params == other.params
            and np.array_equal(self.basis, other.basis)
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.params))


def make_lattice(kind: LatticeKind | str, params) -> Lattice:
    """
    Build a lattice of the given kind.

    Args:
        kind: ``cubic`` (L), ``rect`` (a, b, c) or ``rhombic`` (side s, height h).
        params: the lengths, all strictly positive.

    Returns:
        Lattice: the torus.

    Raises:
        InvalidParameterError: if a length is not positive or the count is wrong.
    """
    kind = LatticeKind(kind)
    params = tuple(float(p) for p in np.atleast_1d(params))
    expected = {LatticeKind.CUBIC: 1, LatticeKind.RECTANGULAR: 3, LatticeKind.RHOMBIC: 2}[kind]
    if len(params) != expected:
        raise InvalidParameterError(
            f"{kind.value} lattice takes {expected} parameter(s), got {len(params)}"
        )
    if not all(np.isfinite(p) and p > 0 for p in params):
        raise InvalidParameterError(f"Lattice lengths must be positive, got {params}")

    if kind is LatticeKind.CUBIC:
        basis = params[0] * np.eye(3)
    elif kind is LatticeKind.RECTANGULAR:
        basis = np.diag(params)
    else:
        side, height = params
        basis = np.array(
            [
                [side, side / 2, 0.0],
                [0.0, side * np.sqrt(3) / 2, 0.0],
                [0.0, 0.0, height],
            ]
        )
    return Lattice(kind=kind, params=params, basis=basis)


def canonicalize(u) -> tuple[np.ndarray, np.ndarray]:
    """Split lattice coordinates into a representative in [0, 1)³ and an integer shift.

    Works on a single 3-vector or on an (n, 3) array.
    """
    u = np.asarray(u, dtype=float)
    shift = np.floor(u)
    rep = u - shift
    # Rounding can push u - floor(u) up to exactly 1.0.
    wrapped = rep >= 1.0
    rep = np.where(wrapped, rep - 1.0, rep)
    shift = shift + wrapped
    return rep, shift.astype(np.int64)


def displacement(lattice: Lattice, tail_u, head_u, wrap) -> np.ndarray:
    """Unwrapped edge vector ``basis @ (head - tail + wrap)``."""
    delta = np.asarray(head_u, dtype=float) - np.asarray(tail_u, dtype=float)
    return (delta + np.asarray(wrap, dtype=float)) @ lattice.basis.T


def min_image_distance(lattice: Lattice, p, q) -> float:
    """Shortest distance between two points over the 27 nearest images."""
    delta = np.asarray(q, dtype=float) - np.asarray(p, dtype=float)
    images = (delta[None, :] + IMAGE_OFFSETS) @ lattice.basis.T
    return float(np.sqrt(np.min(np.einsum("ij,ij->i", images, images))))
