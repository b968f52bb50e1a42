"""Uniform 1D finite-volume mesh with interface points aligned to cell faces.

The domain (0, L) is split by 0 or 2 interfaces into an outer region, an
inner region between the interfaces, and the interfaces themselves.  All
downstream modules rely on the interfaces sitting exactly on faces: the
diffusivity jump then never falls inside a cell.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DuplicateInterface, InterfaceNotOnFace, OutOfDomain

# Relative tolerance used to snap interface coordinates to faces and to
# classify points as lying on an interface.
SNAP_REL_TOL = 1e-9


class Region(Enum):
    INNER = "inner"
    OUTER = "outer"
    INTERFACE = "interface"


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Uniform mesh on (0, length) with n_cells cells.

    interface_faces holds strictly increasing face indices.  The mesh itself
    is pure geometry and admits any interface count; the diffusivity profile
    and the solvers require either none (homogeneous) or exactly two, which
    then delimit the inner region.
    """

    length: float
    n_cells: int
    interface_faces: tuple[int, ...]
    dx: float = field(init=False)
    face_positions: np.ndarray = field(init=False, repr=False)
    cell_centers: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not np.isfinite(self.length) or self.length <= 0.0:
            raise ValueError(f"length must be positive and finite, got {self.length}")
        if self.n_cells < 2:
            raise ValueError(f"n_cells must be >= 2, got {self.n_cells}")
        for idx in self.interface_faces:
            if not (0 < idx < self.n_cells):
                raise ValueError(f"interface face {idx} is not strictly interior")
        if any(b <= a for a, b in zip(self.interface_faces,
                                      self.interface_faces[1:])):
            raise ValueError("interface faces must be strictly increasing")

        dx = self.length / self.n_cells
        faces = np.linspace(0.0, self.length, self.n_cells + 1)
        centers = 0.5 * (faces[:-1] + faces[1:])
        faces.setflags(write=False)
        centers.setflags(write=False)
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "face_positions", faces)
        object.__setattr__(self, "cell_centers", centers)

    @property
    def has_interfaces(self) -> bool:
        """True for the two-interface inner-interval geometry."""
        return len(self.interface_faces) == 2

    @property
    def interface_positions(self) -> tuple[float, ...]:
        return tuple(self.face_positions[i] for i in self.interface_faces)

    def require_supported_interfaces(self) -> None:
        if len(self.interface_faces) not in (0, 2):
            raise ValueError(
                f"expected 0 or 2 interfaces, got {len(self.interface_faces)}"
            )


def build_grid(length: float, n_cells: int, interfaces: list[float]) -> Grid1D:
    """Build a uniform grid, snapping each interface to its nearest face.

    Raises InterfaceNotOnFace when an interface is farther than
    SNAP_REL_TOL * length from every face, and DuplicateInterface when two
    interfaces snap to the same face.
    """
    if length <= 0.0:
        raise ValueError(f"length must be positive, got {length}")
    if n_cells < 2:
        raise ValueError(f"n_cells must be >= 2, got {n_cells}")
    dx = length / n_cells
    tol = SNAP_REL_TOL * length

    face_indices: list[int] = []
    for x in interfaces:
        if not (0.0 < x < length):
            raise ValueError(f"interface {x} must lie strictly inside (0, {length})")
        idx = int(round(x / dx))
        if abs(x - idx * dx) > tol:
            raise InterfaceNotOnFace(
                f"interface {x} is {abs(x - idx * dx):.3e} from the nearest face "
                f"(tolerance {tol:.3e})"
            )
        if idx in face_indices:
            raise DuplicateInterface(f"interfaces snap to the same face index {idx}")
        face_indices.append(idx)

    face_indices.sort()
    return Grid1D(length=float(length), n_cells=int(n_cells),
                  interface_faces=tuple(face_indices))


def region_of(grid: Grid1D, x: float) -> Region:
    """Classify a coordinate as INNER, OUTER, or INTERFACE.

    Points within SNAP_REL_TOL * length of an interface count as INTERFACE;
    grids without interfaces classify everything as OUTER.
    """
    if not (0.0 <= x <= grid.length):
        raise OutOfDomain(f"x={x} outside [0, {grid.length}]")
    grid.require_supported_interfaces()
    if not grid.has_interfaces:
        return Region.OUTER
    tol = SNAP_REL_TOL * grid.length
    left, right = grid.interface_positions
    if abs(x - left) <= tol or abs(x - right) <= tol:
        return Region.INTERFACE
    if left < x < right:
        return Region.INNER
    return Region.OUTER


def inner_cell_range(grid: Grid1D) -> tuple[int, int]:
    """Half-open cell index range [start, stop) of the inner region."""
    grid.require_supported_interfaces()
    if not grid.has_interfaces:
        raise ValueError("grid has no interfaces, hence no inner region")
    return grid.interface_faces[0], grid.interface_faces[1]


def outer_cell_mask(grid: Grid1D) -> np.ndarray:
    """Boolean mask over cells whose centers lie in the outer region."""
    grid.require_supported_interfaces()
    mask = np.ones(grid.n_cells, dtype=bool)
    if grid.has_interfaces:
        start, stop = inner_cell_range(grid)
        mask[start:stop] = False
    return mask
