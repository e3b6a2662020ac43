"""Staggered (MAC) rectangular meshes.

Array layout used throughout the package (``ij`` indexing, first index along x):

* cells ``K = (i, j)``: arrays of shape ``(nx, ny)``;
* edges normal to e1 (carrying ``u1``), at ``x = x[i]``: ``(nx + 1, ny)``;
* edges normal to e2 (carrying ``u2``), at ``y = y[j]``: ``(nx, ny + 1)``.

For the first dual mesh (the one of ``u1``) there are two families of dual edges:

* *parallel* dual edges, vertical, through the center of cell ``(i, j)`` and
  separating the dual cells of edges ``(i, j)`` and ``(i + 1, j)``: ``(nx, ny)``;
* *perpendicular* dual edges, horizontal, lying at ``y = y[j]`` on the two
  horizontal primal edges of columns ``i - 1`` and ``i``, separating the dual
  cells of edges ``(i, j - 1)`` and ``(i, j)``: ``(nx + 1, ny + 1)``.

The second dual mesh is the same construction on the transposed mesh, see
:attr:`MacMesh.T`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import ndimage


Rectangle = tuple[tuple[float, float], tuple[float, float]]


class MeshError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MacMesh:
    """A MAC discretisation over a logically rectangular index space.

    Cells excluded from the domain are flagged in ``active``; edges between an
    active and an inactive cell are boundary (wall) edges.
    """

    x: np.ndarray
    y: np.ndarray
    active: np.ndarray = field(default=None)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 1 or y.ndim != 1 or x.size < 2 or y.size < 2:
            raise MeshError("coordinate arrays need at least two grid lines each")
        if np.any(np.diff(x) <= 0) or np.any(np.diff(y) <= 0):
            raise MeshError("grid coordinates must be strictly increasing")
        active = self.active
        if active is None:
            active = np.ones((x.size - 1, y.size - 1), dtype=bool)
        active = np.asarray(active, dtype=bool)
        if active.shape != (x.size - 1, y.size - 1):
            raise MeshError(f"active mask has shape {active.shape}, expected {(x.size - 1, y.size - 1)}")
        if not active.any():
            raise MeshError("mesh has no active cell")
        for name, arr in (("x", x), ("y", y), ("active", active)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    # -- primal mesh ---------------------------------------------------------

    @property
    def nx(self) -> int:
        return self.x.size - 1

    @property
    def ny(self) -> int:
        return self.y.size - 1

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @cached_property
    def dx(self) -> np.ndarray:
        return np.diff(self.x)

    @cached_property
    def dy(self) -> np.ndarray:
        return np.diff(self.y)

    @cached_property
    def xc(self) -> np.ndarray:
        return 0.5 * (self.x[:-1] + self.x[1:])

    @cached_property
    def yc(self) -> np.ndarray:
        return 0.5 * (self.y[:-1] + self.y[1:])

    @cached_property
    def cell_area(self) -> np.ndarray:
        """Geometric |K| for every cell of the index space (inactive ones included)."""
        return np.outer(self.dx, self.dy)

    @cached_property
    def active_area(self) -> np.ndarray:
        return np.where(self.active, self.cell_area, 0.0)

    @property
    def total_area(self) -> float:
        return float(self.active_area.sum())

    @cached_property
    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.xc, self.yc, indexing="ij")

    # -- edges ---------------------------------------------------------------

    @cached_property
    def _padded_active_x(self) -> np.ndarray:
        return np.pad(self.active, ((1, 1), (0, 0)), constant_values=False)

    @cached_property
    def interior1(self) -> np.ndarray:
        """Edges normal to e1 separating two active cells, ``(nx + 1, ny)``."""
        a = self._padded_active_x
        return a[:-1] & a[1:]

    @cached_property
    def interior2(self) -> np.ndarray:
        return self.T.interior1.T

    @cached_property
    def wall1(self) -> np.ndarray:
        """Edges normal to e1 touching exactly one active cell."""
        a = self._padded_active_x
        return a[:-1] ^ a[1:]

    @cached_property
    def wall2(self) -> np.ndarray:
        return self.T.wall1.T

    @cached_property
    def edge_len1(self) -> np.ndarray:
        return np.broadcast_to(self.dy, (self.nx + 1, self.ny)).copy()

    @cached_property
    def edge_len2(self) -> np.ndarray:
        return self.T.edge_len1.T

    @cached_property
    def edge_centers1(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.yc, indexing="ij")

    @cached_property
    def edge_centers2(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.xc, self.y, indexing="ij")

    # -- dual cells ----------------------------------------------------------

    @cached_property
    def half_dual1(self) -> tuple[np.ndarray, np.ndarray]:
        """``(|D_{K,σ}|, |D_{L,σ}|)`` for edges normal to e1, K the lower-x cell.

        A half that falls in an inactive cell (or outside the grid) has zero measure.
        """
        half = 0.5 * np.where(self.active, self.cell_area, 0.0)
        pad = np.pad(half, ((1, 1), (0, 0)))
        return pad[:-1], pad[1:]

    @cached_property
    def half_dual2(self) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.T.half_dual1
        return lo.T, hi.T

    @cached_property
    def dual_area1(self) -> np.ndarray:
        lo, hi = self.half_dual1
        return lo + hi

    @cached_property
    def dual_area2(self) -> np.ndarray:
        return self.T.dual_area1.T

    # -- dual edges of the first dual mesh (transpose for the second) --------

    @cached_property
    def par_len1(self) -> np.ndarray:
        """|ε| of the parallel dual edges (cell-centered), zero in inactive cells."""
        return np.where(self.active, self.dy[None, :], 0.0)

    @cached_property
    def perp_len1(self) -> np.ndarray:
        """|ε| of the perpendicular dual edges, ``(nx + 1, ny + 1)``.

        Each half lying on a horizontal primal edge τ counts only when τ is an
        interior edge; dual edges on the domain boundary get zero measure.
        """
        half = 0.5 * np.where(self.interior2, self.dx[:, None], 0.0)
        pad = np.pad(half, ((1, 1), (0, 0)))
        return pad[:-1] + pad[1:]

    @cached_property
    def par_dist1(self) -> np.ndarray:
        """Distance between the centers of the two dual cells across a parallel dual edge."""
        return np.broadcast_to(self.dx[:, None], self.shape).copy()

    @cached_property
    def perp_dist1(self) -> np.ndarray:
        d = np.zeros(self.ny + 1)
        d[1:-1] = 0.5 * (self.dy[:-1] + self.dy[1:])
        return np.broadcast_to(d, (self.nx + 1, self.ny + 1)).copy()

    @cached_property
    def par_len2(self) -> np.ndarray:
        return self.T.par_len1.T

    @cached_property
    def perp_len2(self) -> np.ndarray:
        return self.T.perp_len1.T

    @cached_property
    def par_dist2(self) -> np.ndarray:
        return self.T.par_dist1.T

    @cached_property
    def perp_dist2(self) -> np.ndarray:
        return self.T.perp_dist1.T

    def dual_edge_topology(self, orientation: int = 1) -> dict:
        """Summary of the dual edges of one dual mesh.

        ``parallel`` edges lie inside one primal cell and reference the two
        opposite primal edges of that cell; ``perpendicular`` edges lie on the
        union of two primal edges τ ∪ τ' of the other orientation.
        """
        if orientation not in (1, 2):
            raise ValueError("orientation must be 1 or 2")
        if orientation == 1:
            return {
                "parallel": {"length": self.par_len1, "dual_distance": self.par_dist1},
                "perpendicular": {"length": self.perp_len1, "dual_distance": self.perp_dist1},
            }
        return {
            "parallel": {"length": self.par_len2, "dual_distance": self.par_dist2},
            "perpendicular": {"length": self.perp_len2, "dual_distance": self.perp_dist2},
        }

    # -- size and regularity -------------------------------------------------

    @cached_property
    def cell_diameter(self) -> np.ndarray:
        return np.hypot(self.dx[:, None], self.dy[None, :])

    @cached_property
    def mesh_size(self) -> float:
        return float(self.cell_diameter[self.active].max())

    @cached_property
    def regularity(self) -> float:
        ratio = self.cell_diameter**2 / self.cell_area
        return float(ratio[self.active].max())

    # -- misc ----------------------------------------------------------------

    @cached_property
    def T(self) -> MacMesh:
        """The same mesh with the roles of x and y exchanged."""
        t = MacMesh(self.y, self.x, self.active.T)
        object.__setattr__(t, "T", self)
        return t

    @property
    def n_edges(self) -> int:
        return (self.nx + 1) * self.ny + self.nx * (self.ny + 1)

    def stats(self) -> dict:
        return {
            "nx": self.nx,
            "ny": self.ny,
            "active_cells": int(self.active.sum()),
            "mesh_size": self.mesh_size,
            "regularity": self.regularity,
            "area": self.total_area,
        }


def _check_domain(domain: Rectangle) -> tuple[float, float, float, float]:
    (x0, x1), (y0, y1) = domain
    if not (x1 > x0 and y1 > y0):
        raise MeshError(f"degenerate domain {domain}")
    return float(x0), float(x1), float(y0), float(y1)


def build_uniform(nx: int, ny: int, domain: Rectangle = ((0.0, 1.0), (0.0, 1.0))) -> MacMesh:
    if nx < 1 or ny < 1:
        raise MeshError("nx and ny must be positive")
    x0, x1, y0, y1 = _check_domain(domain)
    return MacMesh(np.linspace(x0, x1, nx + 1), np.linspace(y0, y1, ny + 1))


def build_nonuniform(x_coords, y_coords, active=None) -> MacMesh:
    return MacMesh(np.asarray(x_coords, float), np.asarray(y_coords, float), active)


def exclusion_mask(x: np.ndarray, y: np.ndarray, excluded: list[Rectangle]) -> np.ndarray:
    """True for cells whose center lies strictly inside one of the rectangles."""
    xc = 0.5 * (x[:-1] + x[1:])
    yc = 0.5 * (y[:-1] + y[1:])
    X, Y = np.meshgrid(xc, yc, indexing="ij")
    out = np.zeros(X.shape, dtype=bool)
    for (a0, a1), (b0, b1) in excluded:
        out |= (X > a0) & (X < a1) & (Y > b0) & (Y < b1)
    return out


def build_masked(nx: int, ny: int, domain: Rectangle, excluded: list[Rectangle]) -> MacMesh:
    """Uniform mesh with the cells centered inside ``excluded`` removed."""
    base = build_uniform(nx, ny, domain)
    active = ~exclusion_mask(base.x, base.y, excluded)
    _, ncomp = ndimage.label(active)
    if ncomp > 1:
        warnings.warn(f"masked domain has {ncomp} disconnected components", stacklevel=2)
    return MacMesh(base.x, base.y, active)
