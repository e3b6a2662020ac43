"""Discrete unknowns: cell heights, staggered velocities and dual-cell heights."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .mesh import MacMesh


@dataclass
class State:
    """Scheme unknowns at one time level.

    ``h`` and ``z`` are cell arrays ``(nx, ny)``; ``u1`` lives on the edges
    normal to e1 ``(nx + 1, ny)`` and ``u2`` on those normal to e2 ``(nx, ny + 1)``.
    Values in inactive cells and on boundary edges are kept at zero.
    """

    h: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    z: np.ndarray = None
    t: float = 0.0
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=float)
        self.u1 = np.asarray(self.u1, dtype=float)
        self.u2 = np.asarray(self.u2, dtype=float)
        if self.z is None:
            self.z = np.zeros_like(self.h)
        self.z = np.asarray(self.z, dtype=float)
        nx, ny = self.h.shape
        if self.u1.shape != (nx + 1, ny) or self.u2.shape != (nx, ny + 1) or self.z.shape != (nx, ny):
            raise ValueError("inconsistent field shapes")

    def copy(self) -> State:
        return replace(
            self, h=self.h.copy(), u1=self.u1.copy(), u2=self.u2.copy(), z=self.z, meta=dict(self.meta)
        )

    @classmethod
    def at_rest(cls, mesh: MacMesh, h, z=None, t: float = 0.0) -> State:
        h = np.where(mesh.active, np.broadcast_to(h, mesh.shape), 0.0)
        z = None if z is None else np.where(mesh.active, np.broadcast_to(z, mesh.shape), 0.0)
        return cls(h, np.zeros((mesh.nx + 1, mesh.ny)), np.zeros((mesh.nx, mesh.ny + 1)), z, t)

    def all_finite(self) -> bool:
        return bool(np.isfinite(self.h).all() and np.isfinite(self.u1).all() and np.isfinite(self.u2).all())


def make_pressure(h: np.ndarray, g: float) -> np.ndarray:
    return 0.5 * g * np.asarray(h) ** 2


def dual_height_x(h: np.ndarray, mesh: MacMesh) -> np.ndarray:
    """Dual-cell heights for the edges normal to e1.

    Area-weighted average of the two adjacent cells; a boundary edge takes the
    value of its only active cell, an edge with no active neighbour gets 0.
    """
    lo, hi = mesh.half_dual1
    hp = np.pad(h, ((1, 1), (0, 0)))
    area = lo + hi
    num = lo * hp[:-1] + hi * hp[1:]
    return np.divide(num, area, out=np.zeros_like(num), where=area > 0)


def dual_height(h: np.ndarray, mesh: MacMesh) -> tuple[np.ndarray, np.ndarray]:
    return dual_height_x(h, mesh), dual_height_x(h.T, mesh.T).T


def zero_walls(mesh: MacMesh, u1: np.ndarray, u2: np.ndarray) -> None:
    """Impose the impermeability condition in place."""
    u1[~mesh.interior1] = 0.0
    u2[~mesh.interior2] = 0.0


def sample_cells(mesh: MacMesh, func) -> np.ndarray:
    X, Y = mesh.cell_centers
    return np.where(mesh.active, func(X, Y), 0.0)


def sample_edges(mesh: MacMesh, f1, f2) -> tuple[np.ndarray, np.ndarray]:
    """Point values of the two velocity components at the edge mass centers (all edges)."""
    X1, Y1 = mesh.edge_centers1
    X2, Y2 = mesh.edge_centers2
    return np.asarray(f1(X1, Y1), float) * np.ones_like(X1), np.asarray(f2(X2, Y2), float) * np.ones_like(X2)

