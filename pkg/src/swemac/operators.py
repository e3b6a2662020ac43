"""Discrete differential operators on the primal and dual meshes.

Fluxes are stored *integrated* over their edge: ``q1 = |σ| F_σ·e1`` on the
edges normal to e1, and for the dual meshes ``|ε| F_ε·n`` with ``n`` the
positive coordinate direction.  Integrated dual fluxes are assembled directly
from integrated primal ones, which keeps the dual mass balance exact next to
walls and excluded cells.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import dual_height
from .mesh import MacMesh
from .reconstruct import LimiterConfig, reconstruct_height, reconstruct_velocity


@dataclass
class DualFluxes:
    """Integrated dual mass fluxes of both dual meshes (natural orientation)."""

    par1: np.ndarray   # (nx, ny), normal e1, through cell centers
    perp1: np.ndarray  # (nx + 1, ny + 1), normal e2
    par2: np.ndarray   # (nx, ny), normal e2
    perp2: np.ndarray  # (nx + 1, ny + 1), normal e1


@dataclass
class FluxSet:
    """Mass and momentum fluxes of one explicit stage."""

    h1: np.ndarray
    h2: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    dual: DualFluxes | None = None
    ue1: tuple[np.ndarray, np.ndarray] | None = None
    ue2: tuple[np.ndarray, np.ndarray] | None = None

    @property
    def F1(self) -> np.ndarray:
        """Pointwise primal flux h_σ u_σ on the edges normal to e1."""
        return self.h1 * self.u1

    @property
    def F2(self) -> np.ndarray:
        return self.h2 * self.u2

    def momentum_fluxes(self):
        """Integrated momentum fluxes ``|ε| G_ε·n`` as ((par1, perp1), (par2, perp2))."""
        d = self.dual
        return (
            (d.par1 * self.ue1[0], d.perp1 * self.ue1[1]),
            (d.par2 * self.ue2[0], d.perp2 * self.ue2[1]),
        )


# -- primal operators -----------------------------------------------------


def div_cell(q1, q2, mesh: MacMesh) -> np.ndarray:
    """(1/|K|) Σ_σ |σ| F_σ·n_{K,σ} from integrated fluxes; zero in inactive cells."""
    div = (q1[1:] - q1[:-1]) + (q2[:, 1:] - q2[:, :-1])
    return np.where(mesh.active, div / mesh.cell_area, 0.0)


def edge_derivative_x(xi, mesh: MacMesh) -> np.ndarray:
    """(|σ|/|D_σ|)(ξ_L - ξ_K) on interior edges normal to e1, 0 elsewhere."""
    out = np.zeros((mesh.nx + 1, mesh.ny))
    inner = mesh.interior1[1:-1]
    area = mesh.dual_area1[1:-1]
    diff = (xi[1:] - xi[:-1]) * mesh.edge_len1[1:-1]
    out[1:-1] = np.divide(diff, area, out=np.zeros_like(diff), where=inner)
    return out


def edge_derivative(xi, mesh: MacMesh) -> tuple[np.ndarray, np.ndarray]:
    xi = np.asarray(xi, dtype=float)
    return edge_derivative_x(xi, mesh), edge_derivative_x(xi.T, mesh.T).T


def bathy_gradient(z_samples, mesh: MacMesh) -> tuple[np.ndarray, np.ndarray]:
    """Edge derivative of the piecewise constant bathymetry sampled at cell centers."""
    return edge_derivative(z_samples, mesh)


def centered_edge_height_x(h, mesh: MacMesh) -> np.ndarray:
    out = np.zeros((mesh.nx + 1, mesh.ny))
    out[1:-1] = 0.5 * (h[1:] + h[:-1])
    return np.where(mesh.interior1, out, 0.0)


def centered_edge_height(h, mesh: MacMesh) -> tuple[np.ndarray, np.ndarray]:
    return centered_edge_height_x(h, mesh), centered_edge_height_x(h.T, mesh.T).T


def assemble_mass_fluxes(h, u1, u2, mesh: MacMesh, lim: LimiterConfig) -> FluxSet:
    h1, h2 = reconstruct_height(h, u1, u2, mesh, lim)
    u1 = np.where(mesh.interior1, u1, 0.0)
    u2 = np.where(mesh.interior2, u2, 0.0)
    return FluxSet(h1=h1, h2=h2, u1=u1, u2=u2, q1=mesh.edge_len1 * h1 * u1, q2=mesh.edge_len2 * h2 * u2)


# -- dual operators -------------------------------------------------------


def _dual_fluxes_x(q1, q2, mesh: MacMesh) -> tuple[np.ndarray, np.ndarray]:
    par = 0.5 * (q1[:-1] + q1[1:])
    half = np.pad(0.5 * q2, ((1, 1), (0, 0)))
    perp = half[:-1] + half[1:]
    perp[:, 0] = 0.0
    perp[:, -1] = 0.0
    return par, perp


def assemble_dual_fluxes(flux: FluxSet, mesh: MacMesh) -> DualFluxes:
    """Dual mass fluxes: half-sum of the two primal fluxes of a cell (parallel
    case) or half of each of the two primal fluxes a dual edge lies on
    (perpendicular case)."""
    par1, perp1 = _dual_fluxes_x(flux.q1, flux.q2, mesh)
    par2, perp2 = _dual_fluxes_x(flux.q2.T, flux.q1.T, mesh.T)
    dual = DualFluxes(par1, perp1, par2.T, perp2.T)
    flux.dual = dual
    return dual


def _dual_divergence_x(par, perp, mesh: MacMesh) -> np.ndarray:
    """(1/|D_σ|) Σ_ε (integrated outward flux) on interior edges normal to e1."""
    parp = np.pad(par, ((1, 1), (0, 0)))
    tot = (parp[1:] - parp[:-1]) + (perp[:, 1:] - perp[:, :-1])
    area = mesh.dual_area1
    return np.divide(tot, area, out=np.zeros_like(tot), where=mesh.interior1)


def dual_divergence(pair1, pair2, mesh: MacMesh) -> tuple[np.ndarray, np.ndarray]:
    d1 = _dual_divergence_x(pair1[0], pair1[1], mesh)
    d2 = _dual_divergence_x(pair2[0].T, pair2[1].T, mesh.T).T
    return d1, d2


def assemble_fluxes(h, u1, u2, mesh: MacMesh, lim: LimiterConfig) -> FluxSet:
    """Primal mass fluxes, dual mass fluxes and dual-edge velocities in one pass."""
    flux = assemble_mass_fluxes(h, u1, u2, mesh, lim)
    dual = assemble_dual_fluxes(flux, mesh)
    flux.ue1, flux.ue2 = reconstruct_velocity(flux.u1, flux.u2, dual, mesh, lim)
    return flux


def momentum_divergence(flux: FluxSet, mesh: MacMesh) -> tuple[np.ndarray, np.ndarray]:
    """div_{D_σ}(h u_i u) for both components, from an assembled :class:`FluxSet`."""
    g1, g2 = flux.momentum_fluxes()
    return dual_divergence(g1, g2, mesh)


def _stab_fluxes_x(u1, hd1, zeta, mesh: MacMesh):
    area = mesh.dual_area1
    par_ok = (mesh.par_len1 > 0) & (area[:-1] > 0) & (area[1:] > 0)
    par = np.where(par_ok, zeta * 0.5 * (hd1[:-1] + hd1[1:]) * mesh.par_dist1 * (u1[:-1] - u1[1:]), 0.0)
    perp = np.zeros((mesh.nx + 1, mesh.ny + 1))
    if mesh.ny > 1:
        ok = (mesh.perp_len1[:, 1:-1] > 0) & (area[:, :-1] > 0) & (area[:, 1:] > 0)
        val = zeta * 0.5 * (hd1[:, :-1] + hd1[:, 1:]) * mesh.perp_dist1[:, 1:-1] * (u1[:, :-1] - u1[:, 1:])
        perp[:, 1:-1] = np.where(ok, val, 0.0)
    return par, perp


def stabilization_fluxes(h, u1, u2, mesh: MacMesh, zeta: float):
    """ζ h_ε δ_ε (u_σ - u_σ') through every dual edge joining two dual cells.

    h_ε is the mean of the two dual heights and δ_ε the distance between the
    two dual-cell centers; values are oriented along +x / +y like the dual
    mass fluxes, so the contribution is conservative.
    """
    hd1, hd2 = dual_height(h, mesh)
    s1 = _stab_fluxes_x(u1, hd1, zeta, mesh)
    p2, q2 = _stab_fluxes_x(u2.T, hd2.T, zeta, mesh.T)
    return s1, (p2.T, q2.T)


def stabilization_divergence(h, u1, u2, mesh: MacMesh, zeta: float):
    if zeta == 0.0:
        return np.zeros_like(u1), np.zeros_like(u2)
    s1, s2 = stabilization_fluxes(h, u1, u2, mesh, zeta)
    return dual_divergence(s1, s2, mesh)


def total_momentum_flux(h, u1, u2, z, mesh: MacMesh, lim: LimiterConfig, g: float, flux: FluxSet | None = None):
    """Convection plus pressure and bathymetry: div_D(h u_i u) + g h_{σ,c} ∂_σ(h + z)."""
    if flux is None:
        flux = assemble_fluxes(h, u1, u2, mesh, lim)
    c1, c2 = momentum_divergence(flux, mesh)
    p1, p2 = pressure_term(h, z, mesh, g)
    return c1 + p1, c2 + p2


def pressure_term(h, z, mesh: MacMesh, g: float):
    """g h_{σ,c} ∂_σ(h + z), which equals ∂_σ p + g h_{σ,c} ∂_σ z for p = ½ g h²."""
    hc1, hc2 = centered_edge_height(h, mesh)
    d1, d2 = edge_derivative(h + z, mesh)
    return g * hc1 * d1, g * hc2 * d2
