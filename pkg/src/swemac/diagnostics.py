"""Energy monitors, discrete identity checks, error norms and convergence orders."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import State, dual_height, make_pressure
from .mesh import MacMesh
from .operators import (
    FluxSet,
    centered_edge_height,
    div_cell,
    edge_derivative,
    stabilization_divergence,
)
from .reconstruct import LimiterConfig, reconstruct_height


@dataclass
class IdentityCheck:
    """Residual of a discrete identity and the magnitude of the terms it balances."""

    residual: float
    scale: float

    @property
    def relative(self) -> float:
        return self.residual / self.scale if self.scale > 0 else self.residual

    def holds(self, rtol: float) -> bool:
        return self.residual <= rtol * self.scale or self.residual == 0.0


@dataclass
class BalanceCheck:
    """Per-entity assembled balance ``lhs`` and closed-form remainder; the identity is ``lhs = -remainder``."""

    lhs: np.ndarray
    remainder: np.ndarray
    scale: np.ndarray
    mask: np.ndarray

    @property
    def defect(self) -> np.ndarray:
        return np.where(self.mask, np.abs(self.lhs + self.remainder), 0.0)

    @property
    def max_residual(self) -> float:
        return float(self.defect.max(initial=0.0))

    @property
    def max_relative(self) -> float:
        rel = np.divide(self.defect, self.scale, out=np.zeros_like(self.defect), where=self.scale > 0)
        return float(rel.max(initial=0.0))


@dataclass
class EnergyReport:
    kinetic_total: float
    potential_total: float
    entropy_total: float
    kinetic_residual_max: float = 0.0
    potential_residual_max: float = 0.0
    bv_time_h: float = 0.0
    bv_time_u: float = 0.0
    flooring_events: int = 0


# -- energies -----------------------------------------------------------------------


def kinetic_energy(state: State, mesh: MacMesh) -> tuple[np.ndarray, np.ndarray]:
    """(E_{k,i})_σ = ½ h_Dσ u_{i,σ}² per edge, zero off the interior edges."""
    hd1, hd2 = dual_height(state.h, mesh)
    return (np.where(mesh.interior1, 0.5 * hd1 * state.u1**2, 0.0),
            np.where(mesh.interior2, 0.5 * hd2 * state.u2**2, 0.0))


def potential_energy(state: State, mesh: MacMesh, g: float) -> np.ndarray:
    """(E_p)_K = ½ g h_K² + g h_K z_K."""
    return np.where(mesh.active, make_pressure(state.h, g) + g * state.h * state.z, 0.0)


def energy_report(state: State, mesh: MacMesh, g: float) -> EnergyReport:
    k1, k2 = kinetic_energy(state, mesh)
    kin = float((mesh.dual_area1 * k1).sum() + (mesh.dual_area2 * k2).sum())
    pot = float((mesh.cell_area * potential_energy(state, mesh, g)).sum())
    return EnergyReport(kin, pot, kin + pot, flooring_events=int(state.meta.get("floor_events", 0)))


# -- face iteration ------------------------------------------------------------------


def _dual_faces_x(par, perp, vpar, vperp):
    """Outward integrated flux and face value for the four faces of every u1 dual cell.

    Yields ``(outward_flux, face_value)`` pairs shaped ``(nx + 1, ny)``; faces
    outside the domain carry zero flux.
    """
    ny = perp.shape[1] - 1
    zero = np.zeros((1, ny))
    right = (np.concatenate([par, zero]), np.concatenate([vpar, zero]))
    left = (-np.concatenate([zero, par]), np.concatenate([zero, vpar]))
    top = (perp[:, 1:], vperp[:, 1:])
    bottom = (-perp[:, :-1], vperp[:, :-1])
    return right, left, top, bottom


def _dual_faces(flux: FluxSet, component: int, values=None):
    d = flux.dual
    if component == 1:
        vpar, vperp = values if values is not None else flux.ue1
        return _dual_faces_x(d.par1, d.perp1, vpar, vperp)
    vpar, vperp = values if values is not None else flux.ue2
    faces = _dual_faces_x(d.par2.T, d.perp2.T, vpar.T, vperp.T)
    return tuple((f.T, v.T) for f, v in faces)


def _primal_faces(q1, q2, v1, v2):
    """Outward integrated flux and face value for the four faces of every cell."""
    return ((q1[1:], v1[1:]), (-q1[:-1], v1[:-1]), (q2[:, 1:], v2[:, 1:]), (-q2[:, :-1], v2[:, :-1]))


# -- identity checks ---------------------------------------------------------------------


def kinetic_balance_residual(s_n: State, s_np1: State, flux: FluxSet, mesh: MacMesh, cfg) -> tuple[BalanceCheck, BalanceCheck]:
    """Kinetic energy balance of one segregated Euler step, per dual cell and component.

    The left-hand side is assembled term by term (time increment, convection
    flux of u², pressure and bathymetry work, plus the stabilization work when
    ``cfg.zeta_stab > 0``); the remainder uses its closed form.
    """
    dt = s_np1.t - s_n.t
    g = cfg.g
    hd_n = dual_height(s_n.h, mesh)
    hd_p = dual_height(s_np1.h, mesh)
    p_new = make_pressure(s_np1.h, g)
    dp = edge_derivative(p_new, mesh)
    dz = edge_derivative(s_np1.z, mesh)
    hc = centered_edge_height(s_np1.h, mesh)
    stab = stabilization_divergence(s_n.h, flux.u1, flux.u2, mesh, cfg.zeta_stab)
    areas = (mesh.dual_area1, mesh.dual_area2)
    interiors = (mesh.interior1, mesh.interior2)
    out = []
    for i, (un, up) in enumerate(((flux.u1, s_np1.u1), (flux.u2, s_np1.u2))):
        area = areas[i]
        ok = interiors[i] & (area > 0)
        inv = np.divide(1.0, area, out=np.zeros_like(area), where=ok)
        dE = (0.5 * hd_p[i] * up**2 - 0.5 * hd_n[i] * un**2) / dt
        conv = np.zeros_like(un)
        r2 = np.zeros_like(un)
        r3 = np.zeros_like(un)
        mag = np.zeros_like(un)
        for F, ue in _dual_faces(flux, i + 1):
            conv += F * ue**2
            r2 += F * (ue - un) ** 2
            r3 += F * (ue - un) * (up - un)
            mag += np.abs(F) * (ue**2 + un**2 + up**2)
        conv *= 0.5 * inv
        work_p = up * dp[i]
        work_z = g * hc[i] * up * dz[i]
        work_s = up * stab[i]
        lhs = dE + conv + work_p + work_z + work_s
        R = 0.5 / dt * hd_p[i] * (up - un) ** 2 - 0.5 * inv * r2 + inv * r3
        scale = (
            (0.5 * hd_p[i] * up**2 + 0.5 * hd_n[i] * un**2 + 0.5 * hd_p[i] * (up - un) ** 2) / dt
            + 2.0 * inv * mag
            + np.abs(work_p) + np.abs(work_z) + np.abs(work_s)
        )
        out.append(BalanceCheck(np.where(ok, lhs, 0.0), np.where(ok, R, 0.0), scale, ok))
    return out[0], out[1]


def potential_balance_residual(s_n: State, s_np1: State, flux: FluxSet, mesh: MacMesh, cfg) -> BalanceCheck:
    """Potential energy balance of one Euler step, per cell, against its closed-form remainder."""
    dt = s_np1.t - s_n.t
    g = cfg.g
    hn, hp, z = s_n.h, s_np1.h, s_n.z
    inv = np.divide(1.0, mesh.cell_area, out=np.zeros_like(hn), where=mesh.active)
    dEp = (potential_energy(s_np1, mesh, g) - potential_energy(s_n, mesh, g)) / dt
    len1, len2 = mesh.edge_len1, mesh.edge_len2
    V1, V2 = len1 * flux.u1, len2 * flux.u2  # |σ| u_σ·e_i
    div_p = np.zeros_like(hn)
    div_m = np.zeros_like(hn)
    div_u = np.zeros_like(hn)
    r2 = np.zeros_like(hn)
    r3 = np.zeros_like(hn)
    mag = np.zeros_like(hn)
    mag_z = np.zeros_like(hn)
    for V, hs in _primal_faces(V1, V2, flux.h1, flux.h2):
        div_p += 0.5 * g * hs**2 * V
        div_m += hs * V
        div_u += V
        r2 += (hs - hn) ** 2 * V
        r3 += (hp - hn) * hs * V
        mag += np.abs(V) * (hs**2 + hn**2 + hp**2)
        mag_z += np.abs(V * hs)
    pn = make_pressure(hn, g)
    lhs = dEp + inv * div_p + g * z * inv * div_m + pn * inv * div_u
    r = g / (2 * dt) * (hp - hn) ** 2 - 0.5 * g * inv * r2 + g * inv * r3
    scale = (
        (np.abs(potential_energy(s_np1, mesh, g)) + np.abs(potential_energy(s_n, mesh, g)) + g * (hp - hn) ** 2) / dt
        + g * inv * (mag + np.abs(z) * mag_z)
    )
    ok = mesh.active
    return BalanceCheck(np.where(ok, lhs, 0.0), np.where(ok, r, 0.0), scale, ok)


def check_div_grad_duality(h, u1, u2, xi, mesh: MacMesh, lim: LimiterConfig) -> IdentityCheck:
    """Σ_K |K| ξ_K div_K(hu) + Σ_i Σ_σ |D_σ| h_σ u_σ ∂_σ ξ, which must vanish."""
    h1, h2 = reconstruct_height(h, u1, u2, mesh, lim)
    u1 = np.where(mesh.interior1, u1, 0.0)
    u2 = np.where(mesh.interior2, u2, 0.0)
    q1, q2 = mesh.edge_len1 * h1 * u1, mesh.edge_len2 * h2 * u2
    a = mesh.cell_area * xi * div_cell(q1, q2, mesh)
    d1, d2 = edge_derivative(xi, mesh)
    b1 = mesh.dual_area1 * h1 * u1 * d1
    b2 = mesh.dual_area2 * h2 * u2 * d2
    total = a.sum() + b1.sum() + b2.sum()
    scale = np.abs(a).sum() + np.abs(b1).sum() + np.abs(b2).sum()
    return IdentityCheck(abs(float(total)), float(scale))


def check_dual_mass_balance(s_n: State, s_np1: State, flux: FluxSet, mesh: MacMesh) -> IdentityCheck:
    """max over dual cells of |(|D|/δt)(h_D^{n+1} - h_D^n) + Σ_ε |ε| F_ε·n|."""
    dt = s_np1.t - s_n.t
    hd_n = dual_height(s_n.h, mesh)
    hd_p = dual_height(s_np1.h, mesh)
    worst, scale = 0.0, 0.0
    for i, (area, inner) in enumerate(((mesh.dual_area1, mesh.interior1), (mesh.dual_area2, mesh.interior2))):
        ue = flux.ue1 if i == 0 else flux.ue2
        ones = tuple(np.ones_like(v) for v in ue)
        tot = area * (hd_p[i] - hd_n[i]) / dt
        mag = np.abs(tot)
        for F, _ in _dual_faces(flux, i + 1, ones):
            tot = tot + F
            mag = mag + np.abs(F)
        res = np.where(inner, np.abs(tot), 0.0)
        worst = max(worst, float(res.max(initial=0.0)))
        scale = max(scale, float(np.where(inner, mag, 0.0).max(initial=0.0)))
    return IdentityCheck(worst, scale)


# -- error norms -----------------------------------------------------------------------------


def l1_error(state: State, exact, mesh: MacMesh, t: float | None = None,
             cells: np.ndarray | None = None, edges: tuple[np.ndarray, np.ndarray] | None = None) -> tuple[float, float]:
    """Discrete L¹ errors ``Σ_K |K||h_K - h̄| `` and ``Σ_i Σ_σ |D_σ||u_σ - ū|``.

    ``exact(mesh, t)`` returns the exact fields sampled like the state; ``cells``
    and ``edges`` restrict the sums (default: active cells, interior edges).
    """
    t = state.t if t is None else t
    h, u1, u2 = exact(mesh, t)
    cells = mesh.active if cells is None else cells
    e1, e2 = (mesh.interior1, mesh.interior2) if edges is None else edges
    err_h = float((mesh.cell_area * np.abs(state.h - h))[cells].sum())
    err_u = float((mesh.dual_area1 * np.abs(state.u1 - u1))[e1].sum() + (mesh.dual_area2 * np.abs(state.u2 - u2))[e2].sum())
    return err_h, err_u


def convergence_order(errors) -> list[float]:
    """log(e_k / e_{k+1}) / log(δ_k / δ_{k+1}) for consecutive ``(δ_M, err)`` pairs."""
    errors = list(errors)
    if len(errors) < 2:
        raise ValueError("need at least two (mesh size, error) pairs")
    sizes = [d for d, _ in errors]
    if any(b >= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("mesh sizes must be strictly decreasing")
    return [math.log(e0 / e1) / math.log(d0 / d1) for (d0, e0), (d1, e1) in zip(errors, errors[1:])]


def bv_time_norms(trajectory: list[State], mesh: MacMesh) -> tuple[float, float]:
    """Time BV sums of h and of u (the larger of the two velocity components)."""
    if len(trajectory) < 2:
        raise ValueError("need at least two states")
    acc = BVAccumulator(mesh)
    for s in trajectory:
        acc.push(s)
    return acc.bv_h, acc.bv_u


class BVAccumulator:
    """Running time-BV sums, usable as a run observer."""

    def __init__(self, mesh: MacMesh):
        self.mesh = mesh
        self.prev: State | None = None
        self.bv_h = 0.0
        self.bv_u1 = 0.0
        self.bv_u2 = 0.0

    @property
    def bv_u(self) -> float:
        return max(self.bv_u1, self.bv_u2)

    def push(self, s: State) -> None:
        m = self.mesh
        if self.prev is not None:
            p = self.prev
            self.bv_h += float((m.cell_area * np.abs(s.h - p.h))[m.active].sum())
            self.bv_u1 += float((m.dual_area1 * np.abs(s.u1 - p.u1))[m.interior1].sum())
            self.bv_u2 += float((m.dual_area2 * np.abs(s.u2 - p.u2))[m.interior2].sum())
        self.prev = s

    def __call__(self, n, s, mesh):
        self.push(s)
        return {"bv_time_h": self.bv_h, "bv_time_u": self.bv_u}


def energy_observer(g: float):
    def observe(n, s, mesh):
        rep = energy_report(s, mesh, g)
        return {"kinetic": rep.kinetic_total, "potential": rep.potential_total, "entropy": rep.entropy_total}

    return observe


# -- case-specific monitors -------------------------------------------------------------------


def quadrant_asymmetry(h: np.ndarray) -> float:
    """Largest deviation of ``h`` from its mirror images and its transpose."""
    return float(max(np.abs(h - h[::-1]).max(), np.abs(h - h[:, ::-1]).max(), np.abs(h - h.T).max()))


def wet_centroid(h: np.ndarray, mesh: MacMesh, threshold: float) -> tuple[float, float]:
    """Mass-weighted center of the cells with ``h > threshold``."""
    wet = mesh.active & (h > threshold)
    w = mesh.cell_area * h * wet
    X, Y = mesh.cell_centers
    tot = w.sum()
    return float((w * X).sum() / tot), float((w * Y).sum() / tot)


def transition_cells(profile: np.ndarray, lo: float, hi: float, frac: float = 0.01) -> int:
    """Number of cells strictly between the two plateau levels ``lo`` and ``hi``.

    A cell counts when it differs from both plateaus by more than ``frac``
    times the jump.
    """
    tol = frac * abs(hi - lo)
    a, b = min(lo, hi), max(lo, hi)
    inside = (profile > a + tol) & (profile < b - tol)
    return int(inside.sum())
