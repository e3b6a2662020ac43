"""Randomised verification suites for the discrete identities, well-balancing and positivity.

Shared by the ``verify`` subcommand and the acceptance tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cases import PARTIAL_DAM_WALLS
from .diagnostics import (
    check_div_grad_duality,
    check_dual_mass_balance,
    kinetic_balance_residual,
    potential_balance_residual,
)
from .fields import State
from .mesh import MacMesh, build_masked, build_nonuniform, build_uniform
from .reconstruct import LimiterConfig
from .schemes import KINDS, SchemeConfig, cfl_dt, euler_step, heun_cfl_dt, heun_step, step

MESH_KINDS = ("uniform", "nonuniform", "masked")


def random_mesh(rng: np.random.Generator, kind: str, max_n: int = 64, min_n: int = 3) -> MacMesh:
    nx, ny = (int(v) for v in rng.integers(min_n, max_n + 1, size=2))
    if kind == "uniform":
        return build_uniform(nx, ny, ((0.0, float(rng.uniform(0.5, 3))), (0.0, float(rng.uniform(0.5, 3)))))
    if kind == "nonuniform":
        x = np.concatenate([[0.0], np.cumsum(rng.uniform(0.3, 1.7, nx))])
        y = np.concatenate([[0.0], np.cumsum(rng.uniform(0.3, 1.7, ny))])
        return build_nonuniform(x, y)
    if kind == "masked":
        nx, ny = max(nx, 6), max(ny, 6)
        a, b = sorted(rng.uniform(0.2, 0.8, 2))
        return build_masked(nx, ny, ((0.0, 1.0), (0.0, 1.0)), [((a, b + 0.1), (0.0, float(rng.uniform(0.3, 0.7))))])
    raise ValueError(f"unknown mesh kind {kind!r}")


def random_state(mesh: MacMesh, rng: np.random.Generator, h_range=(0.2, 2.0), u_scale: float = 1.0,
                 z_scale: float = 1.0) -> State:
    h = np.where(mesh.active, rng.uniform(*h_range, mesh.shape), 0.0)
    z = np.where(mesh.active, z_scale * rng.uniform(-1.0, 1.0, mesh.shape), 0.0)
    u1 = u_scale * rng.normal(size=(mesh.nx + 1, mesh.ny)) * mesh.interior1
    u2 = u_scale * rng.normal(size=(mesh.nx, mesh.ny + 1)) * mesh.interior2
    return State(h, u1, u2, z)


def smooth_bathymetry(mesh: MacMesh, rng: np.random.Generator, amplitude: float = 0.5) -> np.ndarray:
    """Sum of a few random Gaussian bumps, scaled to the domain."""
    X, Y = mesh.cell_centers
    Lx, Ly = mesh.x[-1] - mesh.x[0], mesh.y[-1] - mesh.y[0]
    z = np.zeros(mesh.shape)
    for _ in range(3):
        cx, cy = mesh.x[0] + rng.uniform(0, Lx), mesh.y[0] + rng.uniform(0, Ly)
        w = rng.uniform(0.1, 0.3) * min(Lx, Ly)
        z += rng.uniform(-1, 1) * np.exp(-((X - cx) ** 2 + (Y - cy) ** 2) / w**2)
    z *= amplitude / max(np.abs(z).max(), 1e-300)
    return np.where(mesh.active, z, 0.0)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    worst: dict = field(default_factory=dict)
    samples: int = 0

    def line(self) -> str:
        vals = ", ".join(f"{k}={v:.3e}" for k, v in self.worst.items())
        return f"{'PASS' if self.passed else 'FAIL'} {self.name} ({self.samples} samples) {vals}"


def identity_suite(n_states: int = 200, seed: int = 0, max_n: int = 64,
                   tol_exact: float = 1e-12, tol_balance: float = 1e-10) -> SuiteResult:
    """Div-grad duality, dual mass balance and the two energy identities on random states."""
    rng = np.random.default_rng(seed)
    worst = {"div_grad": 0.0, "dual_mass": 0.0, "kinetic": 0.0, "potential": 0.0}
    limiters = (LimiterConfig(mode="upwind"), LimiterConfig(), LimiterConfig(variant="vanleer"))
    for k in range(n_states):
        mesh = random_mesh(rng, MESH_KINDS[k % 3], max_n)
        lim = limiters[k % len(limiters)]
        cfg = SchemeConfig(kind="euler_upwind" if lim.mode == "upwind" else "euler_muscl", limiter=lim,
                           g=float(rng.uniform(0.5, 10)), zeta_stab=float(rng.choice([0.0, 0.2])), h_floor=0.0)
        s = random_state(mesh, rng)
        xi = np.where(mesh.active, rng.normal(size=mesh.shape), 0.0)
        worst["div_grad"] = max(worst["div_grad"], check_div_grad_duality(s.h, s.u1, s.u2, xi, mesh, cfg.lim).relative)
        s1 = euler_step(s, mesh, cfg, 0.5 * cfl_dt(s, mesh))
        flux = s1.meta["fluxes"][0]
        worst["dual_mass"] = max(worst["dual_mass"], check_dual_mass_balance(s, s1, flux, mesh).relative)
        k1, k2 = kinetic_balance_residual(s, s1, flux, mesh, cfg)
        worst["kinetic"] = max(worst["kinetic"], k1.max_relative, k2.max_relative)
        worst["potential"] = max(worst["potential"], potential_balance_residual(s, s1, flux, mesh, cfg).max_relative)
    ok = (worst["div_grad"] <= tol_exact and worst["dual_mass"] <= tol_exact
          and worst["kinetic"] <= tol_balance and worst["potential"] <= tol_balance)
    return SuiteResult("identities", ok, worst, n_states)


def lake_meshes(rng: np.random.Generator, n: int = 32) -> list[MacMesh]:
    return [
        build_uniform(n, n, ((0.0, 1.0), (0.0, 1.0))),
        random_mesh(rng, "nonuniform", n, n // 2),
        build_masked(n, n, ((0.0, 200.0), (0.0, 200.0)), PARTIAL_DAM_WALLS),
    ]


def lake_at_rest_suite(steps: int = 100, seed: int = 1, n: int = 32, tol: float = 1e-12) -> SuiteResult:
    rng = np.random.default_rng(seed)
    drift, umax = 0.0, 0.0
    count = 0
    for mesh in lake_meshes(rng, n):
        z = smooth_bathymetry(mesh, rng, amplitude=0.5)
        level = float(z.max()) + 1.0
        for kind in KINDS:
            cfg = SchemeConfig(kind=kind, zeta_stab=0.1)
            s = State.at_rest(mesh, level - z, z)
            dt = 0.1 * mesh.mesh_size
            for _ in range(steps):
                s = step(s, mesh, cfg, dt)
            act = mesh.active
            drift = max(drift, float(np.abs((s.h + s.z - level)[act]).max()))
            umax = max(umax, float(np.abs(s.u1).max()), float(np.abs(s.u2).max()))
            count += 1
    return SuiteResult("lake-at-rest", drift <= tol and umax <= tol, {"max_level_drift": drift, "max_velocity": umax}, count)


POSITIVITY_VARIANTS = (
    ("euler_upwind", LimiterConfig()),
    ("euler_muscl", LimiterConfig()),
    ("euler_muscl", LimiterConfig(variant="vanleer", zeta_plus=2.0, zeta_minus=2.0)),
)


def positivity_suite(n_states: int = 1000, seed: int = 2, max_n: int = 16) -> SuiteResult:
    """One step from random positive states at the full positivity CFL bound (no flooring)."""
    rng = np.random.default_rng(seed)
    hmin_euler, hmin_heun = np.inf, np.inf
    for k in range(n_states):
        mesh = random_mesh(rng, MESH_KINDS[k % 3], max_n)
        s = random_state(mesh, rng, h_range=(1e-3, 2.0), u_scale=float(rng.uniform(0.1, 5.0)), z_scale=0.0)
        kind, lim = POSITIVITY_VARIANTS[k % len(POSITIVITY_VARIANTS)]
        euler = SchemeConfig(kind=kind, limiter=lim, h_floor=0.0)
        dt = cfl_dt(s, mesh, 1.0)
        s1 = euler_step(s, mesh, euler, dt)
        hmin_euler = min(hmin_euler, float(s1.h[mesh.active].min()))
        heun = euler.with_(kind="heun_muscl")
        dt = heun_cfl_dt(s, mesh, heun, 1.0)
        s2 = heun_step(s, mesh, heun, dt)
        hmin_heun = min(hmin_heun, float(s2.h[mesh.active].min()))
    return SuiteResult("positivity", hmin_euler > 0 and hmin_heun > 0,
                       {"min_h_euler": hmin_euler, "min_h_heun": hmin_heun}, n_states)


SUITES = {
    "identities": identity_suite,
    "lake-at-rest": lake_at_rest_suite,
    "positivity": positivity_suite,
}
