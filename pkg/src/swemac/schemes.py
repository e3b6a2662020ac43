"""Time stepping: segregated forward Euler, Heun, and the run driver."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .fields import State, dual_height
from .mesh import MacMesh
from .operators import (
    FluxSet,
    assemble_fluxes,
    div_cell,
    momentum_divergence,
    pressure_term,
    stabilization_divergence,
)
from .reconstruct import UPWIND, LimiterConfig

log = logging.getLogger(__name__)

KINDS = ("euler_upwind", "euler_muscl", "heun_muscl")

#: dual heights at or below ``DRY_FACTOR * h_floor`` get a zero velocity
DRY_FACTOR = 10.0


class SchemeError(RuntimeError):
    pass


class SimulationAborted(RuntimeError):
    def __init__(self, step: int, message: str):
        super().__init__(f"step {step}: {message}")
        self.step = step


@dataclass(frozen=True)
class FixedDt:
    dt: float

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("fixed time step must be positive")


@dataclass(frozen=True)
class CflDt:
    """δt from the positivity CFL at ``fraction`` of its bound, capped by ``dt_max``."""

    fraction: float = 0.5
    dt_max: float = math.inf

    def __post_init__(self):
        if not 0 < self.fraction <= 1:
            raise ValueError("CFL fraction must lie in (0, 1]")


@dataclass(frozen=True)
class SchemeConfig:
    kind: str = "heun_muscl"
    limiter: LimiterConfig = field(default_factory=LimiterConfig)
    g: float = 9.81
    zeta_stab: float = 0.0
    h_floor: float = 1e-8
    dt_policy: FixedDt | CflDt | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown scheme {self.kind!r}, expected one of {KINDS}")
        if not self.g > 0:
            raise ValueError("g must be positive")
        if self.zeta_stab < 0 or self.h_floor < 0:
            raise ValueError("zeta_stab and h_floor must be nonnegative")

    @property
    def lim(self) -> LimiterConfig:
        return UPWIND if self.kind == "euler_upwind" else self.limiter

    def with_(self, **kw) -> SchemeConfig:
        return replace(self, **kw)


@dataclass
class StageResult:
    h: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    flux: FluxSet
    mom1: np.ndarray
    mom2: np.ndarray
    floor_events: int = 0
    floor_mass: float = 0.0


class Boundary:
    """Boundary hook called after every stage; the default is the wall condition (no-op)."""

    def apply(self, h, u1, u2, t: float) -> None:
        return None


WALLS = Boundary()


def apply_floor(h: np.ndarray, mesh: MacMesh, h_floor: float) -> tuple[np.ndarray, int, float]:
    low = mesh.active & (h < h_floor)
    n = int(low.sum())
    if not n:
        return h, 0, 0.0
    added = float((mesh.cell_area[low] * (h_floor - h[low])).sum())
    out = h.copy()
    out[low] = h_floor
    return out, n, added


def recover_velocity(mom: np.ndarray, hd: np.ndarray, interior: np.ndarray, h_floor: float) -> np.ndarray:
    bad = interior & ~(hd >= 0)
    if bad.any():
        raise SchemeError(f"non-positive dual height on {int(bad.sum())} interior edges")
    wet = interior & (hd > DRY_FACTOR * h_floor)
    return np.divide(mom, hd, out=np.zeros_like(mom), where=wet)


def explicit_stage(h, u1, u2, z, mesh: MacMesh, cfg: SchemeConfig, dt: float, segregated: bool) -> StageResult:
    """One forward Euler stage: mass update, then momentum update.

    ``segregated=True`` evaluates the pressure/bathymetry term with the updated
    height (segregated Euler scheme); ``False`` uses the old one (Heun stages).
    """
    flux = assemble_fluxes(h, u1, u2, mesh, cfg.lim)
    h_raw = np.where(mesh.active, h - dt * div_cell(flux.q1, flux.q2, mesh), 0.0)
    h_new, nfloor, fmass = apply_floor(h_raw, mesh, cfg.h_floor)

    hd1, hd2 = dual_height(h, mesh)
    hn1, hn2 = dual_height(h_new, mesh)
    c1, c2 = momentum_divergence(flux, mesh)
    p1, p2 = pressure_term(h_new if segregated else h, z, mesh, cfg.g)
    s1, s2 = stabilization_divergence(h, flux.u1, flux.u2, mesh, cfg.zeta_stab)
    m1 = np.where(mesh.interior1, hd1 * flux.u1 - dt * (c1 + p1 + s1), 0.0)
    m2 = np.where(mesh.interior2, hd2 * flux.u2 - dt * (c2 + p2 + s2), 0.0)
    v1 = recover_velocity(m1, hn1, mesh.interior1, cfg.h_floor)
    v2 = recover_velocity(m2, hn2, mesh.interior2, cfg.h_floor)
    return StageResult(h_new, v1, v2, flux, hn1 * v1, hn2 * v2, nfloor, fmass)


def _finish(state: State, h, u1, u2, dt, meta) -> State:
    return State(h, u1, u2, state.z, state.t + dt, meta)


def euler_step(state: State, mesh: MacMesh, cfg: SchemeConfig, dt: float | None = None,
               bc: Boundary = WALLS) -> State:
    """Segregated forward Euler step (upwind or MUSCL fluxes per ``cfg``)."""
    dt = resolve_dt(state, mesh, cfg, dt)
    st = explicit_stage(state.h, state.u1, state.u2, state.z, mesh, cfg, dt, segregated=True)
    h, u1, u2 = st.h, st.u1, st.u2
    bc.apply(h, u1, u2, state.t + dt)
    meta = {
        "dt": dt,
        "fluxes": [st.flux],
        "q_eff": (st.flux.q1, st.flux.q2),
        "floor_events": st.floor_events,
        "floor_mass": st.floor_mass,
    }
    return _finish(state, h, u1, u2, dt, meta)


def heun_predictor(state: State, mesh: MacMesh, cfg: SchemeConfig, dt: float, bc: Boundary = WALLS) -> StageResult:
    st = explicit_stage(state.h, state.u1, state.u2, state.z, mesh, cfg, dt, segregated=False)
    bc.apply(st.h, st.u1, st.u2, state.t + dt)
    return st


def heun_step(state: State, mesh: MacMesh, cfg: SchemeConfig, dt: float | None = None,
              bc: Boundary = WALLS) -> State:
    """Heun (RK2) step: two explicit stages, then averaging of heights and momenta."""
    dt = resolve_dt(state, mesh, cfg, dt)
    pred = heun_predictor(state, mesh, cfg, dt, bc)
    corr = explicit_stage(pred.h, pred.u1, pred.u2, state.z, mesh, cfg, dt, segregated=False)
    h_avg = np.where(mesh.active, 0.5 * (state.h + corr.h), 0.0)
    h, nfloor, fmass = apply_floor(h_avg, mesh, cfg.h_floor)
    hd1, hd2 = dual_height(state.h, mesh)
    hn1, hn2 = dual_height(h, mesh)
    m1 = 0.5 * (hd1 * state.u1 + corr.mom1)
    m2 = 0.5 * (hd2 * state.u2 + corr.mom2)
    u1 = recover_velocity(np.where(mesh.interior1, m1, 0.0), hn1, mesh.interior1, cfg.h_floor)
    u2 = recover_velocity(np.where(mesh.interior2, m2, 0.0), hn2, mesh.interior2, cfg.h_floor)
    bc.apply(h, u1, u2, state.t + dt)
    meta = {
        "dt": dt,
        "fluxes": [pred.flux, corr.flux],
        "q_eff": (0.5 * (pred.flux.q1 + corr.flux.q1), 0.5 * (pred.flux.q2 + corr.flux.q2)),
        "floor_events": pred.floor_events + corr.floor_events + nfloor,
        "floor_mass": 0.5 * (pred.floor_mass + corr.floor_mass) + fmass,
        "predictor": pred,
    }
    return _finish(state, h, u1, u2, dt, meta)


def step(state: State, mesh: MacMesh, cfg: SchemeConfig, dt: float | None = None, bc: Boundary = WALLS) -> State:
    if cfg.kind == "heun_muscl":
        return heun_step(state, mesh, cfg, dt, bc)
    return euler_step(state, mesh, cfg, dt, bc)


# -- time step selection ----------------------------------------------------


def _flux_budget(u1, u2, mesh: MacMesh) -> np.ndarray:
    """Σ_σ |σ| |u_σ·n_{K,σ}| per cell, counting interior edges only."""
    a1 = np.abs(np.where(mesh.interior1, u1, 0.0)) * mesh.edge_len1
    a2 = np.abs(np.where(mesh.interior2, u2, 0.0)) * mesh.edge_len2
    return a1[:-1] + a1[1:] + a2[:, :-1] + a2[:, 1:]


def cfl_dt(state: State, mesh: MacMesh, fraction: float = 1.0) -> float:
    """Largest δt with 2 δt Σ_σ |σ| |u_σ·n| ≤ fraction |K| in every active cell (inf if u ≡ 0)."""
    budget = _flux_budget(state.u1, state.u2, mesh)
    moving = mesh.active & (budget > 0)
    if not moving.any():
        return math.inf
    return float((fraction * mesh.cell_area[moving] / (2.0 * budget[moving])).min())


def cfl_satisfied(u1, u2, mesh: MacMesh, dt: float) -> bool:
    budget = _flux_budget(u1, u2, mesh)
    return bool(np.all(2.0 * dt * budget[mesh.active] <= mesh.cell_area[mesh.active]))


def heun_cfl_dt(state: State, mesh: MacMesh, cfg: SchemeConfig, fraction: float = 1.0,
                bc: Boundary = WALLS, max_iter: int = 50) -> float:
    """δt satisfying the positivity CFL for both the current and the predicted velocities."""
    dt = cfl_dt(state, mesh, fraction)
    if not math.isfinite(dt):
        return dt
    for _ in range(max_iter):
        pred = heun_predictor(state, mesh, cfg, dt, bc)
        if cfl_satisfied(pred.u1, pred.u2, mesh, dt):
            return dt
        dt = min(0.5 * dt, cfl_dt(State(pred.h, pred.u1, pred.u2, state.z), mesh, fraction))
    raise SchemeError("could not satisfy the predictor CFL condition")


def resolve_dt(state: State, mesh: MacMesh, cfg: SchemeConfig, dt: float | None) -> float:
    if dt is not None:
        return float(dt)
    pol = cfg.dt_policy
    if isinstance(pol, FixedDt):
        return pol.dt
    if isinstance(pol, CflDt):
        return min(cfl_dt(state, mesh, pol.fraction), pol.dt_max)
    raise SchemeError("no time step given and no dt_policy configured")


# -- run driver ---------------------------------------------------------------


def total_mass(h: np.ndarray, mesh: MacMesh, region: np.ndarray | None = None) -> float:
    mask = mesh.active if region is None else region & mesh.active
    return float((mesh.cell_area[mask] * h[mask]).sum())


def boundary_outflow(q1, q2, region: np.ndarray) -> float:
    """Net integrated mass flux leaving ``region`` through its boundary edges."""
    r1 = np.pad(region, ((1, 1), (0, 0))).astype(float)
    r2 = np.pad(region, ((0, 0), (1, 1))).astype(float)
    return float((q1 * (r1[:-1] - r1[1:])).sum() + (q2 * (r2[:, :-1] - r2[:, 1:])).sum())


Observer = Callable[[int, State, MacMesh], dict | None]


@dataclass
class RunResult:
    state: State
    steps: int
    records: list[dict]
    observations: list[dict]
    initial: State


def run(case, cfg: SchemeConfig, T: float | None = None, observers: list[Observer] | None = None,
        every: int = 1, max_steps: int | None = None, dt: float | None = None) -> RunResult:
    """Advance ``case`` (a :class:`~swemac.cases.CaseSpec`) to time ``T``.

    The time step comes from ``dt``, else ``cfg.dt_policy``, else the case
    default; the last step is clipped to land on ``T``.  Each record holds the
    per-step mass budget; observers are called every ``every`` steps and at
    the end.
    """
    T = case.T if T is None else T
    if not T > 0:
        raise ValueError("final time must be positive")
    mesh = case.mesh
    bc = case.boundary or WALLS
    region = case.region if case.region is not None else mesh.active
    state = case.initial_state()
    initial = state.copy()
    observers = observers or []
    records: list[dict] = []
    observations: list[dict] = []

    def observe(n, s):
        for obs in observers:
            out = obs(n, s, mesh)
            if out is not None:
                observations.append({"step": n, "t": s.t, **out})

    observe(0, state)
    n = 0
    eps = 1e-12 * T
    while state.t < T - eps:
        if max_steps is not None and n >= max_steps:
            break
        if dt is not None:
            dt_n = dt
        elif cfg.dt_policy is not None:
            dt_n = resolve_dt(state, mesh, cfg, None)
        else:
            dt_n = case.default_dt()
        dt_n = min(dt_n, T - state.t)
        m0 = total_mass(state.h, mesh, region)
        try:
            # blow-ups are reported below through the finiteness check
            with np.errstate(over="ignore", invalid="ignore"):
                new = step(state, mesh, cfg, dt_n, bc)
        except SchemeError as exc:
            raise SimulationAborted(n, str(exc)) from exc
        n += 1
        if T - new.t <= eps:
            new.t = T
        if not new.all_finite():
            raise SimulationAborted(n, "non-finite values in the solution")
        m1 = total_mass(new.h, mesh, region)
        q1, q2 = new.meta["q_eff"]
        outflow = boundary_outflow(q1, q2, region & mesh.active)
        defect = m1 - m0 - new.meta["floor_mass"] + dt_n * outflow
        records.append({
            "step": n,
            "t": new.t,
            "dt": dt_n,
            "mass": m1,
            "mass_defect": defect,
            "mass_rel_drift": abs(defect) / abs(m0) if m0 else abs(defect),
            "floor_events": new.meta["floor_events"],
            "floor_mass": new.meta["floor_mass"],
        })
        if new.meta["floor_events"]:
            log.debug("step %d: %d flooring events", n, new.meta["floor_events"])
        state = new
        if every and n % every == 0:
            observe(n, state)
    if not observations or observations[-1]["step"] != n:
        observe(n, state)
    return RunResult(state, n, records, observations, initial)
