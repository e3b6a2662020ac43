"""Benchmark problems: initial data, bathymetry, exact solutions and presets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .fields import State, dual_height, sample_cells, sample_edges
from .mesh import MacMesh, build_masked, build_uniform
from .reconstruct import LimiterConfig
from .schemes import Boundary, SchemeConfig

# exact solution signature: (mesh, t) -> (h cells, u1 edges, u2 edges)
ExactFn = Callable[[MacMesh, float], tuple[np.ndarray, np.ndarray, np.ndarray]]


@dataclass
class CaseSpec:
    name: str
    mesh: MacMesh
    h0: np.ndarray
    u1_0: np.ndarray
    u2_0: np.ndarray
    z: np.ndarray
    g: float
    T: float
    dt_factor: float
    dt_length: str = "mesh_size"  # or "dx"
    exact: ExactFn | None = None
    zeta_stab: float = 0.0
    h_floor: float = 1e-8
    boundary: Boundary | None = None
    region: np.ndarray | None = None
    line: tuple[str, float] = ("y", 0.0)
    limiter: LimiterConfig = field(default_factory=LimiterConfig)
    params: dict = field(default_factory=dict)

    def initial_state(self) -> State:
        return State(self.h0.copy(), self.u1_0.copy(), self.u2_0.copy(), self.z, 0.0)

    def default_dt(self) -> float:
        length = self.mesh.mesh_size if self.dt_length == "mesh_size" else float(self.mesh.dx.min())
        return self.dt_factor * length

    def config(self, kind: str = "heun_muscl", **overrides) -> SchemeConfig:
        kw = dict(kind=kind, limiter=self.limiter, g=self.g, zeta_stab=self.zeta_stab, h_floor=self.h_floor)
        kw.update(overrides)
        return SchemeConfig(**kw)

    @property
    def error_cells(self) -> np.ndarray:
        return self.mesh.active if self.region is None else self.region

    def error_edges(self) -> tuple[np.ndarray, np.ndarray]:
        m = self.mesh
        if isinstance(self.boundary, DirichletRing):
            return m.interior1 & ~self.boundary.fixed1, m.interior2 & ~self.boundary.fixed2
        return m.interior1, m.interior2


class DirichletRing(Boundary):
    """Holds a ring of cells (and every edge touching it) at exact values.

    Used for open boundaries: the mesh is extended by one cell on each side and
    the extra layer acts as ghost cells carrying the exact solution.
    """

    def __init__(self, mesh: MacMesh, region: np.ndarray, exact_point):
        self.mesh = mesh
        self.cells = mesh.active & ~region
        rp1 = np.pad(region, ((1, 1), (0, 0)))
        rp2 = np.pad(region, ((0, 0), (1, 1)))
        self.fixed1 = ~(rp1[:-1] & rp1[1:])
        self.fixed2 = ~(rp2[:, :-1] & rp2[:, 1:])
        self.exact_point = exact_point
        X, Y = mesh.cell_centers
        self._xc = (X[self.cells], Y[self.cells])
        X1, Y1 = mesh.edge_centers1
        X2, Y2 = mesh.edge_centers2
        self._x1 = (X1[self.fixed1], Y1[self.fixed1])
        self._x2 = (X2[self.fixed2], Y2[self.fixed2])

    def apply(self, h, u1, u2, t):
        h[self.cells] = self.exact_point(*self._xc, t)[0]
        u1[self.fixed1] = np.where(self.mesh.interior1[self.fixed1], self.exact_point(*self._x1, t)[1], 0.0)
        u2[self.fixed2] = np.where(self.mesh.interior2[self.fixed2], self.exact_point(*self._x2, t)[2], 0.0)


def _sample_exact(point_fn, mesh: MacMesh, t: float):
    h = sample_cells(mesh, lambda X, Y: point_fn(X, Y, t)[0])
    u1, u2 = sample_edges(mesh, lambda X, Y: point_fn(X, Y, t)[1], lambda X, Y: point_fn(X, Y, t)[2])
    return h, u1, u2


# -- travelling vortex ------------------------------------------------------------


def vortex_profile(xi):
    """f(ξ) = 10 ξ² (1 - ξ)² on (0, 1), 0 elsewhere."""
    xi = np.asarray(xi, dtype=float)
    return np.where((xi > 0) & (xi < 1), 10.0 * xi**2 * (1.0 - xi) ** 2, 0.0)


def vortex_F(xi):
    """Antiderivative of f² vanishing at 0, constant (= 10/63) for ξ ≥ 1."""
    s = np.clip(np.asarray(xi, dtype=float), 0.0, 1.0)
    return 100.0 * (s**5 / 5 - 2 * s**6 / 3 + 6 * s**7 / 7 - s**8 / 2 + s**9 / 9)


def vortex_exact(x, y, t, c: float = 1.0, a=(1.0, 1.0), g: float = 1.0, center=(0.0, 0.0)):
    """Height and velocity of the travelling vortex at points ``(x, y)``."""
    X = np.asarray(x, float) - center[0] - a[0] * t
    Y = np.asarray(y, float) - center[1] - a[1] * t
    xi = X**2 + Y**2
    f = vortex_profile(xi)
    h = (vortex_F(xi) + c) / (2.0 * g)
    return h, -f * Y + a[0], f * X + a[1]


def vortex_case(n: int = 32, g: float = 1.0, c: float = 1.0, a=(1.0, 1.0)) -> CaseSpec:
    lo, hi = -1.2, 2.0
    d = (hi - lo) / n
    mesh = build_uniform(n + 2, n + 2, ((lo - d, hi + d), (lo - d, hi + d)))
    region = np.zeros(mesh.shape, dtype=bool)
    region[1:-1, 1:-1] = True

    def point(x, y, t):
        return vortex_exact(x, y, t, c=c, a=a, g=g)

    h0, u10, u20 = _sample_exact(point, mesh, 0.0)
    bc = DirichletRing(mesh, region, point)
    return CaseSpec(
        name="vortex", mesh=mesh, h0=h0, u1_0=u10 * mesh.interior1, u2_0=u20 * mesh.interior2,
        z=np.zeros(mesh.shape), g=g, T=0.8, dt_factor=1.0 / 8.0,
        exact=lambda m, t: _sample_exact(point, m, t), boundary=bc, region=region,
        line=("y", 0.0), params={"n": n, "c": c, "a": tuple(a), "domain": (lo, hi)},
    )


# -- 1D Riemann problem --------------------------------------------------------------


def _wave_function(h, hk, g):
    """Velocity jump across a shock (h > hk) or a rarefaction linking hk to h, and its derivative."""
    if h > hk:
        q = math.sqrt(0.5 * g * (h + hk) / (h * hk))
        dq = -0.25 * g * hk / (h * h * hk) / q  # d/dh of q
        return (h - hk) * q, q + (h - hk) * dq
    return 2.0 * (math.sqrt(g * h) - math.sqrt(g * hk)), math.sqrt(g / h)


def riemann_star(hl, ul, hr, ur, g: float = 9.81, tol: float = 1e-12, max_iter: int = 100):
    """Star-region height and velocity of the SWE Riemann problem (no dry bed)."""
    if min(hl, hr) <= 0:
        raise ValueError("dry states are not supported")
    if ur - ul >= 2.0 * (math.sqrt(g * hl) + math.sqrt(g * hr)):
        raise ValueError("data generate a dry region")

    def phi(h):
        fl, dl = _wave_function(h, hl, g)
        fr, dr = _wave_function(h, hr, g)
        return fl + fr + ur - ul, dl + dr

    # two-rarefaction estimate as a starting guess
    h = max(((math.sqrt(g * hl) + math.sqrt(g * hr)) / 2 - (ur - ul) / 4) ** 2 / g, 1e-8)
    lo, hi = 1e-14, max(hl, hr)
    while phi(hi)[0] < 0:
        hi *= 2.0
    converged = False
    for _ in range(max_iter):
        val, der = phi(h)
        if val > 0:
            hi = min(hi, h)
        else:
            lo = max(lo, h)
        step = val / der if der > 0 else math.inf
        h_new = h - step
        if not (lo < h_new < hi):
            h_new = 0.5 * (lo + hi)
        if abs(h_new - h) <= tol * max(1.0, h):
            h = h_new
            converged = True
            break
        h = h_new
    if not converged:
        raise RuntimeError("star-state iteration did not converge")
    fl, _ = _wave_function(h, hl, g)
    fr, _ = _wave_function(h, hr, g)
    return h, 0.5 * (ul + ur) + 0.5 * (fr - fl)


def riemann_waves(hl, ul, hr, ur, g: float = 9.81) -> dict:
    hs, us = riemann_star(hl, ul, hr, ur, g)
    cl, cr, cs = (math.sqrt(g * v) for v in (hl, hr, hs))
    out = {"h_star": hs, "u_star": us}
    if hs > hl:
        out["left"] = ("shock", ul - cl * math.sqrt(0.5 * (hs + hl) * hs) / hl)
    else:
        out["left"] = ("rarefaction", ul - cl, us - cs)
    if hs > hr:
        out["right"] = ("shock", ur + cr * math.sqrt(0.5 * (hs + hr) * hs) / hr)
    else:
        out["right"] = ("rarefaction", ur + cr, us + cs)
    return out


def riemann_exact(x, t, hl=1.0, hr=0.2, ul=0.0, ur=0.0, g: float = 9.81, x0: float = 0.5):
    """Self-similar exact solution ``(h, u)`` at positions ``x`` and time ``t > 0``."""
    x = np.asarray(x, dtype=float)
    if t <= 0:
        return np.where(x < x0, hl, hr).astype(float), np.where(x < x0, ul, ur).astype(float)
    w = riemann_waves(hl, ul, hr, ur, g)
    hs, us = w["h_star"], w["u_star"]
    cl, cr = math.sqrt(g * hl), math.sqrt(g * hr)
    s = (x - x0) / t
    h = np.empty_like(s)
    u = np.empty_like(s)

    left = s < us
    kind, *speeds = w["left"]
    if kind == "shock":
        outside = left & (s < speeds[0])
        star = left & ~outside
        fan = np.zeros_like(left)
    else:
        outside = left & (s < speeds[0])
        star = left & (s > speeds[1])
        fan = left & ~outside & ~star
    h[outside], u[outside] = hl, ul
    h[star], u[star] = hs, us
    c = (ul + 2 * cl - s[fan]) / 3.0
    h[fan], u[fan] = c * c / g, (ul + 2 * cl + 2 * s[fan]) / 3.0

    right = ~left
    kind, *speeds = w["right"]
    if kind == "shock":
        outside = right & (s > speeds[0])
        star = right & ~outside
        fan = np.zeros_like(right)
    else:
        outside = right & (s > speeds[0])
        star = right & (s < speeds[1])
        fan = right & ~outside & ~star
    h[outside], u[outside] = hr, ur
    h[star], u[star] = hs, us
    c = (-ur + 2 * cr + s[fan]) / 3.0
    h[fan], u[fan] = c * c / g, (ur - 2 * cr + 2 * s[fan]) / 3.0
    return h, u


def riemann_case(n: int = 200, hl: float = 1.0, hr: float = 0.2, g: float = 9.81, T: float = 0.1) -> CaseSpec:
    """Dam break on (0, 1), one cell across; upwind weights kept in [½, 1]."""
    dx = 1.0 / n
    mesh = build_uniform(n, 1, ((0.0, 1.0), (0.0, dx)))

    def exact(m, t):
        h, u = riemann_exact(m.xc, t, hl, hr, g=g)
        _, u1 = riemann_exact(m.x, t, hl, hr, g=g)
        H = np.repeat(h[:, None], m.ny, axis=1)
        U1 = np.repeat(u1[:, None], m.ny, axis=1) * m.interior1
        return H, U1, np.zeros((m.nx, m.ny + 1))

    h0 = np.where(mesh.cell_centers[0] < 0.5, hl, hr)
    return CaseSpec(
        name="riemann", mesh=mesh, h0=h0, u1_0=np.zeros((n + 1, 1)), u2_0=np.zeros((n, 2)),
        z=np.zeros(mesh.shape), g=g, T=T, dt_factor=0.1, dt_length="dx", exact=exact,
        line=("y", 0.5 * dx), limiter=LimiterConfig(entropy_safe=True),
        params={"n": n, "hl": hl, "hr": hr},
    )


# -- circular dam break ---------------------------------------------------------------


def circular_dambreak_case(n: int = 200, zeta: float = 0.1, g: float = 9.81) -> CaseSpec:
    mesh = build_uniform(n, n, ((-20.0, 20.0), (-20.0, 20.0)))
    h0 = sample_cells(mesh, lambda X, Y: np.where(X**2 + Y**2 < 2.5**2, 2.5, 0.5))
    return CaseSpec(
        name="circular-dam-break", mesh=mesh, h0=h0, u1_0=np.zeros((n + 1, n)), u2_0=np.zeros((n, n + 1)),
        z=np.zeros(mesh.shape), g=g, T=4.7, dt_factor=0.1, dt_length="dx", zeta_stab=zeta, line=("y", 0.0),
        params={"n": n},
    )


# -- partial dam break ------------------------------------------------------------------

PARTIAL_DAM_WALLS = [((95.0, 105.0), (0.0, 95.0)), ((95.0, 105.0), (170.0, 200.0))]


def partial_dambreak_case(n: int = 1000, zeta: float = 0.25, g: float = 9.81, T: float = 20.0) -> CaseSpec:
    mesh = build_masked(n, n, ((0.0, 200.0), (0.0, 200.0)), PARTIAL_DAM_WALLS)
    z = sample_cells(mesh, lambda X, Y: np.where(X <= 100.0, 0.0, 0.04 * (X - 100.0)))
    h0 = sample_cells(mesh, lambda X, Y: np.where(X <= 100.0, 10.0, 5.0 - 0.04 * (X - 100.0)))
    return CaseSpec(
        name="partial-dam-break", mesh=mesh, h0=h0, u1_0=np.zeros((n + 1, n)), u2_0=np.zeros((n, n + 1)),
        z=z, g=g, T=T, dt_factor=1.0 / 40.0, zeta_stab=zeta, line=("y", 130.0), params={"n": n},
    )


# -- paraboloid drop --------------------------------------------------------------------


@dataclass(frozen=True)
class DropParams:
    L: float = 4.0
    h0: float = 0.1
    a: float = 1.0
    eta: float = 0.5
    g: float = 9.81

    @property
    def omega(self) -> float:
        return math.sqrt(2.0 * self.g * self.h0) / self.a

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega


def drop_bathymetry(x, y, p: DropParams = DropParams()):
    X, Y = np.asarray(x) - p.L / 2, np.asarray(y) - p.L / 2
    return -p.h0 / p.a**2 * (p.a**2 - X**2 - Y**2)


def drop_exact(x, y, t, p: DropParams = DropParams(), h_floor: float = 0.0):
    """Rotating drop: ``h = max(h_floor, h̄)`` and the spatially constant velocity."""
    X, Y = np.asarray(x, float) - p.L / 2, np.asarray(y, float) - p.L / 2
    w = p.omega
    hbar = p.eta * p.h0 / p.a**2 * (2 * X * math.cos(w * t) + 2 * Y * math.sin(w * t) - p.eta) - drop_bathymetry(x, y, p)
    h = np.maximum(h_floor, hbar)
    u1 = np.full(np.shape(X), -p.eta * w * math.sin(w * t))
    u2 = np.full(np.shape(X), p.eta * w * math.cos(w * t))
    return h, u1, u2


def paraboloid_drop_case(n: int = 100, p: DropParams = DropParams(), h_floor: float = 1e-8,
                         g: float | None = None) -> CaseSpec:
    if g is not None:
        p = replace(p, g=g)
    mesh = build_uniform(n, n, ((0.0, p.L), (0.0, p.L)))
    z = sample_cells(mesh, lambda X, Y: drop_bathymetry(X, Y, p))

    def point(x, y, t):
        return drop_exact(x, y, t, p, h_floor)

    h0, u10, u20 = _sample_exact(point, mesh, 0.0)
    hd1, hd2 = dual_height(h0, mesh)
    wet1 = mesh.interior1 & (hd1 > 10 * h_floor)
    wet2 = mesh.interior2 & (hd2 > 10 * h_floor)
    return CaseSpec(
        name="drop", mesh=mesh, h0=h0, u1_0=u10 * wet1, u2_0=u20 * wet2, z=z, g=p.g,
        T=3 * p.period, dt_factor=1.0 / 16.0, exact=lambda m, t: _sample_exact(point, m, t),
        h_floor=h_floor, line=("y", p.L / 2), params={"n": n, "drop": p},
    )


# -- lake at rest ---------------------------------------------------------------------------


def lake_at_rest_case(n: int = 32, level: float = 1.0, g: float = 9.81) -> CaseSpec:
    mesh = build_uniform(n, n, ((0.0, 1.0), (0.0, 1.0)))
    z = sample_cells(mesh, lambda X, Y: 0.5 * np.exp(-30 * ((X - 0.4) ** 2 + (Y - 0.6) ** 2)) + 0.1 * X * Y)
    h0 = np.where(mesh.active, level - z, 0.0)

    def exact(m, t):
        return h0, np.zeros((m.nx + 1, m.ny)), np.zeros((m.nx, m.ny + 1))

    return CaseSpec(
        name="lake-at-rest", mesh=mesh, h0=h0, u1_0=np.zeros((n + 1, n)), u2_0=np.zeros((n, n + 1)),
        z=z, g=g, T=1.0, dt_factor=0.1, exact=exact, line=("y", 0.5), params={"n": n, "level": level},
    )


CASES = {
    "vortex": vortex_case,
    "riemann": riemann_case,
    "circular-dam-break": circular_dambreak_case,
    "partial-dam-break": partial_dambreak_case,
    "drop": paraboloid_drop_case,
    "lake-at-rest": lake_at_rest_case,
}

DEFAULT_MESH = {
    "vortex": 32,
    "riemann": 200,
    "circular-dam-break": 200,
    "partial-dam-break": 1000,
    "drop": 100,
    "lake-at-rest": 32,
}


def make_case(name: str, n: int | None = None, **kw) -> CaseSpec:
    try:
        factory = CASES[name]
    except KeyError:
        raise KeyError(f"unknown case {name!r}; available: {sorted(CASES)}") from None
    return factory(DEFAULT_MESH[name] if n is None else n, **kw)
