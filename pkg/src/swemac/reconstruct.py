"""Interface values for the mass and momentum convection fluxes.

Heights on primal edges and velocities on dual edges are either taken from the
upwind side or obtained with a limited (MUSCL-like) interpolation.  In every
mode the interface value is a convex combination of the two neighbour values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import MacMesh

MODES = ("upwind", "muscl")
VARIANTS = ("calif", "vanleer")


@dataclass(frozen=True)
class LimiterConfig:
    """Choice of interface reconstruction.

    ``variant="calif"`` limits heights with
    ``h_σ - h_K = ½ minmod(2 (ĥ_σ - h_K), 2 (h_K - h_J))`` (ĥ_σ the linear
    interpolation at the edge) and velocities with the two-slope minmod;
    ``variant="vanleer"`` uses the three-argument Van Leer procedure with
    parameters ``zeta_plus``/``zeta_minus`` for both.  ``entropy_safe`` caps the
    correction at half the jump, i.e. the upwind weight stays in [½, 1].
    """

    mode: str = "muscl"
    zeta_plus: float = 1.0
    zeta_minus: float = 1.0
    entropy_safe: bool = False
    variant: str = "calif"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown limiter mode {self.mode!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown limiter variant {self.variant!r}")
        for zeta in (self.zeta_plus, self.zeta_minus):
            if not 0.0 <= zeta <= 2.0:
                raise ValueError("limiter parameters must lie in [0, 2]")


UPWIND = LimiterConfig(mode="upwind")


def minmod(*args):
    """sgn(a) min(|a|, |b|, ...) when all arguments share a sign, 0 otherwise."""
    a = np.stack(np.broadcast_arrays(*[np.asarray(v, dtype=float) for v in args]))
    s = np.sign(a[0])
    same = np.all(np.sign(a) == s, axis=0) & (s != 0)
    return np.where(same, s * np.abs(a).min(axis=0), 0.0)


def minmod3(a: float, b: float, c: float) -> float:
    return float(minmod(a, b, c))


def _shifted(arr: np.ndarray, fill) -> tuple[np.ndarray, np.ndarray]:
    """Values two cells back / forward of each interface (k - 1 and k + 2)."""
    pad = np.concatenate([np.full((1,) + arr.shape[1:], fill, dtype=arr.dtype), arr,
                          np.full((1,) + arr.shape[1:], fill, dtype=arr.dtype)])
    n = arr.shape[0]
    return pad[: n - 1], pad[3 : n + 2]


def interface_values(q, ok, pos, ipos, flow, lim: LimiterConfig, kind: str) -> np.ndarray:
    """Interface values along axis 0.

    ``q`` holds ``n`` control-volume values with centers ``pos``; interface
    ``k`` sits at ``ipos[k]`` between volumes ``k`` and ``k + 1`` and ``flow[k]``
    is positive when the flux goes from ``k`` to ``k + 1``.  ``ok`` flags the
    volumes that may take part in a limited stencil; where the far upwind
    volume is missing the value falls back to first-order upwind.
    """
    q = np.asarray(q, dtype=float)
    flow = np.asarray(flow, dtype=float)
    qa, qb = q[:-1], q[1:]
    fwd = flow > 0
    bwd = flow < 0
    up = np.where(fwd, qa, qb)
    dn = np.where(fwd, qb, qa)
    value = np.where(fwd | bwd, up, 0.5 * (qa + qb))
    if lim.mode == "upwind":
        return value

    q_back, q_fwd = _shifted(q, 0.0)
    ok_back, ok_fwd = _shifted(np.asarray(ok, dtype=bool), False)
    far = np.where(fwd, q_back, q_fwd)
    ok_a, ok_b = ok[:-1], ok[1:]
    valid = (fwd & ok_back | bwd & ok_fwd) & ok_a & ok_b

    p = np.asarray(pos, dtype=float)
    ip = np.asarray(ipos, dtype=float)
    extra = (1,) * (q.ndim - 1)
    pp = np.concatenate([[p[0] - 1.0], p, [p[-1] + 1.0]])
    n = p.size
    # distances, broadcast over the trailing axes
    d_up_if = np.where(fwd, (ip - p[:-1]).reshape(-1, *extra), (p[1:] - ip).reshape(-1, *extra))
    d_up_dn = (p[1:] - p[:-1]).reshape(-1, *extra)
    d_far_up = np.where(fwd, (p[:-1] - pp[: n - 1]).reshape(-1, *extra), (pp[3 : n + 2] - p[1:]).reshape(-1, *extra))

    jump = dn - up
    back = up - far
    if kind == "calif":
        interp = up + jump * (d_up_if / d_up_dn)
        args = [2.0 * (interp - up), 2.0 * back]
        if lim.entropy_safe:
            args.append(jump)
        corr = 0.5 * minmod(*args)
    elif kind == "two_slope":
        args = [d_up_if * jump / d_up_dn, d_up_if * back / d_far_up]
        if lim.entropy_safe:
            args.append(0.5 * jump)
        corr = minmod(*args)
    elif kind == "vanleer":
        args = [0.5 * (dn - far), lim.zeta_plus * jump, lim.zeta_minus * back]
        if lim.entropy_safe:
            args.append(jump)
        corr = 0.5 * minmod(*args)
    else:
        raise ValueError(f"unknown reconstruction kind {kind!r}")
    return np.where(valid, value + corr, value)


def _height_kind(lim: LimiterConfig) -> str:
    return "vanleer" if lim.variant == "vanleer" else "calif"


def _velocity_kind(lim: LimiterConfig) -> str:
    return "vanleer" if lim.variant == "vanleer" else "two_slope"


def reconstruct_height_x(h, u1, mesh: MacMesh, lim: LimiterConfig) -> np.ndarray:
    """Heights on the edges normal to e1, ``(nx + 1, ny)``; boundary entries copy the adjacent cell."""
    out = np.zeros((mesh.nx + 1, mesh.ny))
    if mesh.nx > 1:
        out[1:-1] = interface_values(h, mesh.active, mesh.xc, mesh.x[1:-1], u1[1:-1], lim, _height_kind(lim))
    out[0] = h[0]
    out[-1] = h[-1]
    return out


def reconstruct_height(h, u1, u2, mesh: MacMesh, lim: LimiterConfig) -> tuple[np.ndarray, np.ndarray]:
    return (
        reconstruct_height_x(h, u1, mesh, lim),
        reconstruct_height_x(h.T, u2.T, mesh.T, lim).T,
    )


def reconstruct_velocity_x(u1, par_flux, perp_flux, mesh: MacMesh, lim: LimiterConfig):
    """Values of ``u1`` on the dual edges of the first dual mesh.

    ``par_flux`` ``(nx, ny)`` and ``perp_flux`` ``(nx + 1, ny + 1)`` are the
    dual mass fluxes, positive along +x and +y respectively.
    """
    kind = _velocity_kind(lim)
    ok = mesh.interior1
    ue_par = interface_values(u1, ok, mesh.x, mesh.xc, par_flux, lim, kind)
    ue_perp = np.zeros((mesh.nx + 1, mesh.ny + 1))
    if mesh.ny > 1:
        ue_perp[:, 1:-1] = interface_values(
            u1.T, ok.T, mesh.yc, mesh.y[1:-1], perp_flux[:, 1:-1].T, lim, kind
        ).T
    return ue_par, ue_perp


def reconstruct_velocity(u1, u2, dual, mesh: MacMesh, lim: LimiterConfig):
    """Dual-edge velocities for both components.

    ``dual`` is a :class:`~swemac.operators.DualFluxes`; returns
    ``((u1_par, u1_perp), (u2_par, u2_perp))`` in natural orientation.
    """
    first = reconstruct_velocity_x(u1, dual.par1, dual.perp1, mesh, lim)
    par2, perp2 = reconstruct_velocity_x(u2.T, dual.par2.T, dual.perp2.T, mesh.T, lim)
    return first, (par2.T, perp2.T)
