"""Staggered (MAC) finite-volume schemes for the 2D shallow water equations."""

from .cases import CASES, CaseSpec, make_case
from .diagnostics import convergence_order, l1_error
from .fields import State, dual_height, make_pressure
from .io import RunConfig, parse_config, read_grid_snapshot, write_grid_snapshot
from .mesh import MacMesh, build_masked, build_nonuniform, build_uniform
from .reconstruct import LimiterConfig, minmod, minmod3
from .schemes import CflDt, FixedDt, SchemeConfig, cfl_dt, euler_step, heun_step, run, step

__all__ = [
    "CASES",
    "CaseSpec",
    "CflDt",
    "RunConfig",
    "FixedDt",
    "LimiterConfig",
    "MacMesh",
    "SchemeConfig",
    "State",
    "build_masked",
    "build_nonuniform",
    "build_uniform",
    "convergence_order",
    "cfl_dt",
    "dual_height",
    "euler_step",
    "heun_step",
    "l1_error",
    "make_case",
    "make_pressure",
    "minmod",
    "minmod3",
    "parse_config",
    "read_grid_snapshot",
    "run",
    "step",
    "write_grid_snapshot",
]
