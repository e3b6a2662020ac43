"""Command line driver: ``run``, ``convergence``, ``verify`` and ``riemann-table``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .cases import riemann_exact, riemann_waves
from .diagnostics import BVAccumulator, convergence_order, energy_observer, l1_error
from .io import (
    ConfigError,
    RunConfig,
    cell_velocity,
    fmt,
    parse_config,
    write_csv,
    write_grid_snapshot,
    write_line_csv,
    write_manifest,
    write_records_csv,
)
from .schemes import SimulationAborted, run, total_mass
from .verify import SUITES

log = logging.getLogger("swemac")


class SnapshotWriter:
    """Run observer writing grid snapshots every ``every`` steps and/or every ``every_t`` time units."""

    def __init__(self, cfg: RunConfig, case, out: Path):
        self.cfg, self.case, self.out = cfg, case, out
        self.next_t = cfg.every_t
        self.count = 0

    def due(self, n: int, t: float) -> bool:
        if n == 0:
            return True
        if self.cfg.every and n % self.cfg.every == 0:
            return True
        if self.next_t is not None and t >= self.next_t - 1e-12:
            while self.next_t <= t + 1e-12:
                self.next_t += self.cfg.every_t
            return True
        return False

    def write(self, s, mesh, tag: str) -> None:
        if "vtk" in self.cfg.formats:
            write_grid_snapshot(s, mesh, self.out / f"snapshot_{tag}.vtk", title=f"swemac {self.case.name}")
        if "line" in self.cfg.formats:
            axis, value = self.case.line
            write_line_csv(s, mesh, self.out / f"line_{tag}.csv", axis, value)

    def __call__(self, n, s, mesh):
        if self.due(n, s.t):
            self.write(s, mesh, f"{n:06d}")
            self.count += 1
        return None


def _overrides(pairs: list[str]) -> dict:
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _load_config(args) -> RunConfig:
    text = Path(args.config).read_text() if getattr(args, "config", None) else ""
    over = _overrides(getattr(args, "set", None))
    for key in ("case", "scheme", "steps", "T", "output_dir"):
        val = getattr(args, key, None)
        if val is not None:
            over[key] = str(val)
    if getattr(args, "mesh", None) is not None:
        over["mesh"] = str(args.mesh)
    return parse_config(text, over)


def cmd_run(args) -> int:
    cfg = _load_config(args)
    case = cfg.build_case()
    scheme = cfg.scheme_config(case)
    out = cfg.out_dir()
    out.mkdir(parents=True, exist_ok=True)
    snap = SnapshotWriter(cfg, case, out)
    energy = energy_observer(scheme.g)
    bv = BVAccumulator(case.mesh)
    t0 = time.perf_counter()
    try:
        res = run(case, scheme, max_steps=cfg.steps, observers=[energy, bv, snap])
    except SimulationAborted as exc:
        print(f"run aborted: {exc}", file=sys.stderr)
        return 2
    wall = time.perf_counter() - t0
    state, mesh = res.state, case.mesh
    snap.write(state, mesh, "final")

    mon: dict[int, dict] = {}
    for o in res.observations:
        mon.setdefault(o["step"], {}).update(o)
    rows = []
    region = case.region if case.region is not None else mesh.active
    first = {"step": 0, "t": 0.0, "mass": total_mass(res.initial.h, mesh, region)}
    for r in [first] + res.records:
        row = dict(r)
        row.update({k: v for k, v in mon.get(r["step"], {}).items() if k not in ("step", "t")})
        rows.append(row)
    if "monitors" in cfg.formats:
        write_records_csv(out / "monitors.csv", rows)

    summary = {
        "steps": res.steps,
        "t_final": state.t,
        "wall_seconds": wall,
        "max_mass_rel_drift": max((r["mass_rel_drift"] for r in res.records), default=0.0),
        "floor_events": sum(r["floor_events"] for r in res.records),
        "bv_time_h": bv.bv_h,
        "bv_time_u": bv.bv_u,
        "min_h": float(state.h[mesh.active].min()),
        "snapshots": snap.count + 1,
    }
    if case.exact is not None:
        err_h, err_u = l1_error(state, case.exact, mesh, cells=case.error_cells, edges=case.error_edges())
        summary.update(err_h=err_h, err_u=err_u)
    if case.name == "lake-at-rest":
        level = case.params["level"]
        summary["max_level_drift"] = float(np.abs((state.h + state.z - level)[mesh.active]).max())
        summary["max_velocity"] = float(max(np.abs(state.u1).max(), np.abs(state.u2).max()))
    write_manifest(out / "manifest.json", cfg, case, scheme, summary)
    for k, v in summary.items():
        print(f"{k} = {v if isinstance(v, int) else fmt(v)}")
    print(f"output written to {out}")
    return 0


def cmd_convergence(args) -> int:
    cfg = _load_config(args)
    meshes = []
    n = args.min_mesh
    while n <= args.max_mesh:
        meshes.append(n)
        n *= 2
    rows = []
    for n in meshes:
        case = cfg.build_case(n)
        if case.exact is None:
            print(f"case {case.name!r} has no exact solution", file=sys.stderr)
            return 1
        try:
            res = run(case, cfg.scheme_config(case))
        except SimulationAborted as exc:
            print(f"mesh {n}: run aborted: {exc}", file=sys.stderr)
            return 2
        err_h, err_u = l1_error(res.state, case.exact, case.mesh, cells=case.error_cells, edges=case.error_edges())
        rows.append({"mesh": n, "delta": case.mesh.mesh_size, "err_h": err_h, "err_u": err_u})
        log.info("mesh %d: err_h=%.3e err_u=%.3e", n, err_h, err_u)
    for key in ("h", "u"):
        orders = convergence_order([(r["delta"], r[f"err_{key}"]) for r in rows]) if len(rows) > 1 else []
        rows[0][f"ord_{key}"] = ""
        for r, o in zip(rows[1:], orders):
            r[f"ord_{key}"] = o
    cols = ("mesh", "err_h", "ord_h", "err_u", "ord_u")
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join(str(r[c]) if c == "mesh" or r[c] == "" else fmt(r[c]) for c in cols))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    failed = 0
    names = args.suite or list(SUITES)
    for name in names:
        kw = {}
        if args.quick:
            kw = {"identities": {"n_states": 30, "max_n": 24}, "positivity": {"n_states": 100},
                  "lake-at-rest": {"steps": 20}}[name]
        res = SUITES[name](**kw)
        print(res.line())
        failed += not res.passed
    return 1 if failed else 0


def cmd_riemann_table(args) -> int:
    cfg = _load_config(args)
    case = cfg.build_case()
    p = case.params
    res = run(case, cfg.scheme_config(case))
    s, m = res.state, case.mesh
    he, ue = riemann_exact(m.xc, s.t, p["hl"], p["hr"], g=case.g)
    uc, _ = cell_velocity(s)
    table = {"x": m.xc, "h": s.h[:, 0], "h_exact": he, "u": uc[:, 0], "u_exact": ue}
    waves = riemann_waves(p["hl"], 0.0, p["hr"], 0.0, case.g)
    err_h, err_u = l1_error(s, case.exact, m)
    print(f"t = {fmt(s.t)}  h* = {fmt(waves['h_star'])}  u* = {fmt(waves['u_star'])}")
    print(f"L1 error: h = {fmt(err_h)}  u = {fmt(err_u)}")
    if args.out:
        write_csv(args.out, table)
        print(f"table written to {args.out}")
    else:
        print("x,h,h_exact,u,u_exact")
        for row in zip(*table.values()):
            print(",".join(fmt(v) for v in row))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="swemac", description="Staggered MAC shallow water solver")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, case_default=None):
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--case", default=case_default)
        p.add_argument("--mesh", type=int)
        p.add_argument("--scheme")
        p.add_argument("--T", type=float)
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a configuration key")

    p = sub.add_parser("run", help="single simulation with snapshots and monitors")
    common(p)
    p.add_argument("--steps", type=int)
    p.add_argument("--out", dest="output_dir")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("convergence", help="L1 errors and orders over refined meshes")
    common(p, "vortex")
    p.add_argument("--min-mesh", type=int, default=32)
    p.add_argument("--max-mesh", type=int, default=512)
    p.add_argument("--out", help="CSV output path (also printed)")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("verify", help="identity, well-balancing and positivity suites")
    p.add_argument("--suite", action="append", choices=sorted(SUITES))
    p.add_argument("--quick", action="store_true", help="fewer random samples")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("riemann-table", help="numerical vs exact profiles of the dam-break Riemann problem")
    common(p, "riemann")
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=cmd_riemann_table)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
