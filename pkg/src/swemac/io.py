"""Run configuration files, grid snapshots, line extracts, monitors and manifests."""

from __future__ import annotations

import csv
import json
import os
import platform
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .cases import DEFAULT_MESH, CASES, CaseSpec, make_case
from .fields import State
from .mesh import MacMesh
from .reconstruct import LimiterConfig
from .schemes import KINDS, CflDt, FixedDt, SchemeConfig

OUTDIR_ENV = "SWEMAC_OUTDIR"
FORMATS = ("vtk", "line", "monitors")


def fmt(v) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(v), ".17g")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class RunConfig:
    case: str
    mesh: list[int] = field(default_factory=list)
    scheme: str = "heun_muscl"
    limiter: str = "muscl"
    variant: str = "calif"
    zeta_plus: float = 1.0
    zeta_minus: float = 1.0
    entropy_safe: bool | None = None
    g: float | None = None
    zeta_stab: float | None = None
    h_floor: float | None = None
    T: float | None = None
    dt: float | None = None
    cfl: float | None = None
    steps: int | None = None
    every: int = 0
    every_t: float | None = None
    output_dir: str | None = None
    formats: tuple[str, ...] = FORMATS

    def __post_init__(self):
        if self.case not in CASES:
            raise ConfigError(f"unknown case {self.case!r}; available: {', '.join(sorted(CASES))}")
        if not self.mesh:
            self.mesh = [DEFAULT_MESH[self.case]]
        if any(n <= 0 for n in self.mesh):
            raise ConfigError("mesh resolutions must be positive")
        if self.scheme not in KINDS:
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.every < 0 or (self.every_t is not None and self.every_t <= 0):
            raise ConfigError("output cadence must be positive")
        if self.steps is not None and self.steps <= 0:
            raise ConfigError("steps must be positive")
        bad = set(self.formats) - set(FORMATS)
        if bad:
            raise ConfigError(f"unknown output formats {sorted(bad)}")

    def build_case(self, n: int | None = None) -> CaseSpec:
        kw = {"g": self.g} if self.g is not None else {}
        case = make_case(self.case, self.mesh[0] if n is None else n, **kw)
        if self.T is not None:
            case.T = self.T
        return case

    def scheme_config(self, case: CaseSpec) -> SchemeConfig:
        lim = LimiterConfig(
            mode=self.limiter,
            zeta_plus=self.zeta_plus,
            zeta_minus=self.zeta_minus,
            entropy_safe=case.limiter.entropy_safe if self.entropy_safe is None else self.entropy_safe,
            variant=self.variant,
        )
        over = {"limiter": lim}
        for key in ("g", "zeta_stab", "h_floor"):
            if getattr(self, key) is not None:
                over[key] = getattr(self, key)
        if self.dt is not None:
            over["dt_policy"] = FixedDt(self.dt)
        elif self.cfl is not None:
            over["dt_policy"] = CflDt(self.cfl)
        return case.config(self.scheme, **over)

    def out_dir(self, n: int | None = None) -> Path:
        env = os.environ.get(OUTDIR_ENV)
        base = Path(env) if env else Path(self.output_dir or "runs")
        if env or self.output_dir is None:
            base = base / f"{self.case}-{self.mesh[0] if n is None else n}-{self.scheme}"
        return base

    def to_dict(self) -> dict:
        d = asdict(self)
        d["formats"] = list(self.formats)
        return d


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_ints(text: str) -> list[int]:
    return [int(v) for v in text.replace(",", " ").split()]


def _parse_formats(text: str) -> tuple[str, ...]:
    return tuple(v for v in text.replace(",", " ").split())


_PARSERS = {
    "case": str,
    "mesh": _parse_ints,
    "scheme": str,
    "limiter": str,
    "variant": str,
    "zeta_plus": float,
    "zeta_minus": float,
    "entropy_safe": _parse_bool,
    "g": float,
    "zeta_stab": float,
    "h_floor": float,
    "T": float,
    "dt": float,
    "cfl": float,
    "steps": int,
    "every": int,
    "every_t": float,
    "output_dir": str,
    "formats": _parse_formats,
}
assert set(_PARSERS) == {f.name for f in fields(RunConfig)}


def parse_config(text: str, overrides: dict | None = None) -> RunConfig:
    """Parse flat ``key = value`` lines; ``#`` starts a comment.

    Errors name the offending line.  ``overrides`` (already-typed values or
    strings) win over the file.
    """
    values: dict = {}
    lines: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}", lineno) from None
        lines[key] = lineno
    for key, value in (overrides or {}).items():
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r}")
        values[key] = _PARSERS[key](value) if isinstance(value, str) else value
    if "case" not in values:
        raise ConfigError("missing case")
    try:
        return RunConfig(**values)
    except ConfigError as exc:
        if exc.line is None and "case" in lines and "case" in str(exc):
            raise ConfigError(str(exc), lines["case"]) from None
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# -- snapshots -------------------------------------------------------------------------


def cell_velocity(state: State) -> tuple[np.ndarray, np.ndarray]:
    """Mean of the two opposite edge values per component (visualisation only)."""
    return 0.5 * (state.u1[:-1] + state.u1[1:]), 0.5 * (state.u2[:, :-1] + state.u2[:, 1:])


def _cell_order(a: np.ndarray) -> np.ndarray:
    # VTK cell data runs x fastest
    return np.asarray(a).T.ravel()


def write_grid_snapshot(state: State, mesh: MacMesh, path, title: str = "swemac snapshot") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    uc1, uc2 = cell_velocity(state)
    out = [
        "# vtk DataFile Version 3.0",
        f"{title} t={fmt(state.t)}",
        "ASCII",
        "DATASET RECTILINEAR_GRID",
        f"DIMENSIONS {mesh.nx + 1} {mesh.ny + 1} 1",
        f"X_COORDINATES {mesh.nx + 1} double",
        *map(fmt, mesh.x),
        f"Y_COORDINATES {mesh.ny + 1} double",
        *map(fmt, mesh.y),
        "Z_COORDINATES 1 double",
        fmt(0.0),
        f"CELL_DATA {mesh.nx * mesh.ny}",
        "SCALARS h double 1",
        "LOOKUP_TABLE default",
        *map(fmt, _cell_order(state.h)),
        "SCALARS h_plus_z double 1",
        "LOOKUP_TABLE default",
        *map(fmt, _cell_order(state.h + state.z)),
        "VECTORS velocity double",
        *(f"{fmt(a)} {fmt(b)} {fmt(0.0)}" for a, b in zip(_cell_order(uc1), _cell_order(uc2))),
    ]
    path.write_text("\n".join(out) + "\n")
    return path


def read_grid_snapshot(path) -> dict:
    """Parse a file written by :func:`write_grid_snapshot` back into arrays."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# vtk DataFile"):
        raise ValueError(f"{path}: not a legacy VTK file")
    t = float(lines[1].rsplit("t=", 1)[1]) if "t=" in lines[1] else None
    pos = 4
    out: dict = {"title": lines[1], "t": t}

    def take(n):
        nonlocal pos
        vals = lines[pos : pos + n]
        pos += n
        return vals

    nxp, nyp, _ = (int(v) for v in lines[pos].split()[1:4])
    pos += 1
    for key, n in (("x", nxp), ("y", nyp), ("z", 1)):
        header = take(1)[0].split()
        if int(header[1]) != n:
            raise ValueError(f"{path}: coordinate count mismatch")
        out[key] = np.array([float(v) for v in take(n)])
    nx, ny = nxp - 1, nyp - 1
    ncell = int(take(1)[0].split()[1])
    if ncell != nx * ny:
        raise ValueError(f"{path}: CELL_DATA count mismatch")
    while pos < len(lines):
        header = take(1)[0].split()
        if header[0] == "SCALARS":
            take(1)
            vals = np.array([float(v) for v in take(ncell)])
            out[header[1]] = vals.reshape(ny, nx).T
        elif header[0] == "VECTORS":
            vals = np.array([[float(c) for c in v.split()] for v in take(ncell)])
            out[header[1]] = (vals[:, 0].reshape(ny, nx).T, vals[:, 1].reshape(ny, nx).T)
        else:
            raise ValueError(f"{path}: unexpected section {header[0]!r}")
    return out


def line_index(mesh: MacMesh, axis: str, value: float) -> int:
    """Index of the cell row (``axis='y'``) or column (``axis='x'``) closest to the line."""
    centers = mesh.yc if axis == "y" else mesh.xc
    return int(np.argmin(np.abs(centers - value)))


def line_extract(state: State, mesh: MacMesh, axis: str, value: float) -> dict:
    """Cell values along the line ``axis = value`` (nearest row/column of cells)."""
    k = line_index(mesh, axis, value)
    uc1, uc2 = cell_velocity(state)
    if axis == "y":
        return {"x": mesh.xc, "h": state.h[:, k], "u1": uc1[:, k], "u2": uc2[:, k]}
    return {"y": mesh.yc, "h": state.h[k], "u1": uc1[k], "u2": uc2[k]}


def write_csv(path, columns: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    keys = list(columns)
    rows = zip(*(np.asarray(columns[k]).ravel() for k in keys))
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(keys)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_line_csv(state: State, mesh: MacMesh, path, axis: str, value: float) -> Path:
    return write_csv(path, line_extract(state, mesh, axis, value))


def write_records_csv(path, records: list[dict]) -> Path:
    """Monitor rows in a stable column order; integers stay integers."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    keys: list[str] = []
    for r in records:
        keys.extend(k for k in r if k not in keys)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(keys)
        for r in records:
            w.writerow(["" if k not in r else (str(r[k]) if isinstance(r[k], (int, np.integer)) else fmt(r[k])) for k in keys])
    return path


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if hasattr(v, "__dataclass_fields__"):
        return _jsonable(asdict(v))
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v


def write_manifest(path, cfg: RunConfig, case: CaseSpec, scheme: SchemeConfig, summary: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "config": cfg.to_dict(),
        "case": {"name": case.name, "T": case.T, "default_dt": case.default_dt(), "params": case.params},
        "scheme": scheme,
        "mesh": case.mesh.stats(),
        "numpy": np.__version__,
        "python": platform.python_version(),
        "summary": summary,
    }
    path.write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n")
    return path
