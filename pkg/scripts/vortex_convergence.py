"""L1 errors and orders for the travelling vortex, one table per scheme.

    python3 scripts/vortex_convergence.py --g 9.81 --max-mesh 256 --out results/vortex
"""

import argparse
from pathlib import Path

from swemac.cases import make_case
from swemac.diagnostics import convergence_order, l1_error
from swemac.io import write_csv
from swemac.schemes import KINDS, run


def table(kind, meshes, g):
    rows = []
    for n in meshes:
        case = make_case("vortex", n, g=g)
        res = run(case, case.config(kind))
        eh, eu = l1_error(res.state, case.exact, case.mesh, cells=case.error_cells, edges=case.error_edges())
        rows.append((n, case.mesh.mesh_size, eh, eu))
    oh = [float("nan")] + convergence_order([(r[1], r[2]) for r in rows])
    ou = [float("nan")] + convergence_order([(r[1], r[3]) for r in rows])
    return {"mesh": [r[0] for r in rows], "err_h": [r[2] for r in rows], "ord_h": oh,
            "err_u": [r[3] for r in rows], "ord_u": ou}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--g", type=float, default=1.0)
    ap.add_argument("--min-mesh", type=int, default=32)
    ap.add_argument("--max-mesh", type=int, default=256)
    ap.add_argument("--scheme", choices=KINDS, action="append")
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()
    meshes = []
    n = args.min_mesh
    while n <= args.max_mesh:
        meshes.append(n)
        n *= 2
    for kind in args.scheme or KINDS:
        t = table(kind, meshes, args.g)
        print(f"\n{kind}  (g = {args.g})")
        print(f"{'mesh':>6} {'err_h':>10} {'ord_h':>6} {'err_u':>10} {'ord_u':>6}")
        for row in zip(*t.values()):
            print(f"{row[0]:>6} {row[1]:10.3e} {row[2]:6.2f} {row[3]:10.3e} {row[4]:6.2f}")
        if args.out:
            write_csv(args.out / f"{kind}_g{args.g:g}.csv", t)


if __name__ == "__main__":
    main()
