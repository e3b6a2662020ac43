"""Dam-break Riemann problem: numerical profiles of the three schemes against the exact solution."""

import argparse
from pathlib import Path

from swemac.cases import make_case, riemann_exact, riemann_waves
from swemac.diagnostics import l1_error, transition_cells
from swemac.io import cell_velocity, write_csv
from swemac.schemes import KINDS, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mesh", type=int, default=200)
    ap.add_argument("--out", type=Path, default=Path("results/riemann"))
    args = ap.parse_args()
    case = make_case("riemann", args.mesh)
    p = case.params
    w = riemann_waves(p["hl"], 0.0, p["hr"], 0.0, case.g)
    print(f"h* = {w['h_star']:.15g}  u* = {w['u_star']:.15g}  shock speed = {w['right'][1]:.6g}")
    x = case.mesh.xc
    cols = {"x": x}
    for kind in KINDS:
        res = run(case, case.config(kind))
        eh, eu = l1_error(res.state, case.exact, case.mesh)
        h = res.state.h[:, 0]
        right = x > 0.5 + 0.1 * w["u_star"]
        print(f"{kind:13s} L1(h) {eh:.3e}  L1(u) {eu:.3e}  shock cells {transition_cells(h[right], w['h_star'], p['hr'])}")
        cols[f"h_{kind}"] = h
        cols[f"u_{kind}"] = cell_velocity(res.state)[0][:, 0]
    he, ue = riemann_exact(x, case.T, p["hl"], p["hr"], g=case.g)
    cols.update(h_exact=he, u_exact=ue)
    print(f"written to {write_csv(args.out / f'profiles_{args.mesh}.csv', cols)}")


if __name__ == "__main__":
    main()
