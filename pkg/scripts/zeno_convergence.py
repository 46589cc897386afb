#!/usr/bin/env python3
"""Convergence of the Zeno product on a dense X-Y chain.

Prints, for each n, the generator defect ||(F_n - Z)E||, the Cauchy defect
||F_n - F_2n||, its a-priori bound and the fitted log-log slopes.
"""

import argparse

from zenolab.lattice import ChainGeometry, SitePureState, XYParameters, build_site_projection, build_xy_hamiltonian
from zenolab.zeno import azc_constant, cauchy_bound, cauchy_defect, generator_defect, loglog_slope


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--J", type=float, default=1.0)
    ap.add_argument("--h", type=float, default=0.5)
    ap.add_argument("--radius", type=int, default=2, help="chain is [-radius, radius]")
    ap.add_argument("--t", type=float, default=1.0)
    ap.add_argument("--n", type=int, nargs="+", default=[8, 16, 32, 64, 128])
    ap.add_argument("--amplitudes", type=complex, nargs=2, default=[1, 1], help="site state (complex, e.g. 1+0j 0+1j)")
    args = ap.parse_args()

    g = ChainGeometry(-args.radius, args.radius)
    H = build_xy_hamiltonian(XYParameters(args.J, args.h), g)
    E = build_site_projection(SitePureState.normalized(args.amplitudes), 0, g)
    C = azc_constant(H, E, args.t / min(args.n), 6).constant
    print(f"chain {g.lo}..{g.hi}, t = {args.t}, AZC constant = {C:.6f}")
    print(f"{'n':>6} {'generator':>12} {'cauchy':>12} {'bound':>12}")
    gen, cau = [], []
    for n in args.n:
        gen.append(generator_defect(H, E, args.t, n))
        cau.append(cauchy_defect(H, E, args.t, n, 2 * n))
        print(f"{n:6d} {gen[-1]:12.4e} {cau[-1]:12.4e} {cauchy_bound(C, args.t, n):12.4e}")
    if len(args.n) > 1:
        print(f"slopes: generator {loglog_slope(args.n, gen):.3f}, cauchy {loglog_slope(args.n, cau):.3f}")


if __name__ == "__main__":
    main()
