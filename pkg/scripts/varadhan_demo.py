"""The variational functional L(Phi) = sup {Phi - K} + I0 on a few test functionals,
and the duality lower bound on the rate of a non-product measure."""

import argparse
import sys

import numpy as np

from pairldp.energy import BivariateAtomic, RateContext, rate_joint
from pairldp.kernel import parse_kernel
from pairldp.measure import moment
from pairldp.varadhan import (MinFunctional, SamplerSpec, SimplexGrid, clamp_x, clamp_y, constant, gaussian_bump,
                              mc_log_mgf, nonproduct_divergence, scaled, varadhan_sup)


def main(argv=None):
    ap = argparse.ArgumentParser(description="Varadhan functional demo")
    ap.add_argument("--kernel", default="gaussian:theta=0.5")
    ap.add_argument("--grid", default="-2:2:17", help="lo:hi:num; write negative values as --grid=-1:1:5")
    ap.add_argument("--mc-n", type=int, default=3)
    ap.add_argument("--samples", type=int, default=50_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    kern = parse_kernel(args.kernel)
    ctx = RateContext.from_kernel(kern)
    lo, hi, num = args.grid.split(":")
    grid = SimplexGrid(tuple(np.linspace(float(lo), float(hi), int(num))), seed=args.seed)

    functionals = {
        "0": MinFunctional([constant(0.0)]),
        "clamp_x": MinFunctional([clamp_x()]),
        "min(x, -x)": MinFunctional([clamp_x(-2, 2), scaled(clamp_x(-2, 2), -1.0)]),
        "min(x, y)": MinFunctional([clamp_x(-2, 2), clamp_y(-2, 2)]),
        "2 bump(1,1)": MinFunctional([gaussian_bump(1, 1, 0.5, 2.0)]),
    }
    print(f"kernel {kern.spec}, I0 = {ctx.I0:.6g}, {len(grid.left)} grid atoms")
    print(f"{'Phi':<14} {'L(Phi)':>9} {'mc n=' + str(args.mc_n):>10} {'stderr':>8}  argmax (m1 left, m1 right)")
    for name, f in functionals.items():
        res = varadhan_sup(kern, f, grid)
        mc = mc_log_mgf(SamplerSpec(kern), f, args.mc_n, args.samples, args.seed)
        print(f"{name:<14} {res.value + ctx.I0:>9.5f} {mc.estimate + 0.0:>10.5f} {mc.stderr:>8.1e}  "
              f"({moment(res.argmax.left, 1):+.3f}, {moment(res.argmax.right, 1):+.3f})")

    mu0 = BivariateAtomic.from_points([[0, 0], [1, 1]], [0.5, 0.5])
    clamp01 = lambda u: np.clip(u, 0.0, 1.0)  # noqa: E731
    print(f"\nmu0 = (delta_(0,0) + delta_(1,1))/2: rate_joint = {rate_joint(ctx, mu0)}")
    for r in nonproduct_divergence(ctx, mu0, clamp01, clamp01, [1, 2, 4, 8, 16, 32], grid):
        print(f"  b = {r.b:>4g}: lower bound {r.lower_bound:.4f}  (b*delta = {r.b * r.delta:.4f}, L = {r.L_phi_b:.1e})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
