"""Grid-refinement table for the gauge discretisation.

Prints, per N, the relative error of |A|(1) for u = exp(-|x|^2/2) with and
without the near-origin kernel correction, and the Coulomb and curl residuals.

    python scripts/convergence_study.py --L 12 --sizes 64 128 256
"""

import argparse

from csswaves.checks import radial_gauge_error
from csswaves.gauge import compute_gauge, gauge_residuals
from csswaves.grid import Grid, gaussian, l2_norm


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--L", type=float, default=12.0)
    parser.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256])
    args = parser.parse_args()

    print(f"{'N':>5} {'|A|(1) corr':>12} {'|A|(1) raw':>12} {'coulomb':>10} {'curl':>10}")
    prev = None
    for n in args.sizes:
        grid = Grid(args.L, n)
        gs = compute_gauge(grid, grid.restrict(gaussian(grid)))
        res = gauge_residuals(grid, gs)
        scale = l2_norm(grid, gs.rho)
        row = (
            radial_gauge_error(grid),
            radial_gauge_error(grid, corrected=False),
            res["coulomb"] / scale,
            res["curl"] / scale,
        )
        print(f"{n:>5} " + " ".join(f"{v:12.3e}" if i < 2 else f"{v:10.3e}" for i, v in enumerate(row)))
        if prev is not None:
            print("      ratios " + " ".join(f"{a / b:8.2f}" for a, b in zip(prev, row)))
        prev = row


if __name__ == "__main__":
    main()
