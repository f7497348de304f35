"""Solve the two reference problems with both methods and print a summary.

    python scripts/solve_fixtures.py --N 128
"""

import argparse
import time

from csswaves.functional import make_problem
from csswaves.grid import Grid, symmetry_defect
from csswaves.model import make_model
from csswaves.operator import PotentialSpec
from csswaves.solver import SolverConfig, solve

FIXTURES = {
    "constant": (PotentialSpec("constant", omega=1.0), 1e-6),
    "well": (PotentialSpec("gaussian_well", omega=1.0, c=8.0, sigma=1.0), 1e-5),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--L", type=float, default=12.0)
    parser.add_argument("--N", type=int, default=128)
    parser.add_argument("--p", type=float, default=8.0)
    parser.add_argument("--methods", nargs="+", default=["residual_min", "mountain_pass"])
    args = parser.parse_args()

    grid = Grid(args.L, args.N)
    model = make_model("pure_power", args.p)
    for name, (potential, tol) in FIXTURES.items():
        problem = make_problem(grid, potential, model)
        print(f"{name}: ell = {problem.split.ell}, lambda_1 = {problem.split.eigenvalues[0]:.6f}")
        for method in args.methods:
            t0 = time.perf_counter()
            res = solve(problem, SolverConfig(method=method, grad_tol=tol))
            dt = time.perf_counter() - t0
            print(
                f"  {method:14s} phi = {res.phi:.10f}  residual = {res.residual:.2e}  "
                f"iters = {res.iterations:3d}  |u| = {res.norm:.4f}  "
                f"sym = {symmetry_defect(res.u):.1e}  {dt:.1f}s"
            )


if __name__ == "__main__":
    main()
