"""Write a potential as the raw little-endian f64 table read by ``potential.kind = custom-table``.

    python scripts/make_potential_table.py --N 128 --c 8 well128.f64
"""

import argparse

import numpy as np

from csswaves.grid import Grid
from csswaves.operator import PotentialSpec


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("output")
    parser.add_argument("--L", type=float, default=12.0)
    parser.add_argument("--N", type=int, default=128)
    parser.add_argument("--omega", type=float, default=1.0)
    parser.add_argument("--c", type=float, default=8.0)
    parser.add_argument("--sigma", type=float, default=1.0)
    args = parser.parse_args()

    grid = Grid(args.L, args.N)
    V = PotentialSpec("gaussian_well", args.omega, args.c, args.sigma).realize(grid)
    np.ascontiguousarray(V, dtype="<f8").tofile(args.output)
    print(f"wrote {V.size} values, min {V.min():.4f}, max {V.max():.4f}")


if __name__ == "__main__":
    main()
