#!/usr/bin/env python3
"""Jump residual against node count for the circle densities, with the observed order."""
import argparse
import math

import numpy as np

from leviflat import BoundaryFunction, jump_residual, make_circle

DENSITIES = {
    "z^2": lambda z: z ** 2,
    "1/z": lambda z: 1 / z,
    "exp": np.exp,
    "1/(z-1.7)": lambda z: 1 / (z - 1.7),
    "1/(z-1.1)": lambda z: 1 / (z - 1.1),
}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-nodes", type=int, default=8192)
    p.add_argument("--points", type=int, default=32)
    args = p.parse_args(argv)
    golden = (math.sqrt(5) - 1) / 2
    params = 2 * math.pi * (np.arange(args.points) + golden) / args.points
    print("density,nodes,max_residual,order")
    for name, rule in DENSITIES.items():
        prev = None
        n = 32
        while n <= args.max_nodes:
            c = make_circle(1.0, n)
            r = jump_residual(c, None, BoundaryFunction.from_rule(c, rule), params).max_residual
            order = "" if prev is None or r == 0 else format(math.log2(prev / r), ".2f")
            print(f"{name},{n},{r:.3e},{order}")
            prev, n = r, n * 2


if __name__ == "__main__":
    main()
