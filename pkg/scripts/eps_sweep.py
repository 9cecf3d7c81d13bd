#!/usr/bin/env python3
"""Locate the empirical eps at which the component count of H_{n,eps} stops being n.

Coarse geometric scan, then bisection on the first bracket where the count
changes. Prints one CSV row per n alongside the closed-form sufficient bound
and the value of the mu-ray profile t exp(1/t^(2n)) at the largest grid radius;
with t capped below delta < 1 the lobes first touch there.
"""
import math
import argparse
import csv
import sys

import numpy as np

from leviflat import PolarGrid, count_components, eps_threshold


def transition(n, grid, delta, lo=1e-3, hi=100.0, steps=50, iters=30):
    eps = np.geomspace(lo, hi, steps)
    counts = [count_components(n, e, delta, grid) for e in eps]
    bad = [k for k, c in enumerate(counts) if c != n]
    if not bad:
        return None, counts[-1]
    k = bad[0]
    if k == 0:
        return eps[0], counts[0]
    a, b = eps[k - 1], eps[k]
    for _ in range(iters):
        m = np.sqrt(a * b)
        if count_components(n, m, delta, grid) == n:
            a = m
        else:
            b = m
    return b, count_components(n, b, delta, grid)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, nargs="+", default=list(range(1, 7)))
    p.add_argument("--res", type=int, default=800)
    p.add_argument("--delta", type=float, default=0.9)
    args = p.parse_args(argv)
    grid = PolarGrid.log_polar(args.res, args.res, delta=args.delta)
    wr = csv.writer(sys.stdout, lineterminator="\n")
    wr.writerow(["n", "eps_threshold", "mu_ray_at_t_max", "eps_transition", "count_after"])
    t_max = grid.t_values[-1]
    for n in args.n:
        eps_t, after = transition(n, grid, args.delta)
        wr.writerow([n, format(eps_threshold(n), ".6g"), format(t_max * math.exp(t_max ** (-2 * n)), ".6g"),
                     "none" if eps_t is None else format(eps_t, ".6g"), after])


if __name__ == "__main__":
    main()
