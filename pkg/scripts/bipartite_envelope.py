"""lambda_{1,p}(K_{2 x M}) against the best two-level test function and the (2/sqrt 5)^p envelope.

The two-level family puts 1 on a left vertices, -t on the other left vertices, and the
mirror image on the right side.  Its best quotient is an independent upper bound.
"""
import argparse
import math

import numpy as np

from plapspec.graph import complete_multipartite, rayleigh_quotient
from plapspec.solver import SolverOptions, lambda_estimate


def two_level_best(M, p, n_t=200):
    G = complete_multipartite(2, M)
    best = (math.inf, None, None)
    for a in range(1, M):
        for t in np.linspace(0.0, 1.0, n_t + 1)[1:]:
            x = np.r_[np.ones(a), -t * np.ones(M - a), -np.ones(a), t * np.ones(M - a)]
            q = rayleigh_quotient(G, x, p)
            if q < best[0]:
                best = (q, a, t)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=4.0)
    ap.add_argument("--M", type=int, nargs="+", default=[10, 25, 50, 100])
    ap.add_argument("--restarts", type=int, default=32)
    args = ap.parse_args()
    p = args.p
    print(f"envelope (2/sqrt5)^p = {(2 / math.sqrt(5)) ** p:.4f}; "
          f"witness value (2/sqrt5)^p + (4/5)^p = {(2 / math.sqrt(5)) ** p + 0.8 ** p:.4f}")
    print("M,solver,two_level,a,t")
    for M in args.M:
        lam = lambda_estimate(complete_multipartite(2, M), p, SolverOptions(restarts=args.restarts)).eigenvalue
        q, a, t = two_level_best(M, p)
        print(f"{M},{lam:.6f},{q:.6f},{a},{t:.3f}")


if __name__ == "__main__":
    main()
