"""Duplicate and triple edges in link classes as the relator density exponent varies.

rho = m^e / m^2.  Prints per (m, e): mean relator count, mean triple pairs per class,
fraction of trials whose duplicates form a matching, and the mean lambda_{1,2} of the link.
"""
import argparse

import numpy as np

from plapspec.models import RngSeed
from plapspec.presentations import build_link_graph, link_structure_report, sample_triangular
from plapspec.solver import lambda_exact_p2


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, nargs="+", default=[100, 300])
    ap.add_argument("--exponents", type=float, nargs="+", default=[0.1, 0.2, 0.3, 0.6])
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    print("m,e,relators,triple_pairs_per_class,matching_fraction,lambda2")
    for i, m in enumerate(args.m):
        for j, e in enumerate(args.exponents):
            rels, triples, matching, lams = [], [], [], []
            for t in range(args.trials):
                rs = RngSeed(args.seed, (i * 100 + j) * 1000 + t)
                P = sample_triangular(m, ("binomial", m ** e / m ** 2), rs)
                L = build_link_graph(P)
                rep = link_structure_report(L).values()
                rels.append(len(P.relators))
                triples.append(np.mean([s.triple_pairs for s in rep]))
                matching.append(all(s.duplicates_form_matching for s in rep))
                lams.append(lambda_exact_p2(L.base))
            print(f"{m},{e},{np.mean(rels):.0f},{np.mean(triples):.2f},{np.mean(matching):.2f},{np.mean(lams):.4f}")


if __name__ == "__main__":
    main()
