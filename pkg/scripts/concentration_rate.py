"""Pass rate of the all-vertices degree concentration check on G(m, rho) versus a binomial-tail prediction."""
import argparse
import math

import numpy as np
from scipy.stats import binom

from plapspec.models import RngSeed, degree_concentration_check, sample_er


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=1000)
    ap.add_argument("--rho", type=float, default=0.05)
    ap.add_argument("--deltas", type=float, nargs="+", default=[0.2, 0.3, 0.4, 0.5, 0.6])
    ap.add_argument("--trials", type=int, default=50)
    args = ap.parse_args()
    m, rho = args.m, args.rho
    mu = rho * (m - 1)
    print("delta,predicted_pass,observed_pass")
    for delta in args.deltas:
        tail = (binom.cdf(math.ceil(mu * (1 - delta)) - 1, m - 1, rho)
                + binom.sf(math.floor(mu * (1 + delta)), m - 1, rho))
        observed = np.mean([degree_concentration_check(sample_er(m, rho, RngSeed(1, s)), mu, delta).ok
                            for s in range(args.trials)])
        print(f"{delta},{(1 - tail) ** m:.4f},{observed:.2f}")


if __name__ == "__main__":
    main()
