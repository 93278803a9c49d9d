"""Run an experiment config and print its per-cell summary."""
import argparse
import sys

from plapspec.experiments import ExperimentConfig, run_experiment, summary_to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("config")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--resume", action="store_true")
    args = ap.parse_args()
    cfg = ExperimentConfig.load(args.config)
    res = run_experiment(cfg, threads=args.threads, resume=args.resume)
    sys.stdout.write(summary_to_csv(res.summary, cfg))
    return 0 if res.all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
