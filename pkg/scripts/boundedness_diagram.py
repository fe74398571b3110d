#!/usr/bin/env python3
"""Long-time boundedness diagram under uniformly bounded constant forcing.

Classifies |A^alpha u(t)| and |A^alpha u'(t)| over t in [1, 1e4] for a grid
of (sigma, alpha) cells and writes diagram.csv, the machine-readable version
of the boundedness region pictures.
"""

import argparse

from dataclasses import replace

from fracdamp.config import ExperimentConfig
from fracdamp.harness import run


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out-diagram")
    ap.add_argument("--modes", type=int, default=48)
    ap.add_argument("--sigmas", type=float, nargs="+", default=[0.25, 0.5, 1.0, 1.5, 2.0])
    ap.add_argument("--alphas", type=float, nargs="+",
                    default=[0.25, 0.5, 0.75, 0.9, 1.0, 1.25, 1.5, 1.9])
    args = ap.parse_args()

    cfg = ExperimentConfig(
        kind="diagram",
        modes=args.modes,
        sigmas=tuple(args.sigmas),
        alpha_grid=tuple(args.alphas),
        t_start=1.0,
        t_stop=1e4,
        t_points=25,
        t_scale="log",
        out_dir=args.out,
    ).validate()
    for path in run(cfg):
        print(path)


if __name__ == "__main__":
    main()
