#!/usr/bin/env python3
"""Convergence of the short-pulse values to their blow-up limit constants.

For a grid of damping exponents the rescaled pulse responses
lam^sigma0 |u(tau)| and lam^sigma1 |u'(tau)| are tabulated along a dyadic
eigenvalue sweep next to the frozen limit constants c0, c1; the relative
deviations shrink with lam at the regime-specific rate.
"""

import argparse

from fracdamp.charpoly import DampingParams
from fracdamp.counterexamples import blowup_triple, blowup_values
from fracdamp.harness import write_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="blowup_constants.csv")
    ap.add_argument("--sigmas", type=float, nargs="+", default=[0.25, 0.4, 0.5, 0.6, 0.75])
    ap.add_argument("--delta", type=float, default=1.0)
    ap.add_argument("--lam-max-exp", type=int, default=10, help="sweep lam = 10^2 .. 10^max")
    args = ap.parse_args()

    rows = []
    for sig in args.sigmas:
        p = DampingParams(sig, args.delta)
        tr = blowup_triple(p)
        for j in range(2, args.lam_max_exp + 1):
            lam = 10.0**j
            v0, v1 = blowup_values(p, tr, lam)
            rows.append(
                (sig, args.delta, lam, tr.kind, tr.c0, v0, abs(v0 - tr.c0) / tr.c0,
                 tr.c1, v1, abs(v1 - tr.c1) / tr.c1)
            )
    path = write_csv(
        args.out,
        ["sigma", "delta", "lambda", "pulse_kind", "c0", "value0", "rel0", "c1", "value1", "rel1"],
        rows,
    )
    print(path)


if __name__ == "__main__":
    main()
