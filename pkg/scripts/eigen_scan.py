"""Write the (alpha, t0) eigenvalue scan behind the ordering plots as CSV."""

import argparse
import sys

import numpy as np

from fracmix import cli, spectrum


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha-step", type=float, default=0.05)
    ap.add_argument("--t0-step", type=float, default=0.05)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()
    alphas = np.round(np.arange(1.0 + args.alpha_step, 2.0 + 1e-9, args.alpha_step), 10)
    t0s = np.round(np.arange(args.t0_step, 1.0 - 1e-9, args.t0_step), 10)
    rows = spectrum.eigen_scan(alphas, t0s)
    bad = [r for r in rows if not r.ordered]
    with cli._output(args.out) as out:
        cli.write_csv(out, spectrum.COLUMNS, [r.as_tuple() for r in rows])
    print(f"{len(rows)} rows, {len(bad)} out of order", file=sys.stderr)
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
