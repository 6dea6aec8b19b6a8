"""Print the principal mixed eigenvalue for alpha = 1.1, ..., 2.0 next to the reference values."""

import argparse

from fracmix import spectrum, verify


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tol", type=float, default=1e-5)
    args = ap.parse_args()
    worst = 0.0
    print(f"{'alpha':>6} {'computed':>18} {'reference':>12} {'diff':>10}")
    for alpha, ref, decimals in verify.TABLE1:
        got = spectrum.principal_mixed_eigenvalue(alpha).value
        diff = got - ref
        tol = max(args.tol, 10.0**-decimals)
        worst = max(worst, abs(diff) / tol)
        print(f"{alpha:6.2f} {got:18.12f} {ref:12.6f} {diff:10.2e}")
    print(f"largest |diff| / tolerance: {worst:.3f}")
    return 0 if worst <= 1.0 else 1


if __name__ == "__main__":
    raise SystemExit(main())
