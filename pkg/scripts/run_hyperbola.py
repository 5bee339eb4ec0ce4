#!/usr/bin/env python3
"""Truncation-scale experiment for the hyperbola cloud.

Against A = {(0, 0)} and the nonnegative quadrant, the truncated
hyperbola {(s, 1/s) : s in [1/T, T]} is always strictly inside A + Int C,
yet the largest ball radius that fits shrinks like 1/T: the uniform
relation degrades exactly as the truncation grows and fails in the limit.
"""

import argparse

from setvi import SetValue, builtin_map, evaluate, make_cone, relation_ll, relation_lt


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scales", type=float, nargs="+",
                        default=[10, 100, 1000, 10000])
    parser.add_argument("--samples", type=int, default=65)
    args = parser.parse_args()

    cone = make_cone([[1, 0], [0, 1]], [1, 1])
    A = SetValue.make([[0, 0]])
    print(f"{'T':>10}  {'lower relation':>14}  {'uniform margin':>14}")
    for T in args.scales:
        m = builtin_map("hyperbola_truncation", {"T": T, "samples": args.samples})
        B = evaluate(m, [0])
        lt = relation_lt(A, B, cone)
        holds, margin = relation_ll(A, B, cone)
        print(f"{T:>10g}  {str(lt):>14}  {margin:>14.6g}"
              f"{'' if holds else '  (uniform relation lost)'}")


if __name__ == "__main__":
    main()
