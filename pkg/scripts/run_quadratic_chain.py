#!/usr/bin/env python3
"""Run the full theorem chain on the two-objective quadratic instance.

The map sends x to the single point ((x - 0)^2, (x - 1)^2) on a grid
spanning [-1, 2], ordered by the nonnegative quadrant.  Points inside
[0, 1] are weakly efficient; points outside are dominated.  The script
classifies every grid point, prints the chain verdicts at a minimizer and
at a dominated point, and writes the problem file it used.
"""

import argparse
import json
from pathlib import Path

import numpy as np

from setvi import (
    DiniConfig,
    Verdict,
    builtin_map,
    classify_weak_min,
    dual_base,
    make_cone,
    render_json,
    theorem_chain,
    vi_check,
)

PROBLEM = {
    "cone": {"dual_generators": [[1, 0], [0, 1]], "interior_point": [1, 1]},
    "map": {"generator": {"name": "quadratic_vector", "params": {"targets": [0, 1]},
                          "domain_grid": {"from": [-1], "to": [2], "steps": 13}}},
    "base_points": [[0.5], [2.0]],
    "settings": {"tau_strict": 1e-6,
                 "dini": {"t_max": 1e-4, "ratio": 0.5, "steps": 12},
                 "wstar_density": 9},
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="quadratic_chain_report.json")
    parser.add_argument("--problem-out", default="quadratic_problem.json")
    args = parser.parse_args()

    tau = 1e-6
    cfg = DiniConfig(t_max=1e-4, ratio=0.5, steps=12)
    cone = make_cone([[1, 0], [0, 1]], [1, 1])
    grid = np.linspace(-1, 2, 13).reshape(-1, 1)
    m = builtin_map("quadratic_vector", {"targets": [0, 1]}, domain=grid)
    wstar = dual_base(cone, 9)

    print("per-point minimality and Stampacchia verdicts:")
    efficient = []
    for x in grid:
        minim = classify_weak_min(m, x, cone, wstar, tau)
        svi = vi_check(m, x, cone, wstar, cfg, "svi", tau)
        mark = "*" if minim.w_min.verdict is Verdict.HOLDS else " "
        if minim.w_min.verdict is Verdict.HOLDS:
            efficient.append(float(x[0]))
        print(f"  {mark} x={x[0]:+.2f}  minimal={minim.w_min.verdict.value:<12} "
              f"svi={svi.verdict.value}")
    print(f"weakly efficient set on the grid: {efficient}\n")

    reports = {}
    for x0 in ([0.5], [2.0]):
        rep = theorem_chain(m, x0, cone, wstar, cfg=cfg, tau=tau)
        reports[str(x0[0])] = rep.to_dict()
        print(f"chain at x0={x0[0]}:")
        for entry in rep.implications:
            print(f"  {entry['implication']:<28} {entry['status']}")
        print()

    Path(args.problem_out).write_text(json.dumps(PROBLEM, indent=2),
                                      encoding="utf-8")
    Path(args.out).write_text(render_json(reports), encoding="utf-8")
    print(f"wrote {args.problem_out} and {args.out}")


if __name__ == "__main__":
    main()
