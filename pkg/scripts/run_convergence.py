#!/usr/bin/env python3
"""Best-approximation convergence on a manufactured variable-wavenumber problem.

The exact solution is exp(g) for a random oscillatory polynomial g, the
wavenumber square is whatever makes that an exact solution, and the
family is fitted on shrinking balls.  The fitted slope should reach
degree + 1.
"""
import argparse
import math

import numpy as np

from gpwlab import (
    GradedPoly,
    build_family,
    convergence_study,
    make_helmholtz_split,
    manufactured_helmholtz,
    unit_circle_directions,
)
from gpwlab.polycore import monomials_of_degree


def oscillatory_phase(rng, top_degree=3):
    angle = rng.uniform(0, 2 * math.pi)
    base = rng.uniform(1.5, 2.5)
    coeffs = {(1, 0): 1j * base * math.cos(angle), (0, 1): 1j * base * math.sin(angle)}
    for n in range(2, top_degree + 1):
        for index in monomials_of_degree(2, n):
            re, im = rng.uniform(-0.3, 0.3, 2)
            coeffs[index] = complex(re, im)
    return GradedPoly(2, coeffs)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--degree", type=int, default=2)
    parser.add_argument("--seed", type=int, default=606)
    parser.add_argument(
        "--h", type=float, nargs="+", default=[0.4, 0.2, 0.1, 0.05], dest="radii"
    )
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    problem = manufactured_helmholtz(oscillatory_phase(rng))
    split = make_helmholtz_split(problem.jet, args.degree)
    family = build_family(split, unit_circle_directions(2 * args.degree + 1))
    study = convergence_study(problem.solution, family, args.radii)

    print(f"degree {args.degree}, {len(family)} directions")
    print("      h          error      slope")
    for h, error, slope in study.csv_rows():
        slope_text = f"{slope:8.3f}" if slope is not None else "        "
        print(f"  {h:8.4f}  {error:12.4e}  {slope_text}")
    print(f"global slope {study.slope:.3f} (threshold {study.threshold:.2f}) "
          f"passed={study.passed}")


if __name__ == "__main__":
    main()
