#!/usr/bin/env python3
"""Taylor-truncation rank tables for plane-wave and generalized families.

Reproduces the dimension claims at desk scale: in 2D the rank saturates
at 2p+1, in 3D at (p+1)^2, and the generalized family matches the
plane-wave family on the same direction set.
"""
import argparse

import numpy as np

from gpwlab import (
    GradedPoly,
    build_family,
    make_helmholtz_split,
    plane_wave_family,
    rank_comparison,
    unit_circle_directions,
    unit_sphere_directions,
)
from gpwlab.frame import random_poly


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=404)
    parser.add_argument("--kappa-sq", type=float, default=9.0)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)

    print("degree  directions  plane  generalized  cap")
    for degree in (1, 2, 3, 4):
        cap = 2 * degree + 1
        kappa_sq = random_poly(rng, 2, max(degree - 2, 0)).scaled(0.5)
        kappa_sq = kappa_sq + GradedPoly.constant(2, args.kappa_sq)
        split = make_helmholtz_split(kappa_sq, degree)
        for count in (cap, 2 * cap):
            dirs = unit_circle_directions(count)
            result = rank_comparison(
                build_family(split, dirs), plane_wave_family(split, dirs)
            )
            print(
                f"{degree:6d}  {count:10d}  {result.plane_rank:5d}  "
                f"{result.gpw_rank:11d}  {cap:3d}"
            )

    split3 = make_helmholtz_split(GradedPoly.constant(3, args.kappa_sq), 2)
    dirs3 = unit_sphere_directions(9)
    result3 = rank_comparison(
        build_family(split3, dirs3), plane_wave_family(split3, dirs3)
    )
    print(f"3D p=2 L=9: plane {result3.plane_rank}, generalized {result3.gpw_rank}, cap 9")


if __name__ == "__main__":
    main()
