#!/usr/bin/env python3
"""Finite-element convergence study on shapes with known spectra.

Prints, per refinement level, the Rayleigh--Ritz upper bound for the second
eigenvalue, its error against the closed form, and the observed convergence
order, for the mixed-boundary unit square and the Neumann equilateral
triangle.
"""

import argparse
import math
import sys

import numpy as np

from starspec import fem
from starspec.exact import box_eigs, equilateral_eigs
from starspec.geom import BC, EdgeRole, Polygon


def shapes():
    square = Polygon(
        vertices=((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)),
        edge_tags=(BC.DIRICHLET, BC.NEUMANN, BC.NEUMANN, BC.NEUMANN),
        edge_roles=(EdgeRole.WALL, EdgeRole.CUT, EdgeRole.CUT, EdgeRole.CUT),
    )
    triangle = Polygon(
        vertices=((0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)),
        edge_tags=(BC.NEUMANN,) * 3,
        edge_roles=(EdgeRole.CUT,) * 3,
    )
    yield "mixed square", square, box_eigs((1.0, 1.0), ("NN", "DN"), 2).values[1]
    yield "Neumann triangle", triangle, equilateral_eigs(1.0, "neumann", 2).values[1]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", type=int, default=4)
    ap.add_argument("--h0", type=float, default=0.25)
    args = ap.parse_args()

    for name, poly, exact_val in shapes():
        spec = fem.dn_spectrum(poly, 2, args.levels, args.h0)
        print(f"\n{name}: exact lambda_2 = {exact_val:.12f}")
        h = args.h0
        for vals in spec.level_values:
            err = vals[1] - exact_val
            print(f"  h <= {h:<8.4g} upper = {vals[1]:.10f}  error = {err:.3e}")
            h /= 2
        orders = np.atleast_1d(spec.observed_order)
        print(f"  extrapolated = {spec.extrapolated[1]:.10f} "
              f"(error {spec.extrapolated[1] - exact_val:+.3e}), "
              f"observed order = {orders[min(1, len(orders) - 1)]:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
