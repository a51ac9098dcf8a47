"""
Cutting two signed clouds with one line
=======================================

Two clouds of +1/-1 atoms in the plane.  One straight line halves the
signed mass of both at once.  In this package that is the group C2 = {1, -1}
acting on R: the two regions are the half-planes on either side of the line.
"""

import numpy as np

from equipart import SolveConfig, solve
from equipart.generators import signed_real_cloud
from equipart.solver import ham_sandwich_problem

rng = np.random.default_rng(4)
red = signed_real_cloud(rng, 10, 2, 4)
blue = signed_real_cloud(rng, 12, 2, -2)

dists, phis = ham_sandwich_problem([red, blue])
res = solve(dists, phis, SolveConfig(seed=0))
print(f"converged: {res.converged}   residual: {res.residual:.2e}")

###############################################################################
# The parameters u = (u0, u1, u2) describe the line u1 x + u2 y + u0 = 0.

u = res.params.u[:, 0]
print(f"line: {u[1]:+.4f} x {u[2]:+.4f} y {u[0]:+.4f} = 0")

for name, cloud in (("red", red), ("blue", blue)):
    side = cloud.positions[:, :, 0] @ u[1:] + u[0]
    w = cloud.weights[:, 0]
    print(f"{name:5s} total {w.sum():+.0f}: above {w[side > 0].sum():+.0f}, below {w[side < 0].sum():+.0f}")
