"""
A regular 3-fan in the plane
============================

The cyclic group C3 of cube roots of unity acts on C = R^2.  A single
parameter vector u in the unit sphere of C^2 picks an apex and a rotation for
three rays at 120 degrees, and the solver turns it until each of the three
sectors holds the same signed mass.  The result is drawn as an SVG in the
current directory.
"""

from pathlib import Path

import numpy as np

from equipart import SolveConfig, cyclic, measure_regions, solve
from equipart.generators import signed_planar_cloud
from equipart.groups import cyclic_automorphism
from equipart.partition import fan_boundary
from equipart.svg import render_svg

rng = np.random.default_rng(11)
cloud = signed_planar_cloud(rng, 21, 3)
G = cyclic(3)

# the character z -> z^1 is the one whose vanishing average forces equal thirds
res = solve([cloud], [cyclic_automorphism(G, 1)], SolveConfig(seed=0))
print(f"converged: {res.converged}   residual: {res.residual:.2e}")

###############################################################################
# Sector masses and ray directions.

vals = measure_regions(cloud, res.params, G).values[:, 0]
print("sector masses:", vals.tolist())
for h in fan_boundary(res.params, G):
    print(f"ray between sectors {h.between}: fiber angle {np.degrees(h.angle):7.2f} deg")

out = Path("three_fan.svg")
out.write_text(render_svg([cloud], res.params, G))
print(f"wrote {out}")
