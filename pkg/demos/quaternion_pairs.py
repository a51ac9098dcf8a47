"""
Opposite regions over the quaternions
=====================================

The quaternion group Q8 = {+-1, +-i, +-j, +-k} cuts H^1 = R^4 into eight
convex regions, one per group element.  With a real measure, a vanishing
group average forces each region to carry the same mass as the region of
its negative.  Here the measure is a Q8 orbit plus two stray atoms.
"""

import numpy as np

from equipart import SolveConfig, binary_dihedral, identity_automorphism, measure_regions, solve
from equipart.averages import check_opposite_pairs
from equipart.generators import perturbed_orbit

Q = binary_dihedral(2)
rng = np.random.default_rng(2)
cloud = perturbed_orbit(Q, rng, extra=2)

res = solve([cloud], [identity_automorphism(Q)], SolveConfig(seed=0))
print(f"converged: {res.converged}   residual: {res.residual:.2e}")

vals = measure_regions(cloud, res.params, Q).values[:, 0]
for g in range(Q.order):
    q = Q.elements[g]
    axis = int(np.argmax(np.abs(q)))
    label = ("-" if q[axis] < 0 else "") + "1ijk"[axis]
    print(f"region {label:>2s}: {vals[g]:.0f}")

print(check_opposite_pairs([measure_regions(cloud, res.params, Q)], tau=1e-6).to_json())
