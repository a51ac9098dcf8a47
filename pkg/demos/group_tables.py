"""
Finite subgroups of the unit quaternions
========================================

Binary polyhedral groups sit on the 3-sphere as the vertices of regular
4-polytopes.  The Voronoi cell of each element is a cell of the dual
polytope, and the number of neighbouring cells tells its shape.
"""

import numpy as np

from equipart import binary_dihedral, binary_polyhedral
from equipart.partition import cell_adjacency

groups = {
    "Q8": binary_dihedral(2),
    "D*3": binary_dihedral(3),
    "T*": binary_polyhedral("T*"),
    "O*": binary_polyhedral("O*"),
    "I*": binary_polyhedral("I*"),
}

# 16-cell -> cubes, 24-cell -> octahedra, 600-cell -> dodecahedra
for name, G in groups.items():
    facets = sorted(set(cell_adjacency(G).tolist()))
    orders = np.bincount([G.element_order(g) for g in range(G.order)])
    print(f"{name:4s} order {G.order:3d}  neighbours per cell {facets}  "
          f"element orders {dict((k, int(v)) for k, v in enumerate(orders) if v)}")

###############################################################################
# The Cayley table is a Latin square.

T = groups["T*"]
assert all(sorted(row) == list(range(T.order)) for row in T.cayley)
print(T.cayley[:6, :6])
