"""G-equivariant ham-sandwich equipartitions over R, C and H.

Finite subgroups of the unit sphere of R, C or H act on F^n by scalar
multiplication. A point ``u`` of the sphere S(F^{n+1}) selects a partition
of F^n into regions ``R_g`` indexed by the group, and the solver searches
for a ``u`` at which prescribed weighted averages of the region measures
vanish.
"""

__version__ = "0.1.0"

from .algebra import FScalar, FVector, from_polar, inner_f, mul, unit_root
from .averages import (
    AverageReport,
    EquipartitionCheck,
    check_coset,
    check_full_equipartition,
    check_mod_k,
    check_opposite_pairs,
    coset_average,
    g_average,
    zm_average,
)
from .groups import (
    Automorphism,
    CosetDecomposition,
    FiniteSubgroup,
    binary_dihedral,
    binary_polyhedral,
    cosets,
    cyclic,
    cyclic_automorphism,
    identity_automorphism,
    validate_automorphism,
)
from .measures import PointCloud, RegionMeasures, SampledDensity, measure_regions, total_mass
from .partition import (
    PartitionParams,
    act,
    cell_adjacency,
    classify,
    excluded_set_margin,
    fan_boundary,
    voronoi_cell_of,
)
from .solver import (
    SolveConfig,
    SolveResult,
    oracle_grid,
    residual,
    solve,
    solve_coset,
)
