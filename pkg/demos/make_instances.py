"""
Instance files for the command line tool
========================================

Writes a few JSON instances to demos/instances (or the directory given as
the first argument).  Try

    equipart solve demos/instances/fan3.json -o report.json
    equipart verify demos/instances/fan3.json report.json
    equipart plot demos/instances/fan3.json report.json -o fan3.svg
"""

import json
import sys
from pathlib import Path

import numpy as np

from equipart.generators import perturbed_orbit, signed_planar_cloud, signed_real_cloud
from equipart.groups import binary_dihedral
from equipart.instance import instance_dict

here = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).with_name("instances")
here.mkdir(exist_ok=True)
rng = np.random.default_rng(2024)

fan5 = signed_planar_cloud(rng, 15, 5, dim=4)
instances = {
    "ham_sandwich": instance_dict({"kind": "cyclic", "m": 2, "algebra": "R"},
                                  [signed_real_cloud(rng, 8, 2, 2), signed_real_cloud(rng, 8, 2, 4)]),
    "fan3": instance_dict({"kind": "cyclic", "m": 3}, [signed_planar_cloud(rng, 15, 3)],
                          [{"type": "power", "r": 1}]),
    "fan5": instance_dict({"kind": "cyclic", "m": 5}, [fan5, fan5],
                          [{"type": "power", "r": 1}, {"type": "power", "r": 2}]),
    "orthogonal_fan": instance_dict({"kind": "cyclic", "m": 4}, [signed_planar_cloud(rng, 12, 4)],
                                    coset={"subgroup": [0, 2]}),
    "quaternion_q8": instance_dict({"kind": "binary_dihedral", "m": 2},
                                   [perturbed_orbit(binary_dihedral(2), rng, extra=2)]),
}

for name, data in instances.items():
    path = here / f"{name}.json"
    path.write_text(json.dumps(data, indent=1) + "\n")
    print("wrote", path)
