"""Why the base inequalities are not enough on a one-vertex torus.

On the base there is no proper non-empty vertex subset, so the base
inequality set is empty and accepts anything that passes Gauss-Bonnet.
The degree-9 cover has 510 subsets to check.
"""

import math

import numpy as np

from circlepattern import surfaces
from circlepattern.covering import unwrap
from circlepattern.kat import check_base_necessary, check_cover, constant_curvature_interval

torus = surfaces.one_vertex_torus()
cov = unwrap(torus)
phi = np.zeros(3)

for K in (-0.1, 0.5, 3.0, 2 * math.pi + 0.5):
    base = check_base_necessary(torus, phi, [K], "hyperbolic")
    cover = check_cover(cov, phi, [K], "hyperbolic")
    cone = check_cover(cov, phi, [K], "hyperbolic", cone_positivity=True)
    print(f"K = {K:7.4f}  base: {base.subsets_checked:3d} subsets, feasible={base.feasible!s:5}"
          f"   cover: {cover.subsets_checked} subsets, feasible={cover.feasible!s:5}"
          f"   with cone positivity: {cone.feasible}")

# the worst cover constraint for a feasible target, and how far away it is
v = check_cover(cov, phi, [3.0], "hyperbolic")
print("\nworst constraint at K = 3:", v.worst.to_dict())

# for constant targets the whole family of constraints collapses to one bound
print("\nconstant-curvature summary (phi = 0):")
for key, value in constant_curvature_interval(cov, phi).items():
    print(f"  {key}: {value}")
