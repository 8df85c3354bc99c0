"""One-vertex torus: from a non-simplicial triangulation to a simplicial cover.

Run with ``python3 demos/torus_pipeline.py``.
"""

import numpy as np

from circlepattern import surfaces
from circlepattern.complex import euler_characteristic, genus, is_simplicial
from circlepattern.covering import (
    derived_cover,
    homology_voltages,
    pullback_edge_data,
    pullback_vertex_data,
    pushforward_average,
    unwrap,
)
from circlepattern.geometry import curvature_map

torus = surfaces.one_vertex_torus()
report = is_simplicial(torus)
print("vertices, edges, triangles:", torus.n_vertices, torus.n_edges, torus.n_faces)
print("chi =", euler_characteristic(torus), " genus =", genus(torus))
print("simplicial?", bool(report), "witnesses:", report.witnesses())

# p = 2 is too small: the cover still has parallel edges
p2 = derived_cover(torus, homology_voltages(torus, 2))
print("\np = 2 cover, degree", p2.degree, "->", is_simplicial(p2.total).witnesses()[:3], "...")

# unwrap tries p = 2, 3, 5, ... and keeps the first simplicial cover
cov = unwrap(torus)
tot = cov.total
print("\nunwrap picked p =", cov.voltages.modulus, "degree", cov.degree)
print("cover cells:", tot.n_vertices, tot.n_edges, tot.n_faces)
print("cover vertex degrees:", np.unique(tot.vertex_degrees))
print("rejected primes:", sorted(cov.rejected))

# curvature commutes with pulling back radii and averaging over fibers
phi = np.array([0.3, 0.9, 0.5])
for bg in ("euclidean", "hyperbolic"):
    r = np.array([0.8])
    K = curvature_map(torus, phi, r, bg)
    Khat = curvature_map(tot, pullback_edge_data(cov, phi), pullback_vertex_data(cov, r), bg)
    print(f"{bg:>10}: K = {K[0]: .12f}   fiber average on cover = {pushforward_average(cov, Khat)[0]: .12f}")
