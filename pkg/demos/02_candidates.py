"""
Candidate critical values from weights
======================================

The critical values of |mu_p| lie among the minimum-norm points of convex
hulls of weight subsets, folded into the positive Weyl chamber.
"""
import numpy as np

from realstrata import preset
from realstrata.candidates import enumerate_candidates, extract_weights, min_norm_point

# Wolfe's algorithm on a triangle that does not contain the origin
pts = np.array([[1.0, 1.0], [2.0, -0.5], [1.5, 2.0]])
x, coeffs = min_norm_point(pts)
print("closest point", x, "barycentric", coeffs)

for name in ("sl2r", "sl3r", "sl2c"):
    spec = preset(name)
    table = extract_weights(spec)
    cands = enumerate_candidates(spec, table)
    print(f"{name}: {len(table)} weights ->", [round(c.norm, 4) for c in cands])

# for sl3r the nonzero candidates are the edge midpoint diag(1, 1, -2)/6
# and the vertex diag(2, -1, -1)/3
spec = preset("sl3r")
for c in enumerate_candidates(spec, extract_weights(spec))[1:]:
    print(np.round(np.diag(c.matrix(spec)).real, 4))
