"""
Strata of SL_3(R) acting on P^2
===============================

The zero fibre is empty here: generic points reach the edge-midpoint value
|beta| = 1/sqrt(6), while real points reach the vertex value sqrt(6)/3.
"""
import numpy as np

from realstrata import ProjPoint, preset
from realstrata.candidates import enumerate_candidates, extract_weights
from realstrata.flow import check_hessian_at_limits, classify_point
from realstrata.strata import fixed_set_components, semistable_test

spec = preset("sl3r")
cands = enumerate_candidates(spec, extract_weights(spec))

for z in ([1, 0.3 + 0.2j, 0.5j], [1.0, 0.4, -0.7]):
    label, tr = classify_point(spec, ProjPoint(z), cands)
    h = check_hessian_at_limits(spec, tr)
    print(z, "-> label", label.index, "|beta| =", round(cands[label.index].norm, 6), "codim", h.codimension)

# no point is semistable for beta = 0
res = semistable_test(spec, np.zeros((3, 3)), ProjPoint([1, 0.3 + 0.2j, 0.5j]))
print("beta = 0:", res.verdict.value, "shifted eta", round(res.shifted_eta, 4))

# fixed components of the edge-midpoint beta
for comp in fixed_set_components(spec, cands[1].matrix(spec)):
    print("fixed component of dim", comp.dim, "with mu_beta", round(comp.mu_beta, 6))
