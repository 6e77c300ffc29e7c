"""
Basins of the negative gradient flow for SL_2(R) on P^1
=======================================================

Generic complex seeds flow into the zero fibre {[1 : i], [1 : -i]}; real
seeds stay on the real circle and end on the codimension-one stratum.
"""
import numpy as np

from realstrata import ProjPoint, preset
from realstrata.candidates import enumerate_candidates, extract_weights
from realstrata.flow import basin_survey, check_hessian_at_limits, flow_to_limit

spec = preset("sl2r")
cands = enumerate_candidates(spec, extract_weights(spec))

tr = flow_to_limit(spec, ProjPoint([1, 0.3 + 0.1j]))
print("converged", tr.converged, "in", tr.step_count, "steps; terminal", np.round(tr.terminal.rep, 6))
print("eta along the trace is nonincreasing:", bool((np.diff(tr.etas) <= 1e-9).all()))

rep = basin_survey(spec, 100, 7, cands, real_seeds=20, audit_points=5)
print("complex seeds:", rep.counts("complex"), " real seeds:", rep.counts("real"))
print("closure audit ok:", rep.audit.ok, "with", len(rep.audit.adjacencies), "adjacencies")

h = check_hessian_at_limits(spec, flow_to_limit(spec, ProjPoint([0.8, 0.6])))
print("real limit: codimension", h.codimension, "negative Hessian eigenvalues", h.negative_count)
