"""
Pre-stratum membership and the value floor
==========================================

A point lies in the pre-stratum of beta when some k in K moves it into
S^{beta+}.  The search returns a witness k, and the flow cross-checks
negative answers.
"""
import numpy as np

from realstrata import ProjPoint, preset
from realstrata.candidates import enumerate_candidates, extract_weights
from realstrata.proj_geom import act
from realstrata.strata import prestratum_membership, random_g, sample_s_beta_plus, value_floor_check

spec = preset("sl2r")
cands = enumerate_candidates(spec, extract_weights(spec))

z = ProjPoint([np.cos(0.9), np.sin(0.9)])
m = prestratum_membership(spec, cands[1], z, beta_index=1)
print("real point:", m.verdict.value, "witness moves it to", np.round(act(m.witness_k.conj().T, z).rep, 6))
m = prestratum_membership(spec, cands[1], ProjPoint([1, 0.4j]), candidates=cands, beta_index=1)
print("complex point:", m.verdict.value, "flow label", m.flow_label)

# membership is G-stable in sl3r
spec3 = preset("sl3r")
c3 = enumerate_candidates(spec3, extract_weights(spec3))
rng = np.random.default_rng(4)
s = sample_s_beta_plus(spec3, c3[1].matrix(spec3), rng, 1)[0]
print("g.s:", prestratum_membership(spec3, c3[1], act(random_g(spec3, rng, 0.5), s), beta_index=1).verdict.value)

# |mu_p| never drops below |beta| on S^{beta+}
rep = value_floor_check(spec3, c3[2].matrix(spec3), rng, 10)
print("floor check:", rep.confirmed_count, "samples,", len(rep.violations), "violations")
