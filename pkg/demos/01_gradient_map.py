"""
The gradient map of a real reductive action on projective space
================================================================

SL_2(R) acts on P(C^2) through the standard representation.  The gradient
map mu_p sends a point to the p-part of its projector; its squared norm
eta = |mu_p|^2 / 2 is the function whose critical points we stratify.
"""
import numpy as np

from realstrata import ProjPoint, eval_gradient_map, preset, validate_group_spec
from realstrata.proj_geom import metric, random_point, tangent_basis, vector_field

spec = preset("sl2r")
print(validate_group_spec(spec).ok, spec.dim_k, spec.dim_p, spec.dim_a)

# the two kinds of critical points: a real line, and a point of the zero fibre
for z in ([1, 0], [1, 1j]):
    ev = eval_gradient_map(spec, ProjPoint(z))
    print(z, "mu_p =", np.round(ev.mu_p.real, 6).tolist(), "|mu_p| =", round(ev.mu_norm, 6), "critical:", ev.critical)

# <mu_p(x), beta> has gradient beta_X; check one tangent direction numerically
rng = np.random.default_rng(0)
x = random_point(2, rng)
beta = spec.p_matrix(rng.standard_normal(spec.dim_p))
v = tangent_basis(x)[0]
h = 1e-6


def f(y):
    return float(np.real(np.vdot(y.rep, beta @ y.rep)))


fd = (f(ProjPoint(x.rep + h * v)) - f(ProjPoint(x.rep - h * v))) / (2 * h)
print("finite difference", fd, "  metric(beta_X, v)", metric(vector_field(spec, beta, x), v))
