"""
Equivariant Morse inequalities
==============================

The strata contribute t^{codim} P_t^K(S_beta); their sum dominates the
equivariant Poincare series of X, with an error divisible by (1 + t).
"""
from realstrata.morse import check_inequalities, classifying_space_circle, projective_line, sl2r_p1_data, sl2c_p1_data

print("P(BS^1) =", classifying_space_circle(12))
print("P(P^1)  =", projective_line(12))

terms, total = sl2r_p1_data(16)
chk = check_inequalities(terms, total)
print("sl2r: D =", chk.difference, " R =", chk.quotient, " ", chk.verdict.value)

# dropping the codimension-one stratum breaks the inequality in degree 1
cut = check_inequalities([t for t in terms if t[0] != 1], total)
print("without codim 1:", cut.verdict.value, "at degree", cut.offending_degree)

terms, total = sl2c_p1_data(16)
print("sl2c:", check_inequalities(terms, total).verdict.value)
