"""
Tori from etale algebras with involution
========================================

Build maximal tori of classical groups from etale algebras with an
involution and test the odd orthogonal criterion.
"""

##############################################################################
# Split models
# ------------
#
# The split group of each involution type has a standard root datum.

from torus_lgp.algebra_model import (
    build_twisted_datum,
    etale_involution,
    lemma26_check,
    split_root_datum,
    thm25_hypothesis,
)
from torus_lgp.galois import cyclic_group
from torus_lgp.root_datum import cartan_and_dynkin

for tau, n in (("symplectic", 6), ("orthogonal", 7), ("orthogonal", 8), ("unitary", 4)):
    p = split_root_datum(tau, n)
    print(tau, n, cartan_and_dynkin(p)[1].label, p.base.n_roots)

##############################################################################
# An etale algebra with involution
# --------------------------------
#
# Each factor is a pair (stabilizer of a point, stabilizer of the pair
# {y, sigma y}). The second factor below is a quadratic field, so the
# resulting torus is not split.

Z2 = cyclic_group(2)
E = etale_involution(Z2, [(Z2, Z2), (Z2, Z2.trivial_subgroup())], "orthogonal", fixed_point=True)
Psi = build_twisted_datum(E)
print("degree", E.degree, "rank", Psi.base.rank)

##############################################################################
# The hypothesis holds at a place whose decomposition group is all of Z/2,
# and fails at a split place.

print(thm25_hypothesis(E, Z2), thm25_hypothesis(E, Z2.trivial_subgroup()))
print("lattice check:", lemma26_check(E).ok)
