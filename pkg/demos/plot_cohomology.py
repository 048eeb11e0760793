"""
Cohomology of lattices
======================

Compute group cohomology of small Galois lattices and the locally trivial
part over a family of places.
"""

##############################################################################
# Lattices over a finite group
# ----------------------------
#
# A lattice is a rank together with one integer matrix per group generator.
# Here Z/2 acts on Z by the sign.

import numpy as np

from torus_lgp.cohomology import CHEBOTAREV, h, sha, tate_cyclic_oracle
from torus_lgp.galois import GammaLattice, GammaSet, cyclic_group, direct_product, norm_one_quotient

Z2 = cyclic_group(2)
sign = GammaLattice(Z2, 1, [np.array([[-1]])])
trivial = GammaLattice.trivial(Z2, 1)

for name, M in (("trivial", trivial), ("sign", sign)):
    print(name, [h(i, Z2, M).invariants for i in (1, 2)])

##############################################################################
# For cyclic groups the answer can be checked against the norm complex.

print(tate_cyclic_oracle(Z2, sign, 1), tate_cyclic_oracle(Z2, sign, 2))

##############################################################################
# Cocycles behave like group elements: classes add and multiply by integers.

H2 = h(2, Z2, trivial)
c = H2.generators()[0]
print("order", H2.order, "2c is zero:", (c * 2).is_zero())

##############################################################################
# Locally trivial classes
# -----------------------
#
# With the Chebotarev place model every cyclic subgroup occurs as a
# decomposition group. For the Klein four group acting on the norm-one
# torus lattice, a class of order 2 survives every restriction.

V4 = direct_product(Z2, Z2)
J = norm_one_quotient(GammaSet.regular(V4))
print("H^2(J):", h(2, V4, J).invariants)
print("Sha^2(J):", sha(2, V4, J, CHEBOTAREV).invariants)
