"""
Root data and their symmetries
==============================

Load a few root data from the catalog, compute Weyl groups and
automorphism groups, and form derived data.
"""

##############################################################################
# Loading from the catalog
# ------------------------
#
# Catalog entries are keyed by Dynkin label and form (``"sc"`` for simply
# connected, ``"ad"`` for adjoint).

from torus_lgp.catalog import load
from torus_lgp.root_datum import aut_group, cartan_and_dynkin, derive, gl_datum, predicates, simple_system, validate, weyl_group

psi = load("D4", "sc")
print(psi.name, "rank", psi.rank, "roots", psi.n_roots)
print("valid:", validate(psi).ok)

##############################################################################
# The Cartan matrix and Dynkin label are read off a pinning.

cartan, diagram = cartan_and_dynkin(simple_system(psi))
print(cartan)
print("label:", diagram.label)

##############################################################################
# Weyl group and automorphisms
# ----------------------------
#
# Every automorphism factors uniquely as a Weyl element times a diagram
# automorphism. For simply connected D4 the diagram part is S3.

A = aut_group(psi)
print("|W| =", A.weyl.order, " |E| =", len(A.e_delta), " |Aut| =", A.order)

for label in ("A3", "B3", "G2", "F4"):
    print(label, weyl_group(load(label)).order)

##############################################################################
# Derived data
# ------------
#
# ``derive`` produces the adjoint, simply connected, derived, semisimple,
# radical and coradical data. GL3 is reductive but not semisimple.

gl3 = gl_datum(3)
print(predicates(gl3))
for op in ("ad", "sc", "der", "ss"):
    d = derive(gl3, op)
    print(op, d.rank, predicates(d).semisimple)
