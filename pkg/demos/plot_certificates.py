"""
Certificates for the local-global principle
===========================================

Classify random twisted root data by the sufficient condition that
applies, and compare with the obstruction group.
"""

##############################################################################
# A twisted root datum is a root datum with an action of a finite group.
# ``lgp_certificate`` returns the first sufficient condition that holds.

from collections import Counter

import numpy as np

from torus_lgp.algebra_model import split_root_datum
from torus_lgp.catalog import load
from torus_lgp.cohomology import CHEBOTAREV
from torus_lgp.embed import CertificateKind, lgp_certificate, obstruction_group
from torus_lgp.galois import TwistedRootDatum, cyclic_group
from torus_lgp.sampling import random_twisted_datum

Z2 = cyclic_group(2)
A2 = load("A2")
examples = {
    "split A2": TwistedRootDatum.split(A2, Z2),
    "anisotropic A2": TwistedRootDatum(A2, Z2, [-np.eye(2, dtype=np.int64)]),
}
sp4 = split_root_datum("symplectic", 4)
examples["split Sp4"] = TwistedRootDatum.split(sp4.base, Z2, sp4.delta)

for name, P in examples.items():
    print(name, lgp_certificate(P, CHEBOTAREV).kind.name)

##############################################################################
# Random data
# -----------
#
# Whenever a certificate is found, the obstruction group must vanish.

rng = np.random.default_rng(0)
kinds = Counter()
for _ in range(40):
    P = random_twisted_datum(rng, max_order=8)
    cert = lgp_certificate(P, CHEBOTAREV)
    kinds[cert.kind.name] += 1
    if cert.kind != CertificateKind.NONE:
        assert obstruction_group(P, CHEBOTAREV).is_trivial
print(dict(kinds))
