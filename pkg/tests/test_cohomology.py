import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import h1_order, h2_order
from torus_lgp.catalog import load
from torus_lgp.cohomology import (
    CHEBOTAREV,
    CohomologyCostError,
    PlaceModel,
    h,
    restriction,
    sha,
    sha_cyclic,
    tate_cyclic_oracle,
)
from torus_lgp.exact_lattice import AbelianInvariants
from torus_lgp.galois import (
    GammaLattice,
    GammaSet,
    cyclic_group,
    dihedral_group,
    direct_product,
    induced_lattice,
    norm_one_quotient,
    symmetric_group,
)
from torus_lgp.root_datum import reflection_matrix
from torus_lgp.sampling import random_cyclic_lattice, subgroups

Z2 = cyclic_group(2)
V4 = direct_product(cyclic_group(2), cyclic_group(2))


def inv(H):
    return H.invariants


def test_degree_zero():
    assert inv(h(0, Z2, GammaLattice.trivial(Z2))) == AbelianInvariants(1, ())
    assert inv(h(0, Z2, GammaLattice.from_character(Z2, [-1]))).is_trivial


def test_z2_examples():
    sign = GammaLattice.from_character(Z2, [-1])
    triv = GammaLattice.trivial(Z2)
    assert inv(h(1, Z2, sign)) == AbelianInvariants(0, (2,))
    assert inv(h(2, Z2, sign)).is_trivial
    assert inv(h(1, Z2, triv)).is_trivial
    assert inv(h(2, Z2, triv)) == AbelianInvariants(0, (2,))


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_h2_cyclic_trivial_is_character_group(n):
    G = cyclic_group(n)
    assert inv(h(2, G, GammaLattice.trivial(G))) == AbelianInvariants(0, (n,))


def test_finite_coefficients():
    G = cyclic_group(3)
    M = GammaLattice.trivial(G, 1, 3)
    assert inv(h(0, G, M)) == AbelianInvariants(0, (3,))
    assert inv(h(1, G, M)) == AbelianInvariants(0, (3,))
    assert inv(h(2, G, M)) == AbelianInvariants(0, (3,))


def test_h1_norm_one_is_dual_of_abelianization():
    # H^1(G, J_G) = H^2(G, Z) = Hom(G, Q/Z)
    assert inv(h(1, V4, norm_one_quotient(GammaSet.regular(V4)))) == AbelianInvariants(0, (2, 2))
    S3 = symmetric_group(3)
    assert inv(h(1, S3, norm_one_quotient(GammaSet.regular(S3)))) == AbelianInvariants(0, (2,))


def test_cost_cap():
    with pytest.raises(CohomologyCostError):
        h(2, symmetric_group(4), GammaLattice.trivial(symmetric_group(4), 2), cost_cap=1000)


def _oracle_cases():
    S3 = symmetric_group(3)
    psi = load("A2")
    # S3 generated by a 3-cycle and a transposition acting on the A2 root lattice
    s1, s2 = reflection_matrix(psi, 0), reflection_matrix(psi, 1)
    rot = s1 @ s2
    cases = []
    # match generator cycle types of symmetric_group(3)
    orders = [S3.element_order(S3.index(g)) for g in S3.generators]
    mats_a2 = [rot if o == 3 else s1 for o in orders]
    cases.append(("S3-A2", S3, mats_a2))
    mats_sign = [np.array([[1]]) if o == 3 else np.array([[-1]]) for o in orders]
    cases.append(("S3-sign", S3, mats_sign))
    cases.append(("V4-diag", V4, [np.diag([-1, 1]), np.diag([1, -1])]))
    cases.append(("V4-swap", V4, [np.array([[0, 1], [1, 0]]), -np.eye(2, dtype=np.int64)]))
    cases.append(("V4-triv", V4, [np.eye(1, dtype=np.int64)] * 2))
    D4 = dihedral_group(4)
    orders = [D4.element_order(D4.index(g)) for g in D4.generators]
    rot4 = np.array([[0, -1], [1, 0]])
    flip = np.array([[1, 0], [0, -1]])
    cases.append(("D4-B2", D4, [rot4 if o == 4 else flip for o in orders]))
    cases.append(("D4-sign", D4, [np.array([[-1]]) if o == 4 else np.array([[1]]) for o in orders]))
    return cases


@pytest.mark.parametrize("name,G,mats", _oracle_cases(), ids=lambda x: x if isinstance(x, str) else "")
def test_h1_h2_orders_match_brute_force(name, G, mats):
    M = GammaLattice(G, mats[0].shape[0], mats)
    assert h(1, G, M).order == h1_order(G.generators, mats, G.degree, G.order)
    assert h(2, G, M).order == h2_order(G.generators, mats, G.degree, G.order)


@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_cyclic_cohomology_matches_norm_complex(seed, n):
    M = random_cyclic_lattice(np.random.default_rng(seed), n)
    for i in (1, 2):
        assert inv(h(i, M.group, M)) == tate_cyclic_oracle(M.group, M, i)


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1), st.integers(2, 8))
def test_classes_killed_by_group_order(seed, n):
    M = random_cyclic_lattice(np.random.default_rng(seed), n, max_rank=3)
    for i in (1, 2):
        H = h(i, M.group, M)
        for c in H.generators():
            assert (n * c).is_zero()
        assert all(n % o == 0 for o in H.orders)


@pytest.mark.parametrize("G", [cyclic_group(4), symmetric_group(3), V4, dihedral_group(4)], ids=lambda G: G.name or str(G.order))
def test_shapiro(G):
    # Z[X] splits over orbits; each orbit contributes H^i(Stab, Z)
    X = GammaSet(G, G.degree, G.generators)
    for i in (1, 2):
        expected = 1
        for orb in X.orbits():
            stab = G.subgroup_by_indices([k for k, p in enumerate(G.elements) if p[orb[0]] == orb[0]])
            expected *= h(i, stab, GammaLattice.trivial(stab)).order
        assert h(i, G, induced_lattice(X)).order == expected


def test_shapiro_transitive_invariants():
    G = symmetric_group(3)
    X = GammaSet(G, 3, G.generators)
    stab = G.subgroup_by_indices([k for k, p in enumerate(G.elements) if p[0] == 0])
    assert inv(h(2, G, induced_lattice(X))) == inv(h(2, stab, GammaLattice.trivial(stab)))


def test_restriction_examples():
    G = cyclic_group(4)
    H = h(2, G, GammaLattice.trivial(G))
    gen = H.generators()[0]
    assert restriction(gen, G).coords == gen.coords
    assert restriction(gen, G.trivial_subgroup()).is_zero()
    half = G.cyclic_subgroup(G.index(tuple(G.generators[0][G.generators[0][x]] for x in range(G.degree))))
    assert half.order == 2
    assert not restriction(gen, half).is_zero()
    assert restriction(2 * gen, half).is_zero()


def test_sha_examples():
    J = norm_one_quotient(GammaSet.regular(V4))
    assert inv(sha(2, V4, J, CHEBOTAREV)) == AbelianInvariants(0, (2,))
    assert inv(sha(2, V4, J, [])) == inv(h(2, V4, J))
    assert inv(sha(2, V4, J, [PlaceModel("all", V4)])).is_trivial
    assert inv(sha_cyclic(2, cyclic_group(6), GammaLattice.trivial(cyclic_group(6)))).is_trivial


@pytest.mark.parametrize("G", [V4, symmetric_group(3), dihedral_group(4)], ids=lambda G: str(G.order))
def test_sha_is_monotone_in_places(G):
    J = norm_one_quotient(GammaSet.regular(G))
    subs = subgroups(G)
    H = h(2, G, J)
    prev = H.order
    for k in range(len(subs) + 1):
        cur = sha(2, G, J, subs[:k]).order
        assert prev % cur == 0 and H.order % cur == 0
        prev = cur
    assert prev == 1


def test_sha_cyclic_z3_on_catalog_sample():
    for G in (symmetric_group(3), direct_product(cyclic_group(3), cyclic_group(3)), dihedral_group(6)):
        assert sha_cyclic(1, G, GammaLattice.trivial(G, 1, 3)).is_trivial
