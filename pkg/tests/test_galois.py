import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import group_matrices
from torus_lgp.catalog import load
from torus_lgp.galois import (
    FiniteGroup,
    GammaLattice,
    GammaSet,
    GroupCapError,
    TwistedRootDatum,
    augmentation_sub,
    cyclic_group,
    dihedral_group,
    direct_product,
    fixed_sublattice,
    induced_lattice,
    is_anisotropic,
    is_generic,
    norm_one_quotient,
    small_group_catalog,
    star_action,
    symmetric_group,
)
from torus_lgp.root_datum import reflection_matrix, weyl_group
from torus_lgp.sampling import random_cyclic_lattice, random_twisted_datum

CATALOG = small_group_catalog(24)


def test_basic_group_orders():
    assert cyclic_group(1).order == 1
    assert cyclic_group(7).order == 7
    assert dihedral_group(4).order == 8
    assert symmetric_group(4).order == 24
    assert direct_product(cyclic_group(2), cyclic_group(3)).is_cyclic()


def test_group_cap():
    with pytest.raises(GroupCapError):
        FiniteGroup(6, [(1, 2, 3, 4, 5, 0), (1, 0, 2, 3, 4, 5)], cap=100)


def test_rejects_non_permutation():
    with pytest.raises(ValueError):
        FiniteGroup(3, [(0, 0, 1)])


def test_catalog_named_groups():
    by_name = {G.name: G for G in CATALOG}
    q8 = by_name["Q8"]
    assert q8.order == 8
    assert sorted(q8.element_order(k) for k in range(8)) == [1, 2, 4, 4, 4, 4, 4, 4]
    assert by_name["SL(2,3)"].order == 24
    assert not by_name["Z2xZ2"].is_cyclic()
    assert by_name["A4"].order == 12


def test_catalog_order_element_profiles_distinct():
    # (order, abelian, element orders) separates all but a few catalog pairs
    keys = set()
    for G in CATALOG:
        T = G.table
        abelian = bool(np.array_equal(T, T.T))
        keys.add((G.order, abelian, tuple(sorted(G.element_order(k) for k in range(G.order)))))
    assert len(keys) >= len(CATALOG) - 3


@pytest.mark.parametrize("G", CATALOG[:40], ids=lambda G: G.name)
def test_group_table_axioms(G):
    T = G.table
    n = G.order
    assert list(T[0]) == list(range(n))
    for row in T:
        assert sorted(row) == list(range(n))
    for k in range(0, n, max(1, n // 6)):
        # (k b) c == k (b c) for all b, c
        assert np.array_equal(T[T[k]], T[k][T])


def test_action_must_be_homomorphism():
    with pytest.raises(ValueError):
        GammaLattice(cyclic_group(3), 1, [[[-1]]])


def test_action_must_be_unimodular():
    with pytest.raises(ValueError):
        GammaLattice(cyclic_group(2), 1, [[[2]]])


def test_induced_and_norm_one():
    G = cyclic_group(3)
    X = GammaSet.regular(G)
    Z = induced_lattice(X)
    assert Z.rank == 3
    F = fixed_sublattice(Z)
    assert F.rank == 1 and F.contains((1, 1, 1))
    J = norm_one_quotient(X)
    assert J.rank == 2 and is_anisotropic(J)
    I = augmentation_sub(X)
    assert I.rank == 2 and is_anisotropic(I)


def test_fixed_examples():
    G = cyclic_group(2)
    assert fixed_sublattice(GammaLattice.trivial(G, 2)).rank == 2
    assert is_anisotropic(GammaLattice(G, 2, [-np.eye(2, dtype=np.int64)]))
    swap = GammaLattice(G, 2, [[[0, 1], [1, 0]]])
    assert fixed_sublattice(swap).contains((1, 1))
    assert fixed_sublattice(swap).rank == 1


def test_fixed_restricted_to_trivial_subgroup():
    G = cyclic_group(2)
    L = GammaLattice(G, 2, [-np.eye(2, dtype=np.int64)])
    assert fixed_sublattice(L, G.trivial_subgroup()).rank == 2


def test_twisted_datum_rejects_non_automorphism():
    with pytest.raises(ValueError):
        TwistedRootDatum(load("A2"), cyclic_group(2), [[[1, 0], [0, -1]]])


def _weyl_twist(label):
    psi = load(label)
    W = weyl_group(psi)
    gens = [reflection_matrix(psi, i) for i in range(psi.n_roots)]
    perms = []
    keys = [np.ascontiguousarray(w).tobytes() for w in W.elements]
    lookup = {k: i for i, k in enumerate(keys)}
    for s in gens:
        perms.append(tuple(lookup[np.ascontiguousarray(s @ w).tobytes()] for w in W.elements))
    G = FiniteGroup(W.order, perms)
    return TwistedRootDatum(psi, G, gens)


def test_generic_and_star_examples():
    Psi = _weyl_twist("A2")
    assert is_generic(Psi)
    assert all(p == (0, 1) for p in star_action(Psi))
    split = TwistedRootDatum.split(load("A2"), cyclic_group(2))
    assert not is_generic(split)
    minus = TwistedRootDatum(load("A2"), cyclic_group(2), [-np.eye(2, dtype=np.int64)])
    assert sorted(star_action(minus)) == [(0, 1), (1, 0)]


def test_star_action_is_homomorphism_d4():
    G = direct_product(cyclic_group(2), cyclic_group(2))
    Psi = random_twisted_datum(np.random.default_rng(5), labels=("D4",))
    stars = star_action(Psi)
    T = Psi.group.table
    for a in range(Psi.group.order):
        for b in range(Psi.group.order):
            ab = T[a, b]
            assert stars[ab] == tuple(stars[a][stars[b][x]] for x in range(len(stars[b])))
    assert G.order == 4


@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_fixed_rank_equals_trace_average(seed, n):
    # rank of invariants is the multiplicity of the trivial character
    L = random_cyclic_lattice(np.random.default_rng(seed), n)
    mats = list(group_matrices(L.group.generators, list(L.generator_matrices), L.group.degree).values())
    if not L.group.generators:
        mats = [np.eye(L.rank, dtype=np.int64)]
    avg = sum(int(np.trace(m)) for m in mats)
    assert avg % len(mats) == 0
    F = fixed_sublattice(L)
    assert F.rank == avg // len(mats)
    for v in F.vectors():
        for m in L.generator_matrices:
            assert tuple(int(x) for x in m @ np.array(v)) == tuple(v)


@given(st.integers(0, 2**32 - 1))
def test_twisted_derive_keeps_action_consistent(seed):
    Psi = random_twisted_datum(np.random.default_rng(seed), max_order=8)
    for op in ("ad", "sc"):
        d = Psi.derive(op)
        assert d.group is Psi.group
        assert star_action(d) == star_action(Psi)
