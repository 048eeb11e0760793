import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torus_lgp.galois import (
    alternating_group,
    cyclic_group,
    dihedral_group,
    direct_product,
    small_group_catalog,
    symmetric_group,
)
from torus_lgp.root_datum import validate
from torus_lgp.sampling import (
    random_cyclic_lattice,
    random_etale_involution,
    random_twisted_datum,
    sample_groups,
    subgroups,
)

Q8 = next(G for G in small_group_catalog(8) if G.name == "Q8")


@pytest.mark.parametrize(
    "G,count",
    [
        (cyclic_group(1), 1),
        (cyclic_group(6), 4),
        (symmetric_group(3), 6),
        (direct_product(cyclic_group(2), cyclic_group(2)), 5),
        (dihedral_group(4), 10),
        (Q8, 6),
        (alternating_group(4), 10),
        (symmetric_group(4), 30),
    ],
    ids=["Z1", "Z6", "S3", "V4", "D4", "Q8", "A4", "S4"],
)
def test_subgroup_counts(G, count):
    subs = subgroups(G)
    assert len(subs) == count
    assert len({frozenset(G.embedding(H).tolist()) for H in subs}) == count
    assert all(G.order % H.order == 0 for H in subs)


def test_sample_groups_are_nontrivial():
    assert all(2 <= G.order <= 12 for G in sample_groups(12))


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_random_cyclic_lattice_shape(seed, n):
    L = random_cyclic_lattice(np.random.default_rng(seed), n)
    assert L.group.order == n
    assert 1 <= L.rank


def test_sampling_is_seeded():
    a = random_twisted_datum(np.random.default_rng(11))
    b = random_twisted_datum(np.random.default_rng(11))
    assert a.base == b.base
    assert np.array_equal(a.action, b.action)


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_random_twisted_datum_is_valid(seed):
    T = random_twisted_datum(np.random.default_rng(seed))
    assert T.group.order <= 12
    assert validate(T.base).ok


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["orthogonal", "symplectic", "unitary"]))
def test_random_etale_respects_budget(seed, tau):
    E = random_etale_involution(np.random.default_rng(seed), tau, max_points=10)
    assert E.size <= 10
    if tau == "orthogonal" and E.size % 2 == 0:
        assert E.size >= 4
