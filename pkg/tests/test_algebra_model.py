import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torus_lgp.algebra_model import (
    AlgebraModelError,
    EtaleInvolution,
    LocalAlgebraData,
    build_twisted_datum,
    etale_involution,
    lemma26_check,
    other_orientation,
    second_kind_orientation,
    split_etale_involution,
    split_model,
    split_root_datum,
    thm25_hypothesis,
    thm27_case,
    torus_lattice,
)
from torus_lgp.catalog import load
from torus_lgp.cohomology import PlaceModel
from torus_lgp.galois import GammaSet, cyclic_group, fixed_sublattice, is_anisotropic
from torus_lgp.root_datum import cartan_and_dynkin, isomorphisms, predicates, validate
from torus_lgp.sampling import random_etale_involution

Z2 = cyclic_group(2)
seeds = st.integers(0, 2**32 - 1)


@pytest.mark.parametrize("tau,n", [("orthogonal", 3), ("orthogonal", 4), ("orthogonal", 5), ("symplectic", 4), ("unitary", 3)])
def test_split_model_involution(tau, n):
    M = split_model(tau, n)
    assert all(M.sigma0[M.sigma0[a]] == a for a in range(M.size))
    fixed = [a for a in range(M.size) if M.sigma0[a] == a]
    assert len(fixed) == (n % 2 if tau == "orthogonal" else 0)
    assert M.rank == (n if tau == "unitary" else n // 2)
    X = np.arange(M.size * M.size).reshape(M.size, M.size)
    if tau != "unitary":
        assert np.array_equal(M.tau0(M.tau0(X)), X)


def test_split_model_rejects_bad_input():
    with pytest.raises(AlgebraModelError):
        split_model("symplectic", 3)
    with pytest.raises(AlgebraModelError):
        split_model("hermitian", 2)
    with pytest.raises(AlgebraModelError):
        split_root_datum("orthogonal", 2)


@pytest.mark.parametrize(
    "tau,n,label,form",
    [
        ("symplectic", 2, "A1", "sc"),
        ("symplectic", 4, "C2", "sc"),
        ("symplectic", 6, "C3", "sc"),
        ("orthogonal", 3, "A1", "ad"),
        ("orthogonal", 5, "B2", "ad"),
        ("orthogonal", 7, "B3", "ad"),
    ],
)
def test_split_datum_matches_catalog(tau, n, label, form):
    p = split_root_datum(tau, n)
    assert validate(p.base).ok
    assert isomorphisms(p.base, load(label, form))


@pytest.mark.parametrize("m", [3, 4])
def test_split_even_orthogonal_is_intermediate(m):
    p = split_root_datum("orthogonal", 2 * m)
    _, d = cartan_and_dynkin(p)
    assert d.label == ("A3" if m == 3 else f"D{m}")  # D3 = A3
    assert p.base.n_roots == 2 * m * (m - 1)
    pr = predicates(p.base)
    assert not pr.simply_connected and not pr.adjoint


@pytest.mark.parametrize("n", [2, 3, 4])
def test_split_unitary_is_gl(n):
    p = split_root_datum("unitary", n)
    assert p.base.rank == n and p.base.n_roots == n * (n - 1)
    assert not predicates(p.base).semisimple


def test_split_etale_gives_split_datum():
    E = split_etale_involution("orthogonal", 5, Z2)
    L = torus_lattice(E)
    assert fixed_sublattice(L).rank == 2
    Psi = build_twisted_datum(E)
    assert all(np.array_equal(m, np.eye(2, dtype=np.int64)) for m in Psi.lattice.generator_matrices)


def test_quadratic_factor_gives_sign_character():
    E = etale_involution(Z2, [(Z2, Z2.trivial_subgroup())], "orthogonal")
    assert E.size == 2 and E.involution == (1, 0)
    L = torus_lattice(E)
    assert L.rank == 1 and is_anisotropic(L)


def test_etale_validation():
    Y = GammaSet(Z2, 2, ((1, 0),))
    with pytest.raises(AlgebraModelError):
        EtaleInvolution(Y, (0, 1), "first", "symplectic")
    with pytest.raises(AlgebraModelError):
        EtaleInvolution(Y, (1, 0), "first", "unitary")
    with pytest.raises(AlgebraModelError):
        EtaleInvolution(Y, (1, 0), "second", "unitary")
    with pytest.raises(AlgebraModelError):
        etale_involution(Z2, [(Z2.trivial_subgroup(), Z2)], "orthogonal")


def _split_factor_count(E):
    # factors F x F: Gamma-orbits on Y that do not meet their sigma-image
    seen, count = set(), 0
    for y in range(E.size):
        if y in seen or E.involution[y] == y:
            continue
        orb = {p[y] for p in E.gamma_set.action}
        seen |= orb
        if E.kind == "first" and E.involution[y] not in orb:
            count += 1
    return count // 2 if E.kind == "first" else None


@settings(max_examples=40)
@given(seeds, st.sampled_from(["orthogonal", "symplectic"]))
def test_torus_split_rank_counts_split_factors(seed, tau):
    E = random_etale_involution(np.random.default_rng(seed), tau)
    Psi = build_twisted_datum(E)
    assert validate(Psi.base).ok
    assert fixed_sublattice(torus_lattice(E)).rank == _split_factor_count(E)


@settings(max_examples=25)
@given(seeds)
def test_unitary_torus_is_valid(seed):
    E = random_etale_involution(np.random.default_rng(seed), "unitary")
    Psi = build_twisted_datum(E)
    assert Psi.base.rank == E.degree
    assert validate(Psi.base).ok


@settings(max_examples=30)
@given(seeds)
def test_lemma26_on_random_odd_orthogonal(seed):
    E = random_etale_involution(np.random.default_rng(seed), "orthogonal", odd=True)
    rep = lemma26_check(E)
    assert rep.ok, rep.witness
    assert rep.tested > 0


@settings(max_examples=30)
@given(seeds)
def test_thm25_hypothesis_extremes(seed):
    E = random_etale_involution(np.random.default_rng(seed), "orthogonal", odd=True)
    # the whole group is always a place with matching behaviour
    assert thm25_hypothesis(E, E.group)
    Y, sigma = E.without_fixed_point()
    all_split = all(sigma[y] not in {p[y] for p in Y.action} for y in range(Y.size))
    assert thm25_hypothesis(E, E.group.trivial_subgroup()) == all_split


def test_thm25_examples():
    E = etale_involution(Z2, [(Z2, Z2), (Z2, Z2.trivial_subgroup())], "orthogonal", fixed_point=True)
    assert not thm25_hypothesis(E, Z2.trivial_subgroup())
    assert thm25_hypothesis(E, Z2)
    with pytest.raises(AlgebraModelError):
        thm25_hypothesis(split_etale_involution("orthogonal", 4, Z2), Z2)


def test_thm27_cases():
    E_split = etale_involution(Z2, [(Z2, Z2), (Z2, Z2)], "orthogonal")
    E_field = etale_involution(Z2, [(Z2, Z2.trivial_subgroup()), (Z2, Z2)], "orthogonal")
    v = PlaceModel("v", Z2)
    bad = [LocalAlgebraData(v, a_split=False, disc_split=True)]
    assert thm27_case("odd_over_quaternion", bad, E_split)
    assert not thm27_case("even_over_quaternion", bad, E_split)
    assert thm27_case("even_over_quaternion", bad, E_field)
    assert thm27_case("even_over_quaternion", [LocalAlgebraData(v, False, False)], E_split)
    with pytest.raises(AlgebraModelError):
        thm27_case("matrix_over_field", bad, E_split)


@pytest.mark.parametrize("n", [2, 3])
def test_second_kind_split_orientation(n):
    E = split_etale_involution("unitary", n, Z2)
    Psi = build_twisted_datum(E)
    u = second_kind_orientation(E, Psi)
    assert u.is_identity_map()
    w = other_orientation(u)
    assert w != u
    assert not np.array_equal(w.matrix, u.matrix)


@settings(max_examples=20)
@given(seeds)
def test_second_kind_orientation_unique(seed):
    E = random_etale_involution(np.random.default_rng(seed), "unitary")
    Psi = build_twisted_datum(E)
    u = second_kind_orientation(E, Psi)
    assert u.source.base == Psi.base
