from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import determinantal_divisors
from torus_lgp.exact_lattice import (
    AbelianInvariants,
    IntMatrix,
    Sublattice,
    Subquotient,
    determinant,
    hermite_normal_form,
    kernel_basis,
    quotient_invariants,
    saturate,
    smith_normal_form,
    solve_integer,
    solve_rational,
)

small = st.integers(-6, 6)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m)
        )
    )


def test_snf_identity():
    _, D, _ = smith_normal_form([[1, 0], [0, 1]])
    assert D.diagonal() == (1, 1)


def test_snf_zero():
    _, D, _ = smith_normal_form([[0, 0], [0, 0]])
    assert D.diagonal() == (0, 0)


def test_snf_2468():
    _, D, _ = smith_normal_form([[2, 4], [6, 8]])
    assert D.diagonal() == (2, 4)


def test_snf_sympy_reference_matrix():
    # sympy's normalforms test matrix; invariant factors 1, 10, 30, 0
    _, D, _ = smith_normal_form([[12, 6, 4, 8], [3, 9, 6, 12], [2, 16, 14, 28], [20, 10, 10, 20]])
    assert D.diagonal() == (1, 10, 30, 0)


@given(matrices())
def test_snf_matches_determinantal_divisors(A):
    U, D, V = smith_normal_form(A)
    assert list(D.diagonal()) == determinantal_divisors(A)
    assert (U @ IntMatrix.from_rows(A) @ V).entries == D.entries
    assert abs(determinant(U)) == 1 and abs(determinant(V)) == 1


@given(matrices())
def test_snf_is_deterministic(A):
    assert smith_normal_form(A)[1].entries == smith_normal_form(A)[1].entries
    d = smith_normal_form(A)[1].diagonal()
    nz = [x for x in d if x]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


@given(matrices())
def test_hnf_spans_same_lattice(A):
    n = len(A[0])
    H = hermite_normal_form(A, n)
    L = Sublattice.span(n, A)
    assert Sublattice(n, H) == L
    for row in A:
        assert Sublattice(n, H).contains(row)
    for row in H.entries:
        assert L.contains(row)


@given(matrices(), st.integers(1, 3))
def test_hnf_invariant_under_unimodular_row_ops(A, k):
    n = len(A[0])
    B = [list(r) for r in A]
    if len(B) > 1:
        B[0] = [a + k * b for a, b in zip(B[0], B[1])]
        B[0], B[-1] = B[-1], B[0]
    assert hermite_normal_form(A, n) == hermite_normal_form(B, n)


def test_kernel_identity():
    assert kernel_basis([[1, 0], [0, 1]]).rank == 0


def test_kernel_zero_row():
    assert kernel_basis([[0, 0]]).rank == 2


def test_kernel_2_3():
    K = kernel_basis([[2, 3]])
    assert K.rank == 1
    assert tuple(abs(x) for x in K.basis().vectors()[0]) == (3, 2)
    assert K.contains((3, -2))


@given(matrices())
def test_kernel_is_saturated_and_annihilated(A):
    n = len(A[0])
    K = kernel_basis(A, n)
    for v in K.vectors():
        assert not np.any(np.array(A) @ np.array(v))
    assert saturate(K) == K
    assert K.rank == n - np.linalg.matrix_rank(np.array(A, dtype=float))


def test_saturate_content_division():
    assert saturate(Sublattice.span(2, [(2, 0)])) == Sublattice.span(2, [(1, 0)])


def test_saturate_idempotent_on_saturated():
    L = Sublattice.span(3, [(1, 2, 3), (0, 1, 1)])
    assert saturate(L) == L


def test_saturate_full_rank_gives_everything():
    # span{(2,2),(0,4)} has full rank, so its saturation is ZZ^2
    assert saturate(Sublattice.span(2, [(2, 2), (0, 4)])) == Sublattice.full(2)


@given(matrices())
def test_saturate_properties(A):
    n = len(A[0])
    L = Sublattice.span(n, A)
    S = saturate(L)
    assert saturate(S) == S
    assert S.rank == L.rank
    for v in L.vectors():
        assert S.contains(v)
    assert quotient_invariants(n, S).torsion == ()


def test_quotient_full():
    assert quotient_invariants(2, Sublattice.full(2)).is_trivial


def test_quotient_free():
    assert quotient_invariants(2, Sublattice.span(2, [(1, 0)])) == AbelianInvariants(1, ())


def test_quotient_torsion_chain():
    assert quotient_invariants(2, Sublattice.span(2, [(2, 0), (0, 3)])) == AbelianInvariants(0, (6,))


def test_invariants_reject_bad_chain():
    with pytest.raises(ValueError):
        AbelianInvariants(0, (2, 3))


@given(matrices())
def test_solve_integer_round_trip(A):
    n = len(A[0])
    x = [[(i * 7 + 3) % 5 - 2] for i in range(n)]
    b = (np.array(A) @ np.array(x)).tolist()
    X = solve_integer(A, b)
    assert X is not None
    assert np.array_equal(np.array(A) @ X.to_numpy(), np.array(b))


def test_solve_integer_detects_no_solution():
    assert solve_integer([[2]], [[1]]) is None
    assert solve_rational([[2]], [[1]]) == [[Fraction(1, 2)]]


def test_subquotient_cyclic():
    Q = Subquotient(2, IntMatrix.from_rows([(1, 0), (0, 1)]), IntMatrix.from_rows([(2, 0), (0, 3)]))
    assert Q.invariants == AbelianInvariants(0, (6,))
