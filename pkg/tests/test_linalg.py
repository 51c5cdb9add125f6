from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from diffpoly._linalg import QQ, PrimeField, is_prime, nullspace, rank, rref, solve

F5 = PrimeField(5)


def test_is_prime_small():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_composite_field_rejected():
    with pytest.raises(ValueError):
        PrimeField(4)


def test_rref_identity_and_rank():
    rows, piv = rref([[2, 4], [1, 3]], F5)
    assert piv == [0, 1]
    assert rows == [[1, 0], [0, 1]]
    assert rank([[1, 2], [2, 4]], F5) == 1


def test_solve_over_rationals():
    x = solve([[1, 1], [1, -1]], [3, 1], QQ)
    assert x == [Fraction(2), Fraction(1)]


def test_solve_inconsistent():
    assert solve([[1, 0]], [0, 1], F5) is None


def test_solve_sets_free_variables_to_zero():
    assert solve([[1, 0], [1, 0]], [3, 0], F5) == [3, 0]


matrices = st.lists(st.lists(st.integers(0, 4), min_size=4, max_size=4), min_size=1, max_size=5)


@given(matrices)
def test_nullspace_vectors_are_killed(rows):
    for v in nullspace(rows, 4, F5):
        assert all(sum(a * b for a, b in zip(r, v)) % 5 == 0 for r in rows)
    assert len(nullspace(rows, 4, F5)) + rank(rows, F5) == 4


@given(matrices, st.lists(st.integers(0, 4), min_size=5, max_size=5))
def test_solve_reproduces_target_when_in_span(rows, xs):
    cols = rows
    target = [sum(x * c[i] for x, c in zip(xs, cols)) % 5 for i in range(4)]
    sol = solve(cols, target, F5)
    assert sol is not None
    assert [sum(x * c[i] for x, c in zip(sol, cols)) % 5 for i in range(4)] == target
