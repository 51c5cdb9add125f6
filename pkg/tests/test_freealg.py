import pytest
from hypothesis import given, strategies as st

from diffpoly.algebra import make_matrix_algebra
from diffpoly.freealg import (
    GeneratorId,
    NCPoly,
    commutator_k,
    evaluate,
    gen,
    gens,
    multi_commutator,
    nc_add,
    nc_mul,
    parse_ncpoly,
)

a, b, c = gens("a b c")
M3 = make_matrix_algebra(3, 2)


def test_additive_examples():
    assert nc_add(a, -a) == NCPoly.zero()
    assert nc_add(a * b + 2 * c, c) == a * b + 3 * c
    assert len(a + b) == 2


def test_multiplication_examples():
    assert a * b != b * a
    assert (a + b) * (a - b) == a * a - a * b + b * a - b * b
    assert NCPoly.one() * (a * b + c) == a * b + c


def test_commutator_examples():
    assert commutator_k(a, b, 0) == a
    assert commutator_k(a, b, 1) == a * b - b * a
    assert commutator_k(a, a, 1) == 0


def test_multi_commutator_examples():
    b1, b2 = gens("b1 b2")
    assert multi_commutator(a, [b1, b2], [0, 0]) == a
    for k in range(4):
        assert multi_commutator(a, [b], [k]) == commutator_k(a, b, k)
    direct = a * b1 * b2 - b1 * a * b2 - b2 * a * b1 + b2 * b1 * a
    got = multi_commutator(a, [b1, b2], [1, 1])
    assert got == direct and len(got) == 4


def test_multi_commutator_length_mismatch():
    with pytest.raises(ValueError):
        multi_commutator(a, [b], [1, 2])


def test_evaluate_examples():
    E12, E23, E13 = M3.basis("E12"), M3.basis("E23"), M3.basis("E13")
    assert evaluate(a * b - b * a, {"a": E12, "b": E23}, M3) == E13
    assert evaluate(NCPoly.zero(), {}, M3) == M3.zero()
    assert evaluate(a, {GeneratorId("a"): E12}, M3) == E12


def test_evaluate_missing_generator():
    with pytest.raises(ValueError):
        evaluate(a * b, {"a": M3.one()}, M3)


def test_generator_names():
    assert str(GeneratorId("x", 2)) == "x2"
    assert GeneratorId.parse("x2") == GeneratorId("x", 2)
    assert gen("x", 2) == gens("x2")[0]


# strategies -----------------------------------------------------------------------------

letters = st.sampled_from([GeneratorId(n) for n in "abc"])
words = st.lists(letters, max_size=4).map(tuple)
polys = st.dictionaries(words, st.integers(-3, 3), max_size=4).map(NCPoly)
matrices = st.lists(st.integers(0, 1), min_size=9, max_size=9).map(M3.element)


@given(polys, polys, polys)
def test_mul_associative(p, q, r):
    assert nc_mul(nc_mul(p, q), r) == nc_mul(p, nc_mul(q, r))


@given(polys, polys, matrices, matrices, matrices)
def test_evaluate_is_homomorphism(p, q, x, y, z):
    asg = {"a": x, "b": y, "c": z}
    assert evaluate(p * q, asg, M3) == evaluate(p, asg, M3) * evaluate(q, asg, M3)
    assert evaluate(p + q, asg, M3) == evaluate(p, asg, M3) + evaluate(q, asg, M3)


@given(polys, polys, st.integers(0, 4))
def test_commutator_is_iterated_bracket(p, q, k):
    it = p
    for _ in range(k):
        it = commutator_k(it, q, 1)
    assert commutator_k(p, q, k) == it


@given(polys, st.lists(polys, max_size=3))
def test_multi_commutator_zero_indices(p, qs):
    assert multi_commutator(p, qs, [0] * len(qs)) == p


@given(polys)
def test_text_round_trip(p):
    assert parse_ncpoly(str(p)) == p
