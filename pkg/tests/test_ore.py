import itertools

import pytest
from hypothesis import given, strategies as st

from diffpoly.algebra import Subspace, adjoin_unit, inner_derivation, make_strict_upper
from diffpoly.freealg import commutator_k
from diffpoly.ore import (
    DerivationTower,
    InternalConsistencyError,
    OrePoly,
    Prod,
    Sum,
    TowerError,
    Var,
    coefficients_over_R,
    extend_derivation,
    from_left_form,
    lemma12_rewrite,
    multidegrees_upto,
    ore_mul,
    ore_normalize,
    parse_orepoly,
    to_left_form,
)

N3 = make_strict_upper(3, 2)
H3 = adjoin_unit(N3)
INNER = DerivationTower.build(N3, [inner_derivation(H3.basis("E12"))], hull=H3)
ZERO2 = DerivationTower.build(make_strict_upper(3, 3), [None, None])


def _tower_z3(dvals, xval):
    R = make_strict_upper(3, 3)
    H = adjoin_unit(R)
    u, v = H.basis("E12"), H.basis("E23")
    ds = [inner_derivation(x) if x is not None else None for x in dvals(u, v)]
    return DerivationTower.build(R, ds, {(1, 0): xval(H, u, v)}, H)


TWO_LEVEL = _tower_z3(lambda u, v: (u, v), lambda H, u, v: v * u - u * v + H.one())
CENTRAL_X = _tower_z3(lambda u, v: (None, None), lambda H, u, v: H.one())
INCOMPATIBLE = _tower_z3(lambda u, v: (u, v), lambda H, u, v: u)

TOWERS = [INNER, ZERO2, TWO_LEVEL, CENTRAL_X]


@st.composite
def ore_elems(draw, tower, max_deg=2, max_terms=3):
    H = tower.hull
    degs = multidegrees_upto([max_deg] * tower.n)
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        d = draw(st.sampled_from(degs))
        if sum(d) > max_deg:
            continue
        coords = draw(st.lists(st.integers(0, H.modulus - 1), min_size=H.dim, max_size=H.dim))
        terms[d] = H.element(coords)
    return OrePoly(tower, terms)


# examples ------------------------------------------------------------------------------------


def test_zero_derivation_commutes():
    T = DerivationTower.build(N3, [None])
    a = T.hull.embed(N3.basis("E12"))
    X = Var(0)
    assert ore_normalize(Prod(X, a), T) == T.monomial((1,), a)
    assert ore_normalize(Prod(a, X), T) == T.monomial((1,), a)
    assert ore_normalize(Prod(X, X), T) == T.monomial((2,))


def test_inner_derivation_rewrite():
    E23, E13 = H3.basis("E23"), H3.basis("E13")
    got = ore_normalize(Prod(E23, Var(0)), INNER)
    assert got == INNER.monomial((1,), E23) - INNER.const(E13)


def test_mul_examples():
    X = INNER.var(0)
    p = INNER.const(H3.basis("E12")) + X
    assert ore_mul(p, INNER.zero()).is_zero()
    T = DerivationTower.build(N3, [None])
    a, b = T.hull.basis("E12"), T.hull.basis("E23")
    assert (T.monomial((1,), a) * T.monomial((1,), b)) == T.monomial((2,), a * b)
    # a (X b) = X (ab) - d(a) b
    a, b = H3.basis("E23"), H3.one() + H3.basis("E12")
    lhs = INNER.const(a) * INNER.monomial((1,), b)
    assert lhs == INNER.monomial((1,), a * b) - INNER.const(INNER.d(0, a) * b)


def test_mul_rejects_foreign_tower():
    with pytest.raises(TowerError):
        ore_mul(INNER.one(), ZERO2.one())


def test_normalize_unknown_variable():
    with pytest.raises(ValueError):
        ore_normalize(Var(3), INNER)


def test_extend_derivation_examples():
    d = extend_derivation(ZERO2, 1)
    p = ZERO2.poly({(2, 0): ZERO2.hull.basis("E12"), (1, 0): ZERO2.hull.one()})
    assert d(p).is_zero()
    d2 = extend_derivation(CENTRAL_X, 1)
    X1 = CENTRAL_X.var(0)
    assert d2(X1 * X1) == X1 * 2
    with pytest.raises(TowerError):
        d2(CENTRAL_X.var(1))


def test_extend_derivation_restricts_on_R():
    for T in TOWERS:
        for i in range(T.n):
            d = extend_derivation(T, i)
            for r in T.base.basis_elements():
                a = T.hull.embed(r)
                assert d(T.const(a)) == T.const(T.d(i, a))


def test_compatible_towers_report_no_failures():
    for T in TOWERS:
        assert T.compatibility_failures() == []
    assert INCOMPATIBLE.compatibility_failures()


def test_incompatible_tower_breaks_associativity():
    T = INCOMPATIBLE
    gens = [T.var(0), T.var(1)] + [T.const(a) for a in T.hull.basis_elements()]
    broken = any((p * q) * r != p * (q * r) for p, q, r in itertools.product(gens, repeat=3))
    assert broken


def test_lemma12_examples():
    E23 = H3.basis("E23")
    term = INNER.monomial((1,), E23)
    X = INNER.var(0)
    res0 = lemma12_rewrite(term, 0, 0)
    assert res0.coefficients == term.terms
    res = lemma12_rewrite(term, 0, 1)
    direct = ore_normalize(Sum(Prod(term, X), Prod(-1, X, term)), INNER)
    assert res.coefficients == direct.terms
    T = DerivationTower.build(N3, [None])
    for i, k in itertools.product(range(3), range(1, 3)):
        assert lemma12_rewrite(T.monomial((i,), T.hull.basis("E13")), 0, k).coefficients == {}


def test_lemma12_membership_report():
    N = Subspace.span(H3, [H3.basis("E13")])
    res = lemma12_rewrite(INNER.monomial((1,), H3.basis("E23")), 0, 1, N)
    assert res.all_in_N
    with pytest.raises(ValueError):
        lemma12_rewrite(INNER.var(0) + INNER.one(), 0, 1)


def test_coefficients_over_R_examples():
    E12 = H3.basis("E12")
    assert coefficients_over_R(INNER.monomial((2,), E12)).lies_over_R
    assert coefficients_over_R(INNER.one()).verdicts == {(0,): "in-R*-only"}
    mixed = coefficients_over_R(INNER.monomial((1,), E12) + INNER.one())
    assert mixed.verdicts == {(1,): "in-R", (0,): "in-R*-only"}


def test_internal_consistency_error_is_runtime():
    assert issubclass(InternalConsistencyError, RuntimeError)


# properties ------------------------------------------------------------------------------------


@given(st.data())
def test_associativity(data):
    T = data.draw(st.sampled_from(TOWERS))
    p, q, r = (data.draw(ore_elems(T)) for _ in range(3))
    assert (p * q) * r == p * (q * r)


@given(st.data())
def test_structural_product_matches_rewriter(data):
    T = data.draw(st.sampled_from(TOWERS))
    p, q = data.draw(ore_elems(T)), data.draw(ore_elems(T))
    assert ore_normalize(Prod(p, q), T) == p * q


@given(st.data())
def test_normalize_independent_of_grouping(data):
    T = data.draw(st.sampled_from(TOWERS))
    atoms = st.one_of(st.sampled_from([Var(j) for j in range(T.n)]), st.sampled_from(T.hull.basis_elements()))
    word = data.draw(st.lists(atoms, min_size=1, max_size=5))
    cut = data.draw(st.integers(0, len(word)))
    flat = ore_normalize(Prod(*word), T)
    grouped = ore_normalize(Prod(Prod(*word[:cut]), Prod(*word[cut:])), T)
    stepwise = T.one()
    for w in word:
        stepwise = stepwise * (T.var(w.index) if isinstance(w, Var) else T.const(w))
    assert flat == grouped == stepwise


@given(st.data())
def test_extended_derivation_leibniz(data):
    T = data.draw(st.sampled_from([TWO_LEVEL, CENTRAL_X]))
    d = extend_derivation(T, 1)
    keep = lambda x: OrePoly(T, {k: v for k, v in x.terms.items() if k[1] == 0})  # noqa: E731
    p, q = keep(data.draw(ore_elems(T))), keep(data.draw(ore_elems(T)))
    assert d(p * q) == d(p) * q + p * d(q)


@given(st.data())
def test_zero_tower_matches_commutative_oracle(data):
    T = ZERO2
    p, q = data.draw(ore_elems(T)), data.draw(ore_elems(T))
    oracle = {}
    for (a, x), (b, y) in itertools.product(p.items(), q.items()):
        deg = tuple(i + j for i, j in zip(a, b))
        oracle[deg] = oracle.get(deg, T.hull.zero()) + x * y
    assert p * q == OrePoly(T, oracle)


@given(st.data())
def test_lemma12_degree_bound(data):
    T = data.draw(st.sampled_from(TOWERS))
    deg = data.draw(st.sampled_from(multidegrees_upto([2] * T.n)))
    a = data.draw(st.sampled_from(T.hull.basis_elements()))
    j = data.draw(st.integers(0, T.n - 1))
    k = data.draw(st.integers(0, 3))
    res = lemma12_rewrite(T.monomial(deg, a), j, k)
    assert all(all(x <= y for x, y in zip(d, deg)) for d in res.coefficients)
    assert res.coefficients == commutator_k(T.monomial(deg, a), T.var(j), k).terms


@given(st.data())
def test_left_form_round_trip(data):
    T = data.draw(st.sampled_from(TOWERS))
    p = data.draw(ore_elems(T))
    assert from_left_form(T, to_left_form(p)) == p


@given(st.data())
def test_text_round_trip(data):
    T = data.draw(st.sampled_from(TOWERS))
    p = data.draw(ore_elems(T))
    assert parse_orepoly(str(p), T) == p
