import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diffpoly.algebra import Subspace, adjoin_unit, find_idempotents, make_matrix_algebra, make_strict_upper
from diffpoly.commcalc import (
    ZERO_HASH,
    PreconditionError,
    TermBudgetExceeded,
    expand_lemma6,
    expand_lemma7,
    expand_lemma8,
    lemma9_expand,
    lemma10_solve,
    lemma11_rewrite,
)
from diffpoly.freealg import commutator_k, gens, multi_commutator

a, b, c = gens("a b c")
M2 = make_matrix_algebra(2, 2)
M3_5 = make_matrix_algebra(3, 5)
N4 = make_strict_upper(4, 5)


def test_lemma6_small_cases():
    c0 = expand_lemma6(0)
    assert c0.verified and c0.coefficients == {0: 1} and c0.lhs == a * b
    c1 = expand_lemma6(1)
    assert c1.coefficients == {0: 1, 1: 1}
    assert (a * b * c - c * a * b) == a * (b * c - c * b) + (a * c - c * a) * b == c1.lhs


def test_lemma6_coefficients_unique_and_binomial():
    for k in range(7):
        cert = expand_lemma6(k)
        assert cert.verified and cert.extra["unique"]
        assert cert.coefficients == {i: comb(k, i) for i in range(k + 1)}


def test_certificate_json_hash_is_zero_hash():
    cert = expand_lemma6(3)
    data = cert.to_json()
    assert data["difference_hash"] == ZERO_HASH and data["difference_is_zero_hash"]
    assert '"verified": true' in cert.dumps()


def test_lemma7_examples():
    assert expand_lemma7(0, 0).coefficients == {(): 1}
    assert expand_lemma7(0, 3).coefficients == {} and expand_lemma7(0, 3).verified
    for s in range(5):
        assert expand_lemma7(1, s).coefficients == {(s,): 1}
    cert = expand_lemma7(2, 2)
    assert cert.verified and cert.extra["weights_sum_to_s"]
    assert all(len(w) == 2 for w in cert.coefficients)


def test_lemma8_examples():
    one = expand_lemma8((2,), 2)
    seven = expand_lemma7(2, 2)
    assert one.coefficients == seven.coefficients and one.lhs == seven.lhs
    assert expand_lemma8((0, 0), 0).coefficients == {((), ()): 1}
    assert expand_lemma8((0, 0), 2).coefficients == {}
    cert = expand_lemma8((1, 1), 1)
    assert cert.verified
    assert cert.coefficients == {((0,), (1,)): 1, ((1,), (0,)): 1}


def test_lemma8_budget():
    with pytest.raises(TermBudgetExceeded):
        expand_lemma8((2, 2), 3, budget=10)


def test_lemma9_examples():
    (e,), (x1,) = gens("e"), gens("x1")
    cert = lemma9_expand((1,))
    assert cert.verified and cert.lhs == e * x1
    assert cert.rhs() == x1 * e + commutator_k(e, x1, 1)
    assert lemma9_expand((0,)).rhs() == e
    assert len(lemma9_expand((2, 1)).rhs_terms) == 6


def test_lemma9_coefficients_are_binomial_products():
    for ns in itertools.product(range(4), repeat=2):
        cert = lemma9_expand(ns)
        assert cert.verified
        for idx, v in cert.coefficients.items():
            assert v == comb(ns[0], idx[0]) * comb(ns[1], idx[1])


def test_certificates_evaluate_consistently():
    rng = np.random.default_rng(7)
    certs = [expand_lemma6(3), expand_lemma7(3, 2), expand_lemma8((1, 2), 2), lemma9_expand((2, 1))]
    # N4 has no unit for empty products, so values are drawn from N4 inside its hull
    H4 = adjoin_unit(N4)
    samplers = [
        (M3_5, lambda: M3_5.element(rng.integers(0, 5, 9).tolist())),
        (H4, lambda: H4.embed(N4.element(rng.integers(0, 5, N4.dim).tolist()))),
    ]
    for target, draw in samplers:
        for cert in certs:
            names = sorted(cert.lhs.generators())
            for _ in range(5):
                left, right = cert.evaluate_sides({g: draw() for g in names}, target)
                assert left == right


def test_lemma10_examples():
    E11, E12 = M2.basis("E11"), M2.basis("E12")
    sol = lemma10_solve(E11, [E12], [1])
    assert sol.solved and sol.residual_is_zero
    assert multi_commutator(E11, [E12], [1]) == E12
    assert sol.coefficients[(1,)] == E11 and sol.coefficients[(0,)].is_zero()
    z = lemma10_solve(M2.zero(), [E12], [2])
    assert all(r.is_zero() for r in z.coefficients.values())
    one = lemma10_solve(M2.one(), [E12, M2.basis("E21")], [1, 1])
    assert one.lhs.is_zero() and all(r.is_zero() for r in one.coefficients.values())


def test_lemma10_rejects_non_idempotent():
    with pytest.raises(PreconditionError):
        lemma10_solve(M2.basis("E12"), [M2.basis("E21")], [1])


def test_lemma10_restricted_space_may_be_unsolvable():
    sol = lemma10_solve(M2.basis("E11"), [M2.basis("E12")], [1], Subspace.zero(M2))
    assert not sol.solved and sol.finding


def test_lemma11_examples():
    E11, E12 = M2.basis("E11"), M2.basis("E12")
    r0 = lemma11_rewrite(E11, [E12], [0])
    assert r0.verified and len(r0.terms) == 1 and r0.terms[0].k == (0,)
    r1 = lemma11_rewrite(E11, [E12], [1])
    assert r1.verified and r1.bounds_ok and r1.target == E12
    assert lemma11_rewrite(M2.zero(), [E12], [2]).terms == []


def test_lemma11_terms_sum_to_target():
    E11, E12, E21 = M2.basis("E11"), M2.basis("E12"), M2.basis("E21")
    res = lemma11_rewrite(E11, [E12, E21], [1, 2])
    total = M2.zero()
    for t in res.terms:
        total = total + t.value([E12, E21])
    assert total == res.target == res.reconstructed


@settings(max_examples=30)
@given(st.data())
def test_lemma10_residual_is_zero(data):
    A = data.draw(st.sampled_from([M2, make_matrix_algebra(2, 3), make_matrix_algebra(3, 2)]))
    e = data.draw(st.sampled_from(find_idempotents(A)))
    n = data.draw(st.integers(1, 2))
    xs = [A.element(data.draw(st.lists(st.integers(0, A.modulus - 1), min_size=A.dim, max_size=A.dim))) for _ in range(n)]
    ks = data.draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    sol = lemma10_solve(e, xs, ks)
    assert sol.solved and sol.residual_is_zero
    rw = lemma11_rewrite(e, xs, ks)
    assert rw.verified and rw.bounds_ok
