import pytest
from hypothesis import given, settings, strategies as st

from diffpoly.algebra import (
    SearchTooLargeError,
    Subspace,
    adjoin_unit,
    find_idempotents,
    inner_derivation,
    make_matrix_algebra,
    make_strict_upper,
    strip_unit,
    subalgebra_closure,
)
from diffpoly.commcalc import PreconditionError
from diffpoly.radical import (
    AUDIT_CHECKS,
    ScenarioError,
    TowerSpec,
    build_scenario,
    find_filtration,
    lemma13_check,
    lemma13_sets,
    truncated_idempotent_scan,
)
from diffpoly.specfiles import load_scenario

N2 = make_strict_upper(2, 2)
N3 = make_strict_upper(3, 2)
N4 = make_strict_upper(4, 2)
H3 = adjoin_unit(N3)
VALID = ["n2_zero", "n3_inner", "n3_zero2", "n3_tower2", "n3z3_tower2", "n3z3_grading"]


def test_filtration_examples():
    f0 = find_filtration(Subspace.zero(N3), N3)
    assert f0.h == 1 and f0.chain[1] == Subspace.full(N3)
    f = find_filtration(Subspace.full(N3))
    assert f.h <= 3 and f.check()
    assert f.chain[-1] == Subspace.full(N3)
    M2 = make_matrix_algebra(2, 2)
    with pytest.raises(PreconditionError):
        find_filtration(Subspace.span(M2, [M2.basis("E11")]))


def test_filtration_inside_hull():
    S = Subspace.span(H3, [H3.basis("E12"), H3.basis("E23")])
    S = subalgebra_closure(S.basis(), H3)
    f = find_filtration(S, H3)
    assert f.check() and f.chain[-1] == Subspace.full(H3)


def test_build_scenario_examples():
    zero = build_scenario(N3, TowerSpec([None, None]))
    assert zero.valid
    spec = TowerSpec([inner_derivation(H3.basis("E12")), None], {(1, 0): list(H3.one().coords)})
    assert build_scenario(N3, spec).valid
    leak = [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0]]  # E23 -> 1
    inst = build_scenario(N3, TowerSpec([leak]))
    check = inst.audit.get("restricts_to_R")
    assert not check.passed and check.witness == "E23"
    with pytest.raises(ScenarioError):
        build_scenario(N3, TowerSpec([leak]), strict=True)


def test_build_scenario_rejects_unital_base():
    with pytest.raises(ValueError):
        build_scenario(make_matrix_algebra(2, 2), TowerSpec([None]))


@pytest.mark.parametrize("name", VALID)
def test_valid_fixtures_pass_every_check(name):
    audit = load_scenario(f"bundled:{name}").audit
    assert [c.name for c in audit.checks] == list(AUDIT_CHECKS)
    assert audit.passed, str(audit)


@pytest.mark.parametrize(
    "name, check",
    [
        ("fail_leibniz", "leibniz"),
        ("fail_leak", "restricts_to_R"),
        ("fail_nilpotent", "locally_nilpotent"),
        ("fail_compat", "compatibility"),
    ],
)
def test_failing_fixture_isolates_its_check(name, check):
    audit = load_scenario(f"bundled:{name}").audit
    assert [c.name for c in audit.failures()] == [check]
    assert audit.get(check).witness


def test_malformed_x_values_raise_with_report():
    with pytest.raises(ScenarioError) as info:
        load_scenario("bundled:fail_xvalues")
    failed = info.value.report.failures()
    assert [c.name for c in failed] == ["x_values_in_R_star"]
    assert failed[0].witness == "d_2(X_1)"


def test_scan_examples():
    r3 = truncated_idempotent_scan(load_scenario("bundled:n3_inner"), 1)
    assert r3.candidates == 64 and r3.only_zero
    r2 = truncated_idempotent_scan(load_scenario("bundled:n2_zero"), 2)
    assert r2.candidates == 8 and r2.only_zero


@pytest.mark.parametrize("name", VALID)
def test_scan_at_degree_zero_matches_base_idempotents(name):
    inst = load_scenario(f"bundled:{name}")
    rep = truncated_idempotent_scan(inst, 0)
    assert rep.only_zero
    assert find_idempotents(inst.tower.base) == [inst.tower.base.zero()]


@pytest.mark.parametrize("name", ["n2_zero", "n3_inner", "n3_zero2", "n3_tower2"])
def test_scan_degree_one_on_small_fixtures(name):
    assert truncated_idempotent_scan(load_scenario(f"bundled:{name}"), 1).only_zero


def test_scan_refuses_oversize():
    with pytest.raises(SearchTooLargeError):
        truncated_idempotent_scan(load_scenario("bundled:n3_inner"), 6)


def test_lemma13_zero_element():
    v = lemma13_check(load_scenario("bundled:n3_tower2"))
    assert v.status == "e_is_zero" and v.e_direct_zero and v.passed


def test_lemma13_on_scanned_idempotents_inside_N4():
    R = N4
    H = adjoin_unit(R)
    inst = build_scenario(R, TowerSpec([inner_derivation(H.basis("E12"))]))
    assert inst.valid
    rep = truncated_idempotent_scan(inst, 0)
    for e in rep.idempotents:
        v = lemma13_check(inst.with_element(e, [1]))
        assert v.passed and v.e_direct_zero


def test_lemma13_refuses_genuine_idempotent():
    inst = load_scenario("bundled:m2_lemma13")
    assert inst.e() * inst.e() == inst.e() and not inst.e().is_zero()
    v = lemma13_check(inst)
    assert v.status == "hypothesis_failure" and not v.e_direct_zero
    H = inst.tower.hull
    N = Subspace.span(H, [H.basis("E12")])
    v2 = lemma13_check(inst, N)
    assert v2.status == "hypothesis_failure"


def test_lemma13_sets_for_genuine_idempotent():
    sets = lemma13_sets(load_scenario("bundled:m2_lemma13"))
    assert sets.C and sets.bound_violation is None


def test_lemma13_preconditions():
    inst = load_scenario("bundled:n3_inner")
    H = inst.tower.hull
    not_idem = inst.with_element(inst.tower.var(0), [1])
    with pytest.raises(PreconditionError):
        lemma13_check(not_idem)
    with pytest.raises(PreconditionError):
        lemma13_check(inst, Subspace.span(H, [H.one()]))


def test_lemma13_monotone_in_N():
    inst = load_scenario("bundled:n3_tower2")
    H = inst.tower.hull
    chain = [Subspace.zero(H), Subspace.span(H, [H.basis("E13")]), H.base_subspace()]
    statuses = [lemma13_check(inst, N).status for N in chain]
    assert statuses == ["e_is_zero"] * 3


@settings(max_examples=15)
@given(st.data())
def test_lemma13_never_passes_nonzero_idempotent(data):
    M = strip_unit(make_matrix_algebra(2, 2))
    inst = build_scenario(M, TowerSpec([None]))
    e_coeff = data.draw(st.sampled_from(find_idempotents(M)))
    deg = data.draw(st.integers(0, 1))
    e = inst.tower.monomial((deg,), e_coeff) if not e_coeff.is_zero() else inst.tower.zero()
    if e * e != e:
        return
    v = lemma13_check(inst.with_element(e, [1]))
    assert v.passed == e.is_zero()
    assert v.e_direct_zero == e.is_zero()
