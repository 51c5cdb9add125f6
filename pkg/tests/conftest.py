import pytest
from hypothesis import settings

from diffpoly.algebra import adjoin_unit, inner_derivation, make_matrix_algebra, make_strict_upper
from diffpoly.ore import DerivationTower

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS: dict = {}


@pytest.fixture
def acceptance_record():
    def record(num: int, passed: bool, detail: str = ""):
        ACCEPTANCE_RESULTS[num] = (passed, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def m2():
    return make_matrix_algebra(2, 2)


@pytest.fixture(scope="session")
def m3():
    return make_matrix_algebra(3, 2)


@pytest.fixture(scope="session")
def n3():
    return make_strict_upper(3, 2)


@pytest.fixture(scope="session")
def tower2():
    """Two-level tower over N3(Z/3): inner derivations with a compatible d_2(X_1)."""
    R = make_strict_upper(3, 3)
    H = adjoin_unit(R)
    u, v = H.basis("E12"), H.basis("E23")
    return DerivationTower.build(R, [inner_derivation(u), inner_derivation(v)], {(1, 0): v * u - u * v + H.one()}, H)
