import pytest
from hypothesis import settings
from hypothesis import strategies as st

from clusterqp.fixture import load_fixture
from clusterqp.laurent import LaurentPoly

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def laurent_polys(nvars=3, max_terms=4, exp=2, coeff=5):
    term = st.tuples(st.tuples(*[st.integers(-exp, exp)] * nvars), st.integers(-coeff, coeff))
    return st.lists(term, max_size=max_terms).map(lambda ts: LaurentPoly(nvars, _merge(ts)))


def _merge(ts):
    out = {}
    for e, c in ts:
        out[e] = out.get(e, 0) + c
    return out


@pytest.fixture(scope="session")
def labardini():
    return load_fixture("labardini")


@pytest.fixture(scope="session")
def a2():
    return load_fixture("a2")


@pytest.fixture(scope="session")
def a3():
    return load_fixture("a3")


_ACCEPTANCE: list[tuple[str, str, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::test_criterion" in report.nodeid:
        detail = dict(report.user_properties).get("detail", "")
        _ACCEPTANCE.append((report.nodeid.split("[")[-1].rstrip("]"), report.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, outcome, detail in sorted(_ACCEPTANCE, key=lambda r: int(r[0])):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {int(num):2d}: {verdict}  {detail}")
