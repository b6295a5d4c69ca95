import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from surgelens.laurent import LaurentPoly

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def polys(draw, nvars=None, max_terms=5, exp=5, coeff=9):
    n = draw(st.integers(1, 4)) if nvars is None else nvars
    terms = draw(
        st.lists(
            st.tuples(
                st.tuples(*[st.integers(-exp, exp) for _ in range(n)]),
                st.integers(-coeff, coeff),
            ),
            max_size=max_terms,
        )
    )
    return LaurentPoly(n, terms)


@pytest.fixture
def t():
    return LaurentPoly.var(0, 1)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for res in sorted(RESULTS, key=lambda r: r.number):
            terminalreporter.write_line(res.line())
