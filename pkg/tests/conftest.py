import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from bbmstab.nonlinearity import HomogeneousNonlinearity

settings.register_profile("repo", deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
settings.load_profile("repo")

coef = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)


@st.composite
def nonlinearities(draw, p_max=6):
    p = draw(st.integers(min_value=1, max_value=p_max))
    cs = draw(st.lists(coef, min_size=p + 3, max_size=p + 3))
    # drop tiny coefficients so the random polynomial stays well scaled
    cs = [c if abs(c) > 1e-3 else 0.0 for c in cs]
    if not any(cs):
        cs[0] = 1.0
    return HomogeneousNonlinearity(p, tuple(cs))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one summary line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[n] = (bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
