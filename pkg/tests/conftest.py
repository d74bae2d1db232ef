import pytest

from robin_born.model import BoundaryImpulse, MediumParams, RobinCoefficient

# medium used for every figure: gamma in mm^2/ps, b in 1/ps
FIG_MEDIUM = MediumParams(gamma=0.06, b=0.001)
ORIGIN = BoundaryImpulse(0.0, 0.0, 0.0)
FIG_BETAS = (0.002, 0.005, 0.015)


@pytest.fixture
def medium():
    return FIG_MEDIUM


@pytest.fixture
def origin():
    return ORIGIN


@pytest.fixture(params=FIG_BETAS)
def fig_beta(request):
    return RobinCoefficient(request.param)


# acceptance lines, printed once at the end of the session
_ACCEPTANCE: dict[str, str] = {}


def record(key, title, ok, detail):
    _ACCEPTANCE[key] = f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {title} | {detail}"


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(_ACCEPTANCE, key=int):
            terminalreporter.write_line(_ACCEPTANCE[key])
