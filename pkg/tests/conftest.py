import pytest

from phasekit.fock import TruncationConfig
from phasekit.phase_states import build_phase_table
from phasekit.special import build_quadrature

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def cfg():
    return TruncationConfig(n_max=256, interior_margin=4)


@pytest.fixture(scope="session")
def small_cfg():
    return TruncationConfig(n_max=32, interior_margin=4)


@pytest.fixture(scope="session")
def grid():
    return build_quadrature(2048)


@pytest.fixture(scope="session")
def table(cfg, grid):
    return build_phase_table(cfg, grid)


@pytest.fixture(scope="session")
def small_table(small_cfg):
    return build_phase_table(small_cfg, build_quadrature(512))


@pytest.fixture
def record():
    """Record one acceptance line: record(criterion, passed, detail)."""
    def _record(criterion, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
