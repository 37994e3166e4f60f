import pytest

_CRITERIA = []


class CriterionReport:
    """Collects one PASS/FAIL line per acceptance criterion."""

    def __call__(self, number, name, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number} ({name}): {detail}"
        _CRITERIA.append((number, line))
        print(line)
        return passed


@pytest.fixture(scope="session")
def criterion():
    return CriterionReport()


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_CRITERIA):
        terminalreporter.write_line(line)
