import pytest

from misl import testkit
from misl.normalization import JudgeRoster, LookupTable


@pytest.fixture(scope="session")
def roster():
    return JudgeRoster.default()


@pytest.fixture(scope="session")
def lookup():
    return LookupTable.default()


@pytest.fixture(scope="session")
def corpus500():
    return testkit.generate_corpus(42, 500)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import REAL_CORPUS, RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(RESULTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
        terminalreporter.write_line(line)
    if not REAL_CORPUS:
        terminalreporter.write_line("SKIP criterion 7: needs a real corpus snapshot (MISL_REAL_CORPUS)")
