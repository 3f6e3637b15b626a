import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import builders  # noqa: E402


@pytest.fixture
def ppm2():
    return builders.ppm2()


@pytest.fixture
def ppm8():
    return builders.ppm8()


@pytest.fixture(scope="session")
def wav30():
    return builders.wav30()


@pytest.fixture
def csv3():
    return builders.csv3()


@pytest.fixture
def text3():
    return builders.text3()


@pytest.fixture
def fixture_dir(tmp_path):
    """The fixture artifacts written to disk under their artifact ids."""
    for make in (builders.ppm2, builders.ppm8, builders.wav30, builders.csv3, builders.text3,
                 builders.scene):
        a = make()
        (tmp_path / a.id).write_bytes(a.content)
    return tmp_path


# -- acceptance summary ------------------------------------------------------

_criteria: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    entry = _criteria.setdefault(number, [title, True])
    if report.failed or (report.when == "call" and report.skipped):
        entry[1] = False


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({title})")
