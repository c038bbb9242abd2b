import pytest
from hypothesis import HealthCheck, settings

from minorkit import library
from minorkit.duality import alter_ego_boolean, alter_ego_dl, alter_ego_median, alter_ego_mv, dualize

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def fig1():
    return library.fig1_lattice()


@pytest.fixture(scope="session")
def fig1_dual(fig1):
    return dualize(fig1, alter_ego_dl())


@pytest.fixture(scope="session")
def mv_example():
    return library.mv_product([2, 4, 4, 6])


@pytest.fixture(scope="session")
def mv_dual(mv_example):
    return dualize(mv_example, alter_ego_mv(12))


def boolean_dual(k):
    return dualize(library.boolean_algebra(k), alter_ego_boolean())


def boolean_lattice_dual(n):
    return dualize(library.dl_reduct(library.boolean_algebra(n)), alter_ego_dl())


def median_dual(k):
    return dualize(library.median_of_lattice(library.dl_reduct(library.boolean_algebra(k))), alter_ego_median())


_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    number, title = mark.args
    status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
    if rep.when == "call" or status != "PASS":
        _criteria[number] = (title, status)
        print(f"\ncriterion {number:2d} {status}: {title}")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, status = _criteria[number]
        terminalreporter.write_line(f"criterion {number:2d} {status}: {title}")
