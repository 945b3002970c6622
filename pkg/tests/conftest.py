import pytest

from poncelet.conics import ConfocalFamily
from poncelet.fixtures import all_fixtures, elliptic_fixtures, periodic_fixtures

# criterion number -> list of (test name, passed)
_ACCEPTANCE: dict[int, list[tuple[str, bool]]] = {}
_TITLES: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): one part of an acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    _TITLES[number] = title
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        # an expected failure is still a failed criterion
        ok = rep.passed and not hasattr(rep, "wasxfail")
        _ACCEPTANCE.setdefault(number, []).append((item.name, ok))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        parts = _ACCEPTANCE[number]
        ok = all(p for _, p in parts)
        tr.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {_TITLES[number]}")
        for name, p in parts:
            if not p:
                tr.write_line(f"    failing part: {name}")


@pytest.fixture(scope="session")
def family21():
    return ConfocalFamily(2.0, 1.0)


@pytest.fixture(params=periodic_fixtures(), ids=lambda fx: fx.ident)
def periodic_fixture(request):
    return request.param


@pytest.fixture(params=elliptic_fixtures(), ids=lambda fx: fx.ident)
def elliptic_fixture(request):
    return request.param


@pytest.fixture(params=all_fixtures(), ids=lambda fx: fx.ident)
def any_fixture(request):
    return request.param
