import numpy as np
import pytest

from circlepattern import surfaces
from circlepattern.covering import derived_cover, homology_voltages, unwrap


@pytest.fixture(scope="session")
def torus():
    return surfaces.one_vertex_torus()


@pytest.fixture(scope="session")
def tetra():
    return surfaces.tetrahedron()


@pytest.fixture(scope="session")
def genus2():
    return surfaces.one_vertex_surface(2)


@pytest.fixture(scope="session")
def torus_cover(torus):
    return unwrap(torus)


@pytest.fixture(scope="session")
def torus_cover_p2(torus):
    return derived_cover(torus, homology_voltages(torus, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# ---------------------------------------------------------------------------
# acceptance summary: one PASS/FAIL line per criterion at the end of the run

_ACCEPTANCE = {}


@pytest.fixture
def record(request):
    """Attach a one-line measurement summary to the running criterion test."""

    def _record(detail):
        request.node.user_properties.append(("acceptance_detail", detail))

    return _record


def pytest_runtest_logreport(report):
    marker = dict(report.user_properties).get("acceptance_criterion")
    if marker is None or report.when != "call" and not report.failed:
        return
    number, title = marker
    detail = dict(report.user_properties).get("acceptance_detail", "")
    prev = _ACCEPTANCE.get(number)
    passed = report.passed and (prev is None or prev[1])
    _ACCEPTANCE[number] = (title, passed, detail or (prev[2] if prev else ""))


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            item.user_properties.append(("acceptance_criterion", tuple(m.args)))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, passed, detail = _ACCEPTANCE[number]
        tr.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:2d}  {title}: {detail}")
    n_pass = sum(1 for _, ok, _ in _ACCEPTANCE.values() if ok)
    tr.write_line(f"{n_pass}/{len(_ACCEPTANCE)} criteria pass")
