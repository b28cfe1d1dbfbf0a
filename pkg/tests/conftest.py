import pytest

from psu3mobius.group_engine import PSU3
from psu3mobius.maximal_catalog import build_maximals, intersection_closure
from psu3mobius.moebius import closure_mu
from psu3mobius.subgroup_classes import ClassPoset, enumerate_all_classes


@pytest.fixture(scope="session")
def group():
    return PSU3(1)


@pytest.fixture(scope="session")
def table(group):
    return group.elements


@pytest.fixture(scope="session")
def catalog(group):
    return build_maximals(group)


@pytest.fixture(scope="session")
def closure(catalog):
    cl = intersection_closure(catalog)
    cl.classes
    return cl


@pytest.fixture(scope="session")
def mu(closure):
    return closure_mu(closure)


@pytest.fixture(scope="session")
def classes(group):
    return enumerate_all_classes(group)


@pytest.fixture(scope="session")
def class_poset(classes):
    return ClassPoset(classes)


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, msg = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {msg}")
