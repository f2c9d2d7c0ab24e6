"""Shared fixtures, and one summary line per acceptance criterion.

Acceptance tests are named ``test_c<N>_...``; a criterion passes when every
test carrying its number passed.
"""

import re
from pathlib import Path

import pytest

from xmlsem_bridge.mapping import generate_mappings
from xmlsem_bridge.rdf import load_instance
from xmlsem_bridge.xs2owl import transform
from xmlsem_bridge.xsd_model import parse_schema
from xmlsem_bridge.xsd_paths import enumerate_paths

DATA = Path(__file__).parent / "data"

CRITERIA = {
    1: "XS2OWL golden (classes, properties, O_BC info individuals)",
    2: "mapping golden (17 mappings)",
    3: "translation golden (query listing AST)",
    4: "differential corpus, seed 7, 200 cases",
    5: "algebra laws (property tests)",
    6: "round trips: Turtle, mapping XML, XQuery",
    7: "error-path coverage with exit codes",
}

_NAME = re.compile(r"test_acceptance\.py::test_c(\d+)_")
_outcomes: dict = {}


def pytest_runtest_logreport(report):
    m = _NAME.search(report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or report.outcome != "passed":
        _outcomes.setdefault(n, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        results = _outcomes.get(n)
        if not results:
            status = "NOT RUN"
        elif all(r == "passed" for r in results):
            status = "PASS"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"criterion {n} [{title}]: {status}")


def read(name: str) -> str:
    return (DATA / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def fig6():
    """(schema, O_S, O_BC, catalog, generated mappings) for the video schema."""
    schema = parse_schema(read("fig6.xsd"))
    os_, obc = transform(schema)
    catalog = enumerate_paths(schema)
    return schema, os_, obc, catalog, generate_mappings(schema, os_, catalog)


@pytest.fixture(scope="session")
def videos3():
    return load_instance(read("videos3.xml"))
