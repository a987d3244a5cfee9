"""Collects acceptance-criterion outcomes and prints one PASS/FAIL line per criterion."""

import pytest

CRITERIA = {
    1: "exact realization on the full grid",
    2: "depth within budget on the full grid",
    3: "d=3 edges/n^1.5 within 2x of its n=27 value",
    4: "depth-2 edges <= 0.75 trivial and <= 3n^2/log2 n",
    5: "n=729 depth-3 circuit smaller than trivial",
    6: "ring and ternary DFT identities",
    7: "mutants rejected by exact and randomized checks",
    8: "deterministic JSON and lossless round-trip",
}

_outcomes: dict[int, list[bool]] = {}
_details: dict[int, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): test backs acceptance criterion k")


@pytest.fixture
def detail(request):
    """Call ``detail(text)`` to attach a measured value to the test's criterion line."""
    marker = request.node.get_closest_marker("criterion")
    k = marker.args[0] if marker else None

    def note(text):
        if k is not None:
            _details.setdefault(k, []).append(text)
    return note


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    k = marker.args[0]
    if call.when == "setup" and call.excinfo is not None:
        _outcomes.setdefault(k, []).append(False)
    elif call.when == "call":
        _outcomes.setdefault(k, []).append(call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k, title in CRITERIA.items():
        results = _outcomes.get(k)
        if results is None:
            tr.write_line(f"criterion {k}: NOT RUN  {title}")
            continue
        status = "PASS" if all(results) else "FAIL"
        extra = "; ".join(_details.get(k, []))
        tr.write_line(f"criterion {k}: {status}  {title}" + (f"  [{extra}]" if extra else ""))
