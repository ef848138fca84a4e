import re

import numpy as np
import pytest

_ACCEPTANCE: dict[str, list[tuple[str, str]]] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    name = report.nodeid.split("::")[-1]
    match = re.match(r"test_c(\d+)_", name)
    key = match.group(1).lstrip("0") if match else name
    _ACCEPTANCE.setdefault(key, []).append((name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: int(k) if k.isdigit() else 10**6):
        parts = _ACCEPTANCE[key]
        ok = all(outcome == "passed" for _, outcome in parts)
        failed = [n for n, outcome in parts if outcome != "passed"]
        detail = f" (failing: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}{detail}")
