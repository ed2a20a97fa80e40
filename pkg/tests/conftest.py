from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# Acceptance criteria: tests tagged ``@pytest.mark.criterion(k, title)`` are
# grouped by k and reported as one PASS/FAIL line each.  An expected failure
# counts as FAIL so that a known gap is never shown as met.
_CRITERIA: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k, title): acceptance criterion k")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        k, title = mark.args
        ok = rep.passed and not hasattr(rep, "wasxfail")
        _CRITERIA.setdefault(k, [title, []])[1].append((item.name, ok))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        title, results = _CRITERIA[k]
        ok = all(r for _, r in results)
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {k:2d}: {title}"
        failed = [name for name, r in results if not r]
        if failed:
            line += f"  (not met: {', '.join(failed)})"
        terminalreporter.write_line(line)
