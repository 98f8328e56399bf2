from __future__ import annotations

import pytest
from hypothesis import settings

from cycleforge.scene import canonical_scene, specialize_scene

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def scene():
    return canonical_scene()


@pytest.fixture(scope="session")
def scene13(scene):
    return specialize_scene(scene, 13)


@pytest.fixture(scope="session")
def scene7(scene):
    return specialize_scene(scene, 7)


_ACCEPTANCE: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    n, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        _ACCEPTANCE[n] = (title, "PASS" if rep.passed else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title, status = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {status}  {title}")
