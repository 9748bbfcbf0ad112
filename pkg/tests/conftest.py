import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from indirect_control import _kernels  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=sorted(_kernels.BACKENDS))
def backend(request):
    """Run the test once per available kernel backend."""
    previous = _kernels.backend()
    _kernels.set_backend(request.param)
    yield request.param
    _kernels.set_backend(previous)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test belongs to")
    config._acceptance = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (rep.when != "call" and rep.passed):
        return
    results = item.config._acceptance.setdefault(marker.args[0], {})
    if rep.when == "call" or rep.failed:
        results[item.name] = results.get(item.name, True) and rep.passed


def pytest_terminal_summary(terminalreporter, config):
    results = getattr(config, "_acceptance", {})
    if not results:
        return
    titles = getattr(sys.modules.get("test_acceptance"), "TITLES", {})
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        tests = results[key]
        ok = all(tests.values())
        failing = [name for name, passed in tests.items() if not passed]
        line = f"criterion {key}: {'PASS' if ok else 'FAIL'}  {titles.get(key, '')}"
        if failing:
            line += f"  (failing: {', '.join(failing)})"
        terminalreporter.write_line(line)
