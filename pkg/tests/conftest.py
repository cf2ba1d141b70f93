import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("ci", max_examples=40, deadline=None)
settings.load_profile("ci")

_ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance(request):
    """Record one summary line per acceptance criterion."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, {})

    def record(number: int, ok: bool, detail: str) -> None:
        lines[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(lines[number])

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
