import pytest
from hypothesis import settings

# first calls pay for scipy/numpy warm-up; wall-clock deadlines only add flakiness
settings.register_profile("default", deadline=None)
settings.load_profile("default")

_VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_VERDICTS] = []


@pytest.fixture
def verdict(request):
    """Record one acceptance line: ``verdict(label, ok, detail)``."""
    lines = request.config.stash[_VERDICTS]

    def record(label: str, ok: bool, detail: str = "") -> bool:
        lines.append(f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else ""))
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
