import sys
from contextlib import contextmanager
from pathlib import Path

import pytest

from onionlearn import _kernels

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE = []


@pytest.fixture(params=sorted(_kernels.backends()))
def backend(request, monkeypatch):
    """Run a test once per importable kernel backend."""
    impl = _kernels.backends()[request.param]
    for name in ("hull_indices", "peel_layers", "shift_distances"):
        monkeypatch.setattr(_kernels, name, getattr(impl, name))
    return request.param


@pytest.fixture
def criterion():
    """Context manager recording a PASS/FAIL line for an acceptance criterion."""

    @contextmanager
    def record(number, title):
        try:
            yield
        except BaseException as exc:
            _ACCEPTANCE.append((number, title, "FAIL", f"{type(exc).__name__}: {exc}".splitlines()[0]))
            raise
        _ACCEPTANCE.append((number, title, "PASS", ""))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, status, detail in sorted(_ACCEPTANCE):
        line = f"[{status}] {number}. {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
