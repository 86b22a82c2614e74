import numpy as np
import pytest

_ACCEPTANCE: list[tuple[int, bool, str]] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion.

    Usage: ``with acceptance(3, "gain factors"): ...``. The line is printed
    immediately and repeated in the terminal summary.
    """
    class _Recorder:
        def __call__(self, number, title):
            return _Criterion(number, title)

    return _Recorder()


class _Criterion:
    def __init__(self, number, title):
        self.number, self.title = number, title

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        ok = exc_type is None
        line = f"criterion {self.number}: {'PASS' if ok else 'FAIL'} {self.title}"
        if not ok:
            line += f" ({exc_type.__name__}: {str(exc).splitlines()[0] if str(exc) else ''})"
        print(line)
        _ACCEPTANCE.append((self.number, ok, line))
        return False


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, _, line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)
