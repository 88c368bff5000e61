from contextlib import contextmanager

import pytest

_RESULTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_RESULTS] = []


@pytest.fixture
def criterion(request):
    """Context manager recording one acceptance criterion as PASS or FAIL.

    The body may put a short ``detail`` string into the yielded dict; it is
    shown next to the verdict in the terminal summary.
    """
    results = request.config.stash[_RESULTS]

    @contextmanager
    def record(number: int, title: str):
        note = {"detail": ""}
        try:
            yield note
        except BaseException as exc:
            reason = note["detail"] or (str(exc).splitlines() or [type(exc).__name__])[0]
            results.append((number, "FAIL", title, reason[:160]))
            raise
        results.append((number, "PASS", title, note["detail"]))

    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS, [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number, verdict, title, detail in sorted(results):
        line = f"{verdict} criterion {number:>2}: {title}"
        terminalreporter.write_line(line + (f" -- {detail}" if detail else ""))
