import pytest


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:  # pragma: no cover
        return
    lines = test_acceptance.RESULTS
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok in sorted(lines):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  [{number}] {title}")
