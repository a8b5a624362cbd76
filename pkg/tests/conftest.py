import pytest

VERDICT_LINES = []


@pytest.fixture
def report():
    """Record a one-line verdict that is echoed again in the terminal summary."""
    def emit(name, ok, detail=""):
        line = f"{name}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else "")
        print(line)
        VERDICT_LINES.append(line)
    return emit


def pytest_terminal_summary(terminalreporter):
    if VERDICT_LINES:
        terminalreporter.section("acceptance")
        for line in VERDICT_LINES:
            terminalreporter.write_line(line)
