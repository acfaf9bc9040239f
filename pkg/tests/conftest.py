import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from report import LINES  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
