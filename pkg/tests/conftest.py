from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# acceptance criterion -> (outcome, detail), filled from test reports
_CRITERIA: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        outcome = "PASS" if report.passed else "FAIL"
        _CRITERIA[props["criterion"]] = (outcome, props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda s: int(s.split()[0])):
        outcome, detail = _CRITERIA[name]
        line = f"criterion {name}: {outcome}"
        terminalreporter.write_line(f"{line} ({detail})" if detail else line)
