"""Shared pytest wiring: acceptance-criteria PASS/FAIL summary lines."""

import re

_CRITERION = re.compile(r"test_acceptance\.py::.*test_criterion_(\d+)_(\w+)")
_NOTE = re.compile(r"test_acceptance\.py::.*test_note_(\w+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    criteria = {}
    notes = {}
    for status, verdict in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            m = _CRITERION.search(nodeid)
            if m:
                num, name = int(m.group(1)), m.group(2)
                if verdict == "FAIL" or num not in criteria:
                    criteria[num] = (name, verdict)
                continue
            m = _NOTE.search(nodeid)
            if m:
                name = m.group(1)
                if verdict == "FAIL" or name not in notes:
                    notes[name] = verdict
    if not criteria and not notes:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for num in sorted(criteria):
        name, verdict = criteria[num]
        terminalreporter.write_line(f"CRITERION {num:2d} ({name}): {verdict}")
    for name in sorted(notes):
        terminalreporter.write_line(f"NOTE ({name}): {notes[name]}")
