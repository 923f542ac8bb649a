"""Shared pytest wiring.

The only hook here echoes one `criterion N: PASS/FAIL` line per
acceptance check at the end of the run, keyed off the report status of
the `test_criterion_NN_*` tests.  Reading the status back from the
reports (rather than printing inside the tests) guarantees exactly one
line per criterion no matter where a failure happens — mid-assertion,
in a fixture, or during collection of a later test.
"""

import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    verdicts = {}
    for status, word in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(status, ()):
            hit = _CRITERION.search(getattr(report, "nodeid", ""))
            if hit:
                verdicts[int(hit.group(1))] = word
    if not verdicts:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(verdicts):
        terminalreporter.write_line(f"criterion {number}: {verdicts[number]}")
