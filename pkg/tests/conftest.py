"""Collects the acceptance verdicts and prints one line per criterion at the end of the run."""

import re

ACCEPTANCE: dict = {}


def record(criterion: str, ok: bool, detail: str = "") -> bool:
    prev = ACCEPTANCE.get(criterion)
    if prev is None:
        ACCEPTANCE[criterion] = [ok, [detail] if detail else []]
    else:
        prev[0] = prev[0] and ok
        if detail:
            prev[1].append(detail)
    return ok


def pytest_runtest_logreport(report):
    # a criterion test that dies before recording still counts as a failure
    hit = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if hit and report.failed:
        record(hit.group(1), False, f"{report.nodeid.split('::')[-1]} {report.when} failed")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (len(k.split()[0]), k)):
        ok, details = ACCEPTANCE[key]
        line = f"criterion {key}: {'PASS' if ok else 'FAIL'}"
        if details:
            line += " (" + "; ".join(details) + ")"
        terminalreporter.write_line(line)
