import pytest

from wsq import parse_spec
from wsq.constructor import corollary_not_sm, corollary_sm_not_dc

BATTERY_SPECS = [
    "gevrey:alpha=0.5",
    "gevrey:alpha=1",
    "gevrey:alpha=2",
    "gevrey:alpha=3",
    "qgevrey:q=2,sigma=2",
    "qgevrey:q=2,sigma=3",
    "power:tau=1,sigma=2",
    "power:tau=1,sigma=3",
    "qpp:q=2",
    "gevrey:alpha=2|hat",
    "gevrey:alpha=1|prod(gevrey:alpha=0.5)",
    "logpgevrey:alpha=1,beta=1",
]


def battery():
    seqs = [parse_spec(s) for s in BATTERY_SPECS]
    seqs.append(corollary_sm_not_dc(1.0))
    seqs.append(corollary_not_sm(0.0))
    return seqs


@pytest.fixture(scope="session")
def battery_seqs():
    return battery()


_criteria = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    key = name.split("_")[2]
    if report.when == "call" or (report.when == "setup" and report.failed):
        ok = report.passed
        _criteria[key] = _criteria.get(key, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=int):
        terminalreporter.write_line(f"criterion {key}: {'PASS' if _criteria[key] else 'FAIL'}")
