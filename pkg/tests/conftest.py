import re

import numpy as np
import pytest

from piecewise_pareto.distributions import FamilyParams, sample
from piecewise_pareto.sample_stats import build_sample

# family, alpha, beta used for synthetic data across the suite
SYNTH = [
    ("uni", 2.0, None),
    ("pow", 2.0, -0.5),
    ("pow", 2.0, 1.0),
    ("forced-pow", 2.0, None),
    ("exp", 2.0, -0.5),
    ("exp", 2.0, 1.0),
    ("forced-exp", 2.0, None),
    ("alg", 2.0, 1.0),
    ("forced-alg", 2.0, None),
]


def synth(family, alpha, beta, n, seed, x_min=10.0):
    return build_sample(sample(FamilyParams(family, alpha, beta, x_min), n, seed))


@pytest.fixture
def synth_sample():
    return synth


_criteria = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    num = int(m.group(1))
    ok = report.passed if report.when == "call" else not report.failed
    prev = _criteria.get(num, (True, m.group(2)))
    _criteria[num] = (prev[0] and ok, prev[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        ok, name = _criteria[num]
        terminalreporter.write_line(f"criterion {num:2d} {name.replace('_', ' ')}: {'PASS' if ok else 'FAIL'}")
