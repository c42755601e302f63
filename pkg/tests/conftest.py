import re
from collections import defaultdict

import numpy as np
import pytest
from hypothesis import strategies as st

from creditcycle import PRIMER, characteristic_roots, cycle_points
from creditcycle.params import ModelParams


@pytest.fixture(scope="session")
def primer():
    return PRIMER


@pytest.fixture(scope="session")
def roots():
    return characteristic_roots(PRIMER)


@pytest.fixture(scope="session")
def points():
    return cycle_points(PRIMER)


# Above this the option term K s^beta leaves double range for large F.
BETA_MAX = 20.0


def param_strategy(beta_min: float = 1.0, beta_max: float = BETA_MAX):
    """Economically sensible parameter draws with beta_min <= beta_plus <= beta_max."""
    params = st.builds(
        ModelParams,
        r=st.floats(0.005, 0.15),
        delta=st.floats(0.005, 0.15),
        a=st.floats(-0.03, 0.08),
        sigma=st.floats(0.05, 0.5),
        F=st.floats(1.0, 1000.0),
        s0=st.floats(0.5, 50.0),
    )
    return params.filter(lambda p: beta_min <= characteristic_roots(p).beta_plus <= beta_max)


def random_params(rng: np.random.Generator, n: int, beta_min: float = 1.05, beta_max: float = BETA_MAX):
    """Seeded draws for the acceptance sweeps."""
    out = []
    while len(out) < n:
        p = ModelParams(
            r=rng.uniform(0.01, 0.12),
            delta=rng.uniform(0.01, 0.12),
            a=rng.uniform(-0.02, 0.06),
            sigma=rng.uniform(0.05, 0.45),
            F=rng.uniform(10.0, 500.0),
            s0=rng.uniform(1.0, 20.0),
        )
        if beta_min <= characteristic_roots(p).beta_plus <= beta_max:
            out.append(p)
    return out


# -- acceptance summary: one line per criterion, from the real test outcomes --

_CRITERIA = defaultdict(list)
_NAME = re.compile(r"test_criterion_(\d+)([a-z]?)_(\w+)")


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    m = _NAME.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome != "passed":
        _CRITERIA[int(m.group(1))].append((m.group(3), report.outcome == "passed"))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        parts = _CRITERIA[n]
        ok = all(passed for _, passed in parts)
        detail = "; ".join(f"{name}={'PASS' if passed else 'FAIL'}" for name, passed in parts)
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  ({detail})")
