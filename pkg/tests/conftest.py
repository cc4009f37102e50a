import json
import sys
import os

import numpy as np
import pytest

from covpair import make_structure

ORACLE_PATH = os.path.join(os.path.dirname(__file__), "oracles", "oracles.json")


@pytest.fixture(scope="session")
def oracles():
    with open(ORACLE_PATH) as fh:
        return json.load(fh)


@pytest.fixture
def half():
    return make_structure(0.5, 0.5)


def random_structures(rng: np.random.Generator, count: int, margin: float = 0.05):
    """Uniform draws from the admissible (rho, sigma) region, kept `margin` inside it."""
    out = []
    while len(out) < count:
        sigma = rng.uniform(-1 + margin, 1 - margin)
        rho_max = np.sqrt(max((1 + sigma - margin) / 2, 0.0))
        rho = rng.uniform(-rho_max, rho_max)
        out.append(make_structure(rho, sigma))
    return out


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
