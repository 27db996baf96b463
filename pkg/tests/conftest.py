import itertools
import sys

import numpy as np
import pytest

from coverlab.core import HypothesisClass


def brute_growth(rows: np.ndarray, n: int) -> int:
    """Max distinct projections over every n-subset of columns, with no shortcuts."""
    best = 1 if n == 0 else 0
    for sub in itertools.combinations(range(rows.shape[1]), n):
        best = max(best, len({tuple(r[list(sub)]) for r in rows}))
    return best


@pytest.fixture
def thresholds10():
    return HypothesisClass.thresholds(10)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in mod.LINES:
            terminalreporter.write_line(line)
