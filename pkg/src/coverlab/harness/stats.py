"""Statistical slack for frequency assertions."""
from __future__ import annotations

from dataclasses import dataclass
from math import log, sqrt

from ..core import InputError

CONFIDENCE = 1e-4


def hoeffding_slack(trials: int, confidence: float = CONFIDENCE) -> float:
    """``sqrt(ln(1/confidence) / (2 trials))``."""
    if trials < 1:
        raise InputError("trials must be at least 1")
    return sqrt(log(1 / confidence) / (2 * trials))


def paired_slack(trials: int, comparisons: int, confidence: float = CONFIDENCE) -> float:
    """Two-sided slack for the difference of two frequencies, union-bounded over ``comparisons``."""
    if trials < 1 or comparisons < 1:
        raise InputError("need at least one trial and one comparison")
    return sqrt(2 * log(2 * comparisons / confidence) / trials)


@dataclass(frozen=True)
class HoeffdingResult:
    passed: bool
    frequency: float
    bound: float
    slack: float
    target: float


def hoeffding_check(successes: int, trials: int, target: float, confidence: float = CONFIDENCE
                    ) -> HoeffdingResult:
    """Pass iff ``successes / trials >= target - slack``; ``bound`` is ``target - slack``."""
    if not 0 <= successes <= trials:
        raise InputError("successes must lie in [0, trials]")
    slack = hoeffding_slack(trials, confidence)
    freq = successes / trials
    bound = target - slack
    return HoeffdingResult(freq >= bound - 1e-12, freq, bound, slack, target)


def mean_lower_bound(values, lo: float, hi: float, confidence: float = CONFIDENCE) -> float:
    """One-sided Hoeffding lower bound on the mean of ``values`` bounded in ``[lo, hi]``."""
    n = len(values)
    return sum(values) / n - (hi - lo) * hoeffding_slack(n, confidence)
