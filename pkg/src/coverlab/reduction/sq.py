"""Statistical-query reduction: enumerate every grid answer sequence of the
realizable learner, then evaluate the resulting candidates with tolerant queries."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor

import numpy as np

from ..core import DEFAULT_BUDGET, Hypothesis, InputError, ResourceError
from ..distributions import JointDistribution, risk
from ..learners import SQLearner
from ..losses import Loss


def response_grid(tau: float) -> list[float]:
    """``-1, -1 + 2 tau, ...`` up to 1; every value in ``[-1, 1]`` is within ``tau`` of the grid.

    When ``1/tau`` is an integer this has ``1/tau + 1`` points.  Otherwise 1 is
    appended so the top of the range stays covered.
    """
    if not 0 < tau <= 1:
        raise InputError("tau must lie in (0, 1]")
    t = Fraction(str(tau))
    k = floor(1 / t)
    grid = [-1 + 2 * t * j for j in range(k + 1)]
    if grid[-1] < 1 and 1 - grid[-1] > t:
        grid.append(Fraction(1))
    return [float(g) for g in grid]


class HonestOracle:
    """Exact expectations of bounded queries under a joint distribution."""

    def __init__(self, D: JointDistribution):
        self.D = D
        self.calls = 0

    def true_value(self, psi: np.ndarray) -> float:
        return float((self.D.P * np.asarray(psi, dtype=float)).sum())

    def __call__(self, psi: np.ndarray, tol: float) -> float:
        self.calls += 1
        return self.true_value(psi)


class AdversarialOracle(HonestOracle):
    """Answers each query at one end of its tolerance window.

    ``signs[i]`` picks the end for the ``i``-th call, cycling when the calls
    outnumber the signs.
    """

    def __init__(self, D: JointDistribution, signs):
        super().__init__(D)
        self.signs = list(signs)

    def __call__(self, psi: np.ndarray, tol: float) -> float:
        s = self.signs[self.calls % len(self.signs)] if self.signs else 0
        self.calls += 1
        return self.true_value(psi) + s * tol


def loss_query(h: Hypothesis, loss: Loss, n_points: int) -> np.ndarray:
    """``psi(x, y) = loss(h(x), y) / max loss``, a query with values in ``[0, 1]``."""
    L = loss.array / float(loss.upper)
    return np.array([L[h(x)] for x in range(n_points)])


@dataclass
class SQResult:
    hypothesis: Hypothesis
    cover: tuple[Hypothesis, ...]
    combinations: int
    estimates: np.ndarray = field(repr=False)
    index: int = 0


def sq_cover(learner: SQLearner, budget: int = DEFAULT_BUDGET) -> tuple[tuple[Hypothesis, ...], int]:
    """Learner outputs over every grid answer sequence, deduplicated and sorted."""
    grid = response_grid(learner.tau)
    combos = len(grid) ** learner.n_queries
    if combos > budget:
        raise ResourceError("SQ answer sequences", combos, budget)
    found = set()
    for answers in itertools.product(grid, repeat=learner.n_queries):
        it = iter(answers)
        # a learner may stop early; unused answers are ignored
        found.add(learner.run(lambda psi, tol, it=it: next(it)))
    return tuple(sorted(found)), combos


def sq_select(cover: tuple[Hypothesis, ...], oracle, tau: float, loss: Loss, n_points: int
              ) -> tuple[int, np.ndarray]:
    """Estimate each candidate's risk with tolerance ``tau/2`` and take the smallest."""
    est = np.array([oracle(loss_query(h, loss, n_points), tau / 2) for h in cover]) * float(loss.upper)
    return int(np.argmin(est)), est


def sq_reduce(learner: SQLearner, oracle, tau: float | None = None, eps: float | None = None,
              loss: Loss | None = None, n_points: int | None = None,
              budget: int = DEFAULT_BUDGET) -> SQResult:
    """Agnostic SQ learning from a realizable SQ learner.

    ``eps`` is carried for reporting; the achieved accuracy is the learner's own.
    """
    if tau is not None and abs(tau - learner.tau) > 1e-12:
        raise InputError("tau differs from the learner's tolerance")
    tau = learner.tau
    cover, combos = sq_cover(learner, budget)
    if n_points is None:
        n_points = len(cover[0])
    loss = loss or Loss.zero_one(max(2, max(max(h.labels) for h in cover) + 1))
    i, est = sq_select(cover, oracle, tau, loss, n_points)
    return SQResult(cover[i], cover, combos, est, i)


def sq_worst_case(learner: SQLearner, D: JointDistribution, loss: Loss, budget: int = DEFAULT_BUDGET):
    """Largest true risk the selection step can return over every extreme answer pattern.

    Each candidate's estimate is set to either end of its window; all
    ``2^|cover|`` patterns are enumerated.  Returns ``(worst risk, patterns, cover, answer sequences)``.
    """
    cover, combos = sq_cover(learner, budget)
    k = len(cover)
    if 2 ** k > budget:
        raise ResourceError("adversarial answer patterns", 2 ** k, budget)
    true = np.array([float(risk(h, D, loss)) for h in cover])
    half = learner.tau / 2 * float(loss.upper)
    worst = -np.inf
    for signs in itertools.product((-1.0, 1.0), repeat=k):
        est = true + half * np.array(signs)
        worst = max(worst, true[int(np.argmin(est))])
    return float(worst), 2 ** k, cover, combos
