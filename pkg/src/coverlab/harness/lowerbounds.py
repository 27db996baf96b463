"""Lower-bound experiments: a loss without identity of indiscernibles, and an
adversary that pads the sample with clean points.

Both check the consequence for the shipped learners only; a statement about
every learner cannot be checked by running one.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import e, exp, lgamma, log

import numpy as np

from ..core import DEFAULT_BUDGET, HypothesisClass, InputError, LabelSpace, ResourceError
from ..distributions import derive_seed, rng_for
from ..learners import RealizableLearner, erm_learner
from ..losses import Loss
from .stats import CONFIDENCE, hoeffding_slack


def grid_ternary_loss(n: int, c) -> Loss:
    """Loss on pairs ``(b, r)`` in ``[n]^2`` stored at index ``b*n + r``: 0 when the first
    coordinates agree, 1 when only the second agrees, ``c`` otherwise."""
    k = n * n
    table = []
    for a in range(k):
        row = []
        for y in range(k):
            (b1, r1), (b2, r2) = divmod(a, n), divmod(y, n)
            row.append(0 if b1 == b2 else (1 if r1 == r2 else c))
        table.append(row)
    return Loss(tuple(tuple(r) for r in table), f"ternary[{n}]")


def first_coordinate_zero(k: int, n: int, budget: int = DEFAULT_BUDGET) -> HypothesisClass:
    """All maps ``[k] -> {0} x [n]`` over pair labels ``b*n + r``."""
    if n ** k > budget:
        raise ResourceError("first-coordinate-zero members", n ** k, budget)
    rows = np.array(list(itertools.product(range(n), repeat=k)), dtype=np.int64)
    names = [f"{b}{r}" if n == 2 else f"({b},{r})" for b in range(n) for r in range(n)]
    return HypothesisClass(rows, LabelSpace(tuple(names), tuple(range(n * n))))


@dataclass(frozen=True)
class TernaryReport:
    k: int
    m: int
    c: Fraction
    n: int
    expected: Fraction
    bar: float
    passed: bool
    meets_4e: bool


def ternary_expected_loss(k: int, m: int, learner: RealizableLearner, loss: Loss,
                          budget: int = DEFAULT_BUDGET) -> Fraction:
    """Exact ``E_f E_S E_x loss(A(S, f(S))(x), f(x))`` for ``f`` uniform over all labelings
    of ``[k]`` and ``S`` uniform over ``[k]^m``.

    Labels at unseen points are independent of the learner's output, so only
    the labels of the sampled points are enumerated.
    """
    K = len(loss)
    L = loss.table
    seqs = k ** m
    if seqs * K ** min(m, k) > budget:
        raise ResourceError("ternary enumeration", seqs * K ** min(m, k), budget)
    unseen_cost = [sum((Fraction(L[a][y]) for y in range(K)), Fraction(0)) / K for a in range(K)]
    total = Fraction(0)
    for S in itertools.product(range(k), repeat=m):
        seen = sorted(set(S))
        acc = Fraction(0)
        for labs in itertools.product(range(K), repeat=len(seen)):
            f = dict(zip(seen, labs))
            h = learner(np.array(S), np.array([f[x] for x in S]))
            for x in range(k):
                acc += Fraction(L[h(x)][f[x]]) if x in f else unseen_cost[h(x)]
        total += acc / (K ** len(seen) * k)
    return total / seqs


def ternary_lower_bound_experiment(k: int = 8, m: int = 2, c=3, learner: RealizableLearner | None = None,
                                   n: int = 2) -> TernaryReport:
    """Exact expected loss of ``learner`` (ERM by default) against the pass bar.

    With ``n = 2`` the bar is ``c/12`` and ``meets_4e`` reports ``c/(4e)``;
    with larger ``n`` the bar is ``(1 - 1/n)^3 c``.
    """
    if not k > 2 * m:
        raise InputError("need k > 2m")
    c = Fraction(c)
    loss = grid_ternary_loss(n, c)
    H = first_coordinate_zero(k, n)
    A = learner or erm_learner(H, loss)
    val = ternary_expected_loss(k, m, A, loss)
    bar = float(c) / 12 if n == 2 else (1 - 1 / n) ** 3 * float(c)
    return TernaryReport(k, m, c, n, val, bar, float(val) >= bar - 1e-9,
                         float(val) >= float(c) / (4 * e) - 1e-9)


def c_agnostic_k(m: int, n: int) -> int:
    """Smallest ``k`` with ``k > 2m / ln(n/(n-1))``."""
    return int(2 * m / log(n / (n - 1))) + 1


# sample-padding adversary


@dataclass(frozen=True)
class AddPointsReport:
    gamma: float
    gamma_prime: float
    c1: float
    n: int
    opt: float
    mean_error: float
    lower: float
    padded_fraction: float
    identical_padding: bool
    feasible_d1: float
    feasible_d2: float
    passed: bool | None


def _padding_target(n: int, gamma: float, gp: float) -> tuple[int, int, int]:
    top = int(round(2 * gp * n))
    total = int(round((1 + gamma) * n))
    return total - 2 * top, top, top


def _pad(counts: tuple[int, int, int], n: int, gamma: float, gp: float) -> tuple[int, int, int] | None:
    target = _padding_target(n, gamma, gp)
    if any(c > t for c, t in zip(counts, target)):
        return None
    return target


def _feasible_probability(n: int, p1: float, p2: float, cap: int) -> float:
    """``P(count(x1) <= cap and count(x2) <= cap)`` for ``n`` multinomial draws."""
    p0 = 1 - p1 - p2
    total = 0.0
    for a in range(cap + 1):
        for b in range(cap + 1):
            if a + b > n:
                break
            lg = (lgamma(n + 1) - lgamma(a + 1) - lgamma(b + 1) - lgamma(n - a - b + 1)
                  + a * log(p1) + b * log(p2) + (n - a - b) * log(p0))
            total += exp(lg)
    return total


def add_points_experiment(gamma: float, c1: float, learner: RealizableLearner | None = None,
                          trials: int = 10_000, seed: int = 0, n: int = 1000,
                          confidence: float = CONFIDENCE) -> AddPointsReport:
    """Two marginals swapping ``c1 gamma'`` and ``(1-c1) gamma'`` on ``x1, x2``, with
    ``gamma' = gamma/4``; the adversary pads both to ``2 gamma' n`` copies and the
    rest onto ``x`` so exactly ``gamma n`` points are added."""
    if not 0 <= gamma < 1 or not 0 < c1 < 0.5:
        raise InputError("need gamma in [0, 1) and c1 in (0, 1/2)")
    gp = gamma / 4
    H = HypothesisClass.explicit([(0, 0, 0), (0, 1, 1)])
    f = (0, 0, 1)
    A = learner or erm_learner(H, Loss.zero_one(2))
    opt = c1 * gp
    if gp == 0:
        return AddPointsReport(gamma, gp, c1, n, 0.0, 0.0, 0.0, 1.0, True, 1.0, 1.0, None)
    laws = [(1 - gp, c1 * gp, (1 - c1) * gp), (1 - gp, (1 - c1) * gp, c1 * gp)]
    errors = []
    padded = 0
    for t in range(trials):
        s = derive_seed(seed, t)
        which = int(rng_for(derive_seed(s, 0)).integers(2))
        law = laws[which]
        counts = tuple(int(v) for v in rng_for(derive_seed(s, 1)).multinomial(n, law))
        comp = _pad(counts, n, gamma, gp)
        if comp is None:
            # padding out of reach: the adversary adds its points to x only
            comp = (counts[0] + int(round(gamma * n)), counts[1], counts[2])
        else:
            padded += 1
        pts = np.repeat(np.arange(3), comp)
        ys = np.array([f[x] for x in pts])
        h = A(pts, ys)
        errors.append(sum(law[x] for x in range(3) if h(x) != f[x]))
    lower = float(np.mean(errors)) - gp * hoeffding_slack(trials, confidence)
    target = _padding_target(n, gamma, gp)
    # every feasible sample pads to the same composition under either marginal
    identical = all(_pad((n - a - b, a, b), n, gamma, gp) == target
                    for a in range(target[1] + 1) for b in range(target[2] + 1))
    f1 = _feasible_probability(n, laws[0][1], laws[0][2], target[1])
    f2 = _feasible_probability(n, laws[1][1], laws[1][2], target[2])
    return AddPointsReport(gamma, gp, c1, n, opt, float(np.mean(errors)), lower, padded / trials,
                           identical, f1, f2, lower >= 2 * opt)
