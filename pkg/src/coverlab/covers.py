"""Uniform, non-uniform and fractional covers, conversions between them, and the
uniform/non-uniform separation experiment."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb, log
from typing import Callable, Sequence

import numpy as np

from .core import DEFAULT_BUDGET, Hypothesis, HypothesisClass, InputError, ResourceError, growth_function
from .distributions import Distribution, derive_seed, rng_for
from .learners import RealizableLearner
from .losses import Loss
from .reduction.cover import learning_to_cover

TOL = 1e-12


class PropertyViolation(AssertionError):
    """A construction broke a bound that must always hold."""


@dataclass
class CoverDistribution:
    """Seeded generator of finite hypothesis sets."""

    generate: Callable[[int], Sequence[Hypothesis]] = field(repr=False)
    size_bound: int | None = None
    name: str = "cover"

    def draw(self, seed: int) -> tuple[Hypothesis, ...]:
        return tuple(self.generate(seed))

    def draws(self, trials: int, seed: int):
        for i in range(trials):
            yield self.draw(derive_seed(seed, i))


@dataclass
class FractionalCover:
    """Seeded generator of single hypotheses, aiming to eps-cover each member with probability ``p``.

    ``law`` optionally lists ``(hypothesis, probability)`` so coverage can be
    checked exactly.
    """

    generate: Callable[[int], Hypothesis] = field(repr=False)
    eps: float
    p: float
    law: tuple[tuple[Hypothesis, float], ...] | None = None

    def draw(self, seed: int) -> Hypothesis:
        return self.generate(seed)

    @classmethod
    def from_law(cls, law: Sequence[tuple[Hypothesis, float]], eps: float, p: float) -> "FractionalCover":
        hs = [h for h, _ in law]
        w = np.array([float(q) for _, q in law])
        w = w / w.sum()
        cdf = np.cumsum(w)

        def gen(seed: int) -> Hypothesis:
            i = int(np.searchsorted(cdf, rng_for(seed).random(), side="right"))
            return hs[min(i, len(hs) - 1)]

        return cls(gen, eps, p, tuple(zip(hs, w.tolist())))


def _rows(hs) -> np.ndarray:
    if isinstance(hs, HypothesisClass):
        return hs.members
    if isinstance(hs, np.ndarray):
        return hs
    if len(hs) == 0:
        return np.zeros((0, 0), dtype=np.int64)
    return np.array([h.labels for h in hs], dtype=np.int64).reshape(len(hs), -1)


def distance_matrix(candidates, H, D: Distribution, loss: Loss) -> np.ndarray:
    """``M[c, h] = E_x loss(c(x), h(x))`` under marginal ``D``."""
    C, R = _rows(candidates), _rows(H)
    if C.shape[0] == 0:
        return np.zeros((0, R.shape[0]))
    L = loss.array
    return (L[C[:, None, :], R[None, :, :]] * D.p[None, None, :]).sum(axis=2)


def is_eps_cover(C, H, D: Distribution, eps: float, loss: Loss) -> tuple[bool, int | None]:
    """Exact check; on failure also returns the first uncovered member index."""
    M = distance_matrix(C, H, D, loss)
    covered = (M <= eps + TOL).any(axis=0) if M.shape[0] else np.zeros(len(_rows(H)), dtype=bool)
    miss = np.flatnonzero(~covered)
    return (True, None) if miss.size == 0 else (False, int(miss[0]))


@dataclass
class CoverageEstimate:
    per_member: np.ndarray
    uniform: float
    trials: int
    sizes: list[int]

    @property
    def min_member(self) -> float:
        return float(self.per_member.min()) if self.per_member.size else 1.0


def estimate_nonuniform(gen: CoverDistribution, H, D: Distribution, eps: float, loss: Loss,
                        trials: int, seed: int) -> CoverageEstimate:
    """Per-member frequency of containing an eps-close element, and of covering everyone at once."""
    if trials < 1:
        raise InputError("trials must be at least 1")
    R = _rows(H)
    hits = np.zeros(R.shape[0])
    uniform = 0
    sizes = []
    for C in gen.draws(trials, seed):
        sizes.append(len(C))
        cov = (distance_matrix(C, R, D, loss) <= eps + TOL).any(axis=0)
        hits += cov
        uniform += bool(cov.all())
    return CoverageEstimate(hits / trials, uniform / trials, trials, sizes)


# conversions


def frac_draw_count(p: float, delta: float) -> int:
    """``ceil(log_{1/(1-p)}(1/delta))``."""
    if not 0 < p < 1:
        raise InputError("p must lie in (0, 1)")
    if not 0 < delta < 1:
        raise InputError("delta must lie in (0, 1)")
    return max(1, ceil(log(1 / delta) / log(1 / (1 - p)) - 1e-12))


def frac_to_nonuniform(f: FractionalCover, p: float, delta: float) -> CoverDistribution:
    """Collect ``ceil(log_{1/(1-p)}(1/delta))`` independent fractional draws into one set."""
    t = frac_draw_count(p, delta)

    def gen(seed: int):
        return sorted({f.draw(derive_seed(seed, j)) for j in range(t)})

    return CoverDistribution(gen, t, f"frac-to-nonuniform[{t}]")


def nonuniform_to_frac(gen: CoverDistribution, k: int, eps: float = 0.0) -> FractionalCover:
    """Draw a cover and return a uniformly random member; target ``p = 1/(2k)``."""
    if k < 1:
        raise InputError("size bound must be positive")

    def one(seed: int) -> Hypothesis:
        for attempt in range(2):
            C = gen.draw(derive_seed(seed, attempt))
            if C:
                return C[int(rng_for(derive_seed(seed, 2)).integers(len(C)))]
        raise InputError("cover generator returned an empty set twice")

    return FractionalCover(one, eps, 1 / (2 * k))


def fractional_coverage(f: FractionalCover, H, D: Distribution, loss: Loss,
                        trials: int = 0, seed: int = 0) -> np.ndarray:
    """Per-member probability that a draw is ``f.eps``-close: exact from ``law``, else Monte Carlo."""
    R = _rows(H)
    if f.law is not None:
        hs = [h for h, _ in f.law]
        w = np.array([q for _, q in f.law])
        M = distance_matrix(hs, R, D, loss) <= f.eps + TOL
        return w @ M
    if trials < 1:
        raise InputError("Monte Carlo coverage needs trials")
    hits = np.zeros(R.shape[0])
    for i in range(trials):
        h = f.draw(derive_seed(seed, i))
        hits += distance_matrix([h], R, D, loss)[0] <= f.eps + TOL
    return hits / trials


def cover_from_fractional(f: FractionalCover | None, p: float | None, eps: float, H, D: Distribution,
                          loss: Loss) -> list[Hypothesis]:
    """Greedy ``2 eps``-cover of ``H`` whose size is checked against ``ceil(1/p) + 1``.

    Each step adds the still-uncovered member whose ``2 eps``-ball holds the
    most uncovered members, so the chosen members also form a ``2 eps``-packing.
    ``p`` defaults to the fractional cover's target.
    """
    if p is None:
        p = f.p
    R = _rows(H)
    hs = [Hypothesis(tuple(r)) for r in R]
    M = distance_matrix(R, R, D, loss) <= 2 * eps + TOL
    uncovered = np.ones(len(hs), dtype=bool)
    chosen = []
    while uncovered.any():
        gain = (M[:, uncovered].sum(axis=1)) * uncovered
        i = int(np.argmax(gain))
        chosen.append(hs[i])
        uncovered &= ~M[i]
    bound = ceil(1 / p - 1e-12) + 1
    if len(chosen) > bound:
        raise PropertyViolation(f"greedy 2eps-cover has {len(chosen)} members, bound {bound}")
    return chosen


def max_packing(H, D: Distribution, radius: float, loss: Loss, budget: int = DEFAULT_BUDGET) -> list[int]:
    """Largest set of members pairwise more than ``radius`` apart (exhaustive branch and bound)."""
    R = _rows(H)
    M = distance_matrix(R, R, D, loss)
    close = (M <= radius + TOL) | (M.T <= radius + TOL)
    n = R.shape[0]
    best: list[int] = []
    steps = 0

    def grow(chosen: list[int], cand: list[int]):
        nonlocal best, steps
        steps += 1
        if steps > budget:
            raise ResourceError("packing search", steps, budget)
        if len(chosen) + len(cand) <= len(best):
            return
        if not cand:
            best = list(chosen)
            return
        v, rest = cand[0], cand[1:]
        grow(chosen + [v], [u for u in rest if not close[v, u]])
        grow(chosen, rest)

    grow([], list(range(n)))
    return best


# realizable learner to uniform cover


@dataclass
class UniformSizeReport:
    eps: float
    delta: float
    n_half: int
    growth: int
    delta_prime: float
    n: int
    ratio: float


def uniform_cover_size(A: RealizableLearner, H: HypothesisClass, eps: float, delta: float,
                       d: int | None = None) -> UniformSizeReport:
    """Sample size ``n(eps/2, delta')`` with ``delta' = delta / (2 Pi_H(n(eps/2, 1/2)))``."""
    n_half = A.n(eps / 2, 0.5)
    g = growth_function(H, n_half)
    dp = delta / (2 * g)
    n = A.n(eps / 2, dp)
    d = d if d is not None else 1
    return UniformSizeReport(eps, delta, n_half, g, dp, n, n * eps / (d * log(1 / eps) + log(1 / delta)))


def realizable_to_uniform(A: RealizableLearner, H: HypothesisClass, D: Distribution, eps: float,
                          delta: float) -> tuple[CoverDistribution, UniformSizeReport]:
    rep = uniform_cover_size(A, H, eps, delta)

    def gen(seed: int):
        return learning_to_cover(A, H, D.draw(rep.n, seed), seed).members

    return CoverDistribution(gen, growth_function(H, rep.n), "realizable-to-uniform"), rep


# separation of uniform and non-uniform covers


def separation_k(eps: float) -> int:
    return int(np.floor(1 / (2 * eps) + 1e-12))


def coupon_miss_probability(k: int, draws: int) -> Fraction:
    """Exact probability that ``draws`` uniform draws from ``k`` coupons miss at least one."""
    return sum((Fraction((-1) ** (j + 1) * comb(k, j)) * Fraction(k - j, k) ** draws
                for j in range(1, k + 1)), Fraction(0))


def separation_class(n: int) -> HypothesisClass:
    """All-zero member followed by the indicator of every single point."""
    return HypothesisClass.k_set_indicators(n, 1)


def claim_covering_count(n: int, k: int, C: Sequence[int], eps: float) -> int:
    """Number of ``k``-subsets ``T`` for which members ``C`` (indices into the separation
    class) form an eps-cover under the uniform law on ``T``."""
    H = separation_class(n)
    R = H.members
    sub = R[list(C)]
    limit = eps * k + 1e-9
    count = 0
    for T in itertools.combinations(range(n), k):
        cols = list(T)
        mism = (sub[:, None, cols] != R[None, :, cols]).sum(axis=2)
        if (mism <= limit).any(axis=0).all():
            count += 1
    return count


@dataclass
class SeparationReport:
    n: int
    k: int
    eps: float
    delta: float
    coupon_draws: int
    miss_probability: Fraction
    construction_draws: int
    per_member: np.ndarray
    uniform: float
    max_size: int
    claim_counts: list[tuple[tuple[int, ...], int, int]]


def construction_cover(n: int, T: Sequence[int], draws: int, seed: int) -> list[Hypothesis]:
    """Indicators of the sampled points plus the all-zero member."""
    H = separation_class(n)
    T = list(T)
    pts = np.asarray(T)[rng_for(seed).integers(len(T), size=draws)]
    return [H[0]] + [H[1 + int(i)] for i in sorted(set(pts.tolist()))]


def separation_experiment(n: int, eps: float, delta: float, trials: int, seed: int,
                          k: int | None = None, claim_sets: Sequence[Sequence[int]] = ()
                          ) -> SeparationReport:
    k = separation_k(eps) if k is None else k
    if n <= k:
        raise InputError("need n > k")
    draws = ceil(k * log(k) - 1e-12) if k > 1 else 1
    miss = coupon_miss_probability(k, draws)
    m = ceil(k * log(1 / delta) - 1e-12)
    H = separation_class(n)
    # target law: uniform on the first k points
    T = list(range(k))
    D = Distribution.uniform_on(n, T)
    gen = CoverDistribution(lambda s: construction_cover(n, T, m, s), k + 1, "separation")
    est = estimate_nonuniform(gen, H, D, eps, Loss.zero_one(2), trials, seed)
    claims = [(tuple(C), claim_covering_count(n, k, C, eps), comb(len(C), k)) for C in claim_sets]
    return SeparationReport(n, k, eps, delta, draws, miss, m, est.per_member, est.uniform,
                            max(est.sizes), claims)
