"""Cover construction by running a realizable learner on every restriction."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import ceil, comb, log
from typing import Iterable

import numpy as np

from ..core import DEFAULT_BUDGET, STAR, Hypothesis, HypothesisClass, InputError, ResourceError, restriction_table
from ..distributions import LabeledSample, derive_seed
from ..learners import InconsistentSampleError, RealizableLearner

# named seed streams
STREAM_UNLABELED = 0
STREAM_LABELED = 1
STREAM_LEARNER = 2
STREAM_MECHANISM = 3
STREAM_SUBSET = 4


@dataclass(frozen=True)
class Cover:
    """Deduplicated learner outputs, sorted by label vector.

    ``provenance[i]`` is the ``(subset, restriction)`` pair that first
    produced ``members[i]``; ``runs`` counts every pair enumerated.
    """

    members: tuple[Hypothesis, ...]
    provenance: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    runs: int
    subsets: int = 1
    skipped: int = 0

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i: int) -> Hypothesis:
        return self.members[i]

    @property
    def array(self) -> np.ndarray:
        return np.array([h.labels for h in self.members], dtype=np.int64)

    def contains(self, h: Hypothesis) -> bool:
        return h in self.members


class _Collector:
    """Accumulates outputs and caches learner calls across subsets."""

    def __init__(self, A: RealizableLearner, seed: int, skip_inconsistent: bool):
        self.A = A
        self.seed = derive_seed(seed, STREAM_LEARNER)
        self.skip = skip_inconsistent
        self.found: dict[Hypothesis, tuple] = {}
        self.cache: dict[tuple, Hypothesis | None] = {}
        self.runs = 0
        self.skipped = 0

    def _key(self, pts: np.ndarray, ys: np.ndarray) -> tuple:
        if self.A.set_invariant:
            return tuple(sorted(set(zip(pts.tolist(), ys.tolist()))))
        return (tuple(pts.tolist()), tuple(ys.tolist()))

    def run(self, pts: np.ndarray, ys: np.ndarray, tag: tuple[int, ...]) -> None:
        self.runs += 1
        key = self._key(pts, ys)
        if key in self.cache:
            h = self.cache[key]
        else:
            try:
                h = self.A(pts, ys, self.seed)
            except InconsistentSampleError as e:
                if not self.skip:
                    err = InconsistentSampleError(
                        f"{e} (restriction {tuple(ys.tolist())} on {tuple(pts.tolist())})", pts, ys)
                    err.restriction = tuple(ys.tolist())
                    raise err from e
                h = None
            self.cache[key] = h
        if h is None:
            self.skipped += 1
            return
        if h not in self.found:
            self.found[h] = (tag, tuple(int(v) for v in ys))

    def cover_for(self, H: HypothesisClass, pts: np.ndarray, tag: tuple[int, ...]) -> None:
        rows, _ = restriction_table(H, pts)
        for r in rows:
            # an undefined label cannot be shown to a learner
            if (r == STAR).any():
                self.skipped += 1
                continue
            self.run(pts, r, tag)

    def result(self, subsets: int) -> Cover:
        if not self.found:
            # every restriction was skipped: fall back to the unconditioned output
            empty = np.zeros(0, dtype=np.int64)
            h = self.A(empty, empty, self.seed)
            self.found[h] = ((), ())
        order = sorted(self.found)
        return Cover(tuple(order), tuple(self.found[h] for h in order),
                     self.runs, subsets, self.skipped)


def learning_to_cover(A: RealizableLearner, H: HypothesisClass, S_U, seed: int = 0,
                      skip_inconsistent: bool = False) -> Cover:
    """One learner call per distinct restriction of ``H`` to ``S_U``."""
    pts = np.asarray(S_U, dtype=np.int64).reshape(-1)
    col = _Collector(A, seed, skip_inconsistent)
    col.cover_for(H, pts, tuple(range(pts.size)))
    return col.result(1)


def subset_count(n_points: int, mode: str, size: int | None = None) -> int:
    if mode == "fixed":
        return comb(n_points, size)
    if mode == "all":
        return 2 ** n_points
    raise InputError(f"unknown subset mode {mode!r}")


def fixed_subset_size(n: int, keep_fraction: float) -> int:
    return int(np.floor(keep_fraction * n + 1e-9))


def subsample_cover(A: RealizableLearner, H: HypothesisClass, S_U, keep_fraction: float | None = None,
                    seed: int = 0, mode: str = "fixed", budget: int = DEFAULT_BUDGET,
                    skip_inconsistent: bool = True, listed: Iterable | None = None) -> Cover:
    """Union of covers over subsets of ``S_U``.

    ``mode="fixed"`` enumerates positional subsets of size
    ``floor(keep_fraction * |S_U|)`` in lexicographic order.  ``mode="all"``
    enumerates every subset; when the learner only sees the set of labeled
    pairs, subsets of the distinct points are enough and that count is
    reported.  ``mode="listed"`` runs on the given point subsets only.
    """
    pts = np.asarray(S_U, dtype=np.int64).reshape(-1)
    col = _Collector(A, seed, skip_inconsistent)
    if mode == "fixed":
        if keep_fraction is None or not 0 <= keep_fraction <= 1:
            raise InputError("fixed mode needs keep_fraction in [0, 1]")
        size = fixed_subset_size(pts.size, keep_fraction)
        count = comb(pts.size, size)
        if count > budget:
            raise ResourceError(f"subsets of size {size} from {pts.size}", count, budget)
        subsets: Iterable = itertools.combinations(range(pts.size), size)
        base = pts
    elif mode == "all":
        base = np.unique(pts) if A.set_invariant else pts
        count = 2 ** base.size
        if count > budget:
            raise ResourceError(f"all subsets of {base.size} points", count, budget)
        subsets = itertools.chain.from_iterable(
            itertools.combinations(range(base.size), r) for r in range(base.size + 1))
    elif mode == "listed":
        if listed is None:
            raise InputError("listed mode needs explicit subsets")
        chosen = [np.asarray(t, dtype=np.int64).reshape(-1) for t in listed]
        count = len(chosen)
        if count > budget:
            raise ResourceError("listed subsets", count, budget)
        for t in chosen:
            col.cover_for(H, t, tuple(t.tolist()))
        return col.result(count)
    else:
        raise InputError(f"unknown subset mode {mode!r}")
    for sub in subsets:
        col.cover_for(H, base[list(sub)], tuple(sub))
    return col.result(count)


# sample sizes and selection


def labeled_sample_size(cover_size: int, eps: float, delta: float, bound: float = 1.0) -> int:
    """``ceil(2 B^2 ln(2|C|/delta) / eps^2)``: every cover member's empirical
    risk is within ``eps/2`` of its risk with probability ``1 - delta``."""
    if cover_size < 1:
        raise InputError("empty cover")
    B = float(bound)
    return ceil(2 * B * B * log(2 * cover_size / delta) / eps ** 2 - 1e-9)


def cost_tables(cover: Cover, L: np.ndarray, star_cost: float | None = None) -> np.ndarray:
    """``T[i, x, y] = loss(member_i(x), y)``; an undefined prediction costs ``star_cost``."""
    L = np.asarray(L, dtype=float)
    fill = L.max() if star_cost is None else star_cost
    # the undefined label is -1, so it picks the appended row
    ext = np.vstack([L, np.full((1, L.shape[1]), fill)])
    return ext[cover.array]


def sample_costs(tables: np.ndarray, S: LabeledSample) -> np.ndarray:
    """Summed cost of every cover member on ``S``."""
    if len(S) == 0:
        return np.zeros(tables.shape[0])
    return tables[:, S.points, S.labels].sum(axis=1)


def erm_select(tables: np.ndarray, S: LabeledSample) -> tuple[int, np.ndarray]:
    """Index of the lowest empirical cost (lowest index on ties) and all costs."""
    costs = sample_costs(tables, S)
    return int(np.argmin(costs)), costs


@dataclass(frozen=True)
class ReductionConfig:
    eps: float
    delta: float
    alpha: float | None = None
    eta: float = 0.0
    # sample-size overrides for desk-scale runs
    m_U: int | None = None
    m_L: int | None = None
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if not (0 < self.eps < 1 and 0 < self.delta < 1):
            raise InputError("eps and delta must lie in (0, 1)")
        if self.alpha is not None and not self.alpha > 0:
            raise InputError("alpha must be positive")
        if not 0 <= self.eta < 1:
            raise InputError("eta must lie in [0, 1)")

    @property
    def Delta(self) -> float:
        """Noise margin ``eps/(1+eps) - eta``."""
        return self.eps / (1 + self.eps) - self.eta

    @property
    def eta_prime(self) -> float:
        return (3 * self.eta + self.eps / (1 - self.eps)) / 4


@dataclass
class ReductionResult:
    hypothesis: Hypothesis
    cover: Cover
    m_U: int
    m_L: int
    index: int
    costs: np.ndarray | None = field(default=None, repr=False)
    info: dict = field(default_factory=dict)

    @property
    def cover_size(self) -> int:
        return len(self.cover)
