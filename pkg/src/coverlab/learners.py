"""Realizable learners used as black boxes by the reductions.

A learner is a value: a deterministic rule ``(points, labels, seed) ->
Hypothesis`` together with its declared sample complexity.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, log
from typing import Callable, Sequence

import numpy as np

from .core import STAR, Hypothesis, HypothesisClass, InputError, LabelSpace
from .losses import Loss, PerturbationMap, worst_case_table


class InconsistentSampleError(ValueError):
    """No class member fits the sample, so it was not realizable."""

    def __init__(self, msg: str, points=None, labels=None):
        super().__init__(msg)
        self.points = points
        self.labels = labels


class DiscretizationError(ValueError):
    def __init__(self, msg: str, witness: tuple):
        super().__init__(f"{msg}; witness {witness}")
        self.witness = witness


Rule = Callable[[np.ndarray, np.ndarray, int], Hypothesis]


@dataclass(frozen=True)
class RealizableLearner:
    name: str
    rule: Rule = field(repr=False)
    complexity: Callable[[float, float], int] = field(repr=False)
    proper: bool = True
    # output depends only on the set of distinct labeled pairs
    set_invariant: bool = True

    def __call__(self, points, labels, seed: int = 0) -> Hypothesis:
        pts = np.asarray(points, dtype=np.int64).reshape(-1)
        ys = np.asarray(labels, dtype=np.int64).reshape(-1)
        if pts.shape != ys.shape:
            raise InputError("points and labels differ in length")
        return self.rule(pts, ys, seed)

    def fit(self, S, seed: int = 0) -> Hypothesis:
        return self(S.points, S.labels, seed)

    def n(self, eps: float, delta: float) -> int:
        """Declared complexity, floored at ``ceil(ln(1/delta))``."""
        if not (0 < eps and 0 < delta < 1):
            raise InputError("need eps > 0 and delta in (0, 1)")
        return max(int(self.complexity(eps, delta)), ceil(log(1 / delta) - 1e-12))


def finite_class_complexity(size: int, scale: float = 1.0) -> Callable[[float, float], int]:
    """``ceil(scale * (ln|H| + ln(1/delta)) / eps)``."""
    def n(eps: float, delta: float) -> int:
        return ceil(scale * (log(size) + log(1 / delta)) / eps - 1e-12)
    return n


def _distinct_pairs(pts: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if pts.size == 0:
        return pts, ys
    pairs = np.unique(np.stack([pts, ys], axis=1), axis=0)
    return pairs[:, 0], pairs[:, 1]


def consistent_erm_learner(H: HypothesisClass, loss: Loss | None = None) -> RealizableLearner:
    """Lowest-index member matching every labeled point.

    An undefined prediction never matches.  With a loss, the declared
    complexity is stretched by the largest cost so the guarantee holds in
    expected loss rather than in disagreement mass.
    """
    members = H.members
    scale = float(loss.upper) if loss is not None else 1.0

    def rule(pts, ys, seed):
        pts, ys = _distinct_pairs(pts, ys)
        if pts.size == 0:
            return H[0]
        ok = (members[:, pts] == ys[None, :]).all(axis=1)
        hits = np.flatnonzero(ok)
        if hits.size == 0:
            raise InconsistentSampleError("no member is consistent with the sample", pts, ys)
        return H[int(hits[0])]

    return RealizableLearner("consistent_erm", rule, finite_class_complexity(len(H), scale))


def erm_learner(H: HypothesisClass, loss: Loss) -> RealizableLearner:
    """Lowest-index minimizer of the summed sample loss; never raises."""
    members = H.members
    L = loss.array

    def rule(pts, ys, seed):
        if pts.size == 0:
            return H[0]
        cost = L[members[:, pts], ys[None, :]].sum(axis=1)
        return H[int(np.argmin(cost))]

    # duplicates change the sum, so not set-invariant
    return RealizableLearner("erm", rule, finite_class_complexity(len(H), float(loss.upper)),
                             set_invariant=False)


def constant_learner(H: HypothesisClass, index: int = 0) -> RealizableLearner:
    """Ignores its sample and returns one fixed member."""
    h = H[index]
    return RealizableLearner(f"constant[{index}]", lambda p, y, s: h, lambda e, d: 0)


def robust_erm_learner(H: HypothesisClass, U: PerturbationMap, loss: Loss) -> RealizableLearner:
    """Lowest-index member with zero worst-case loss on every labeled point."""
    W = np.array([worst_case_table(h, U, loss) for h in H], dtype=float)

    def rule(pts, ys, seed):
        pts, ys = _distinct_pairs(pts, ys)
        if pts.size == 0:
            return H[0]
        ok = (W[:, pts, ys] == 0).all(axis=1)
        hits = np.flatnonzero(ok)
        if hits.size == 0:
            raise InconsistentSampleError("no member is robustly consistent with the sample", pts, ys)
        return H[int(hits[0])]

    return RealizableLearner("robust_erm", rule, finite_class_complexity(len(H), float(loss.upper)))


def benedek_itai_learner(n: int) -> RealizableLearner:
    """One-sample rule: all-ones if a positive label is seen, otherwise all-zeros.

    Valid on finite-support indicators over ``[n]`` when every finite support
    carries mass below both ``eps`` and ``delta``.
    """
    ones = Hypothesis((1,) * n)
    zeros = Hypothesis((0,) * n)

    def rule(pts, ys, seed):
        return ones if (ys == 1).any() else zeros

    return RealizableLearner("benedek_itai", rule, lambda e, d: 1, proper=True)


# discretization


@dataclass(frozen=True)
class DiscreteLearner:
    """Consistent ERM over a rounded class, with both witness maps recorded."""

    source: HypothesisClass
    loss: Loss
    eps: float
    coarse: HypothesisClass
    cover_map: tuple[int, ...]
    useful_map: tuple[int, ...]
    learner: RealizableLearner
    c1: float = 1.0
    step: float | None = None

    def verify(self) -> None:
        """Exhaustive check of the point-wise cover and usefulness conditions."""
        L = self.loss.table
        tol = 1e-12
        for i, j in enumerate(self.cover_map):
            h, g = self.source.members[i], self.coarse.members[j]
            for x in range(self.source.n_points):
                if float(L[g[x]][h[x]]) > self.eps + tol:
                    raise DiscretizationError("rounded class misses a member", (i, x))
        for j, i in enumerate(self.useful_map):
            h, g = self.source.members[i], self.coarse.members[j]
            for x in range(self.source.n_points):
                if float(L[g[x]][h[x]]) > self.eps + tol:
                    raise DiscretizationError("rounded member is not useful", (j, x))

    def at(self, eps: float) -> "DiscreteLearner":
        return discretize(self.source, self.loss, eps, self.step)


def _anchors(labels: LabelSpace, loss: Loss, eps: float, step: float | None) -> list[int]:
    k = len(labels)
    order = sorted(range(k), key=lambda a: labels.payloads[a]) if labels.numeric else list(range(k))
    if step is not None:
        if not labels.numeric:
            raise DiscretizationError("a grid step needs numeric labels", ())
        return [a for a in order
                if abs(labels.payloads[a] / step - round(labels.payloads[a] / step)) < 1e-9]
    L = loss.table
    anchors: list[int] = []
    covered: set[int] = set()
    for i, a in enumerate(order):
        if a in covered:
            continue
        # farthest label along the order that still covers a
        b = [c for c in order[i:] if float(L[c][a]) <= eps + 1e-12][-1]
        anchors.append(b)
        covered |= {c for c in order if float(L[b][c]) <= eps + 1e-12}
    return anchors


def discretize(H: HypothesisClass, loss: Loss, eps: float, step: float | None = None) -> DiscreteLearner:
    """Round every label to a nearby anchor label and deduplicate.

    Without ``step`` the anchors are chosen greedily along the payload order
    so each label is within ``eps`` of its anchor; with ``step`` the anchors
    are the grid multiples and the result is verified.
    """
    k = len(H.labels)
    L = loss.table
    anchors = _anchors(H.labels, loss, eps, step)
    if not anchors:
        raise DiscretizationError("no anchor labels on the requested grid", ())
    rmap = []
    for a in range(k):
        best = min(anchors, key=lambda b: (float(L[b][a]), b))
        rmap.append(best)
    rmap_arr = np.array(rmap + [STAR], dtype=np.int64)
    rounded = rmap_arr[H.members]
    coarse = HypothesisClass(rounded, H.labels)
    keys = {row.tobytes(): j for j, row in enumerate(coarse.members)}
    cover_map = tuple(keys[row.tobytes()] for row in rounded)
    useful_map = tuple(cover_map.index(j) for j in range(len(coarse)))
    d = DiscreteLearner(H, loss, eps, coarse, cover_map, useful_map,
                        consistent_erm_learner(coarse, loss), 1.0, step)
    d.verify()
    return d


# statistical queries

Ask = Callable[[np.ndarray, float], float]


@dataclass(frozen=True)
class SQLearner:
    """Adaptive query strategy: ``run(ask)`` issues at most ``n_queries`` queries."""

    name: str
    n_queries: int
    tau: float
    run: Callable[[Ask], Hypothesis] = field(repr=False)
    eps: float = 0.0
    # smallest sup-norm gap between distinct members' expected answers
    separation: float | None = None


def mismatch_query(h: Hypothesis, n_labels: int) -> np.ndarray:
    """``psi(x, y) = 1{h(x) != y}``."""
    psi = np.ones((len(h), n_labels))
    for x, a in enumerate(h.labels):
        if a != STAR:
            psi[x, a] = 0.0
    return psi


def sq_learner(H: HypothesisClass, tau: float, eps: float | None = None) -> SQLearner:
    """Query members' errors in order and keep the first one answering at most ``tau``."""
    if eps is not None and not tau < eps / 2:
        raise InputError("need tau < eps / 2")
    queries = [mismatch_query(h, len(H.labels)) for h in H]

    def run(ask: Ask) -> Hypothesis:
        for i, psi in enumerate(queries):
            if ask(psi, tau) <= tau + 1e-12:
                return H[i]
        return H[len(H) - 1]

    return SQLearner("elimination", len(H), tau, run, 2 * tau if eps is None else eps)


def signature_sq_learner(H: HypothesisClass, marginal, probes: Sequence[np.ndarray], tau: float
                         ) -> SQLearner:
    """Non-adaptive probes; output the member whose expected answers are closest in sup norm.

    Under a known marginal every member has a signature vector.  When distinct
    signatures are more than ``2 * tau`` apart the target is recovered exactly.
    """
    probes = [np.asarray(p, dtype=float) for p in probes]
    p = marginal.p
    sig = np.array([[float(p @ q[np.arange(H.n_points), H.members[i]]) for q in probes]
                    for i in range(len(H))])
    gaps = [np.abs(sig[i] - sig[j]).max() for i in range(len(H)) for j in range(i)]
    sep = min(gaps) if gaps else np.inf

    def run(ask: Ask) -> Hypothesis:
        r = np.array([ask(q, tau) for q in probes])
        dist = np.abs(sig - r[None, :]).max(axis=1)
        return H[int(np.argmin(dist))]

    eps = 0.0 if sep > 2 * tau else 1.0
    return SQLearner("signature", len(probes), tau, run, eps, float(sep))
