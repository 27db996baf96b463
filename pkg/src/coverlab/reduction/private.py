"""Semi-private selection with the exponential mechanism, uniform stability,
and learning under covariate shift."""
from __future__ import annotations

from dataclasses import dataclass
from math import ceil, e, log

import mpmath
import numpy as np

from ..core import HypothesisClass, InputError, growth_function, vc_dimension
from ..distributions import Distribution, JointDistribution, LabeledSample, derive_seed, rng_for, tv_hdh
from ..learners import RealizableLearner, consistent_erm_learner, finite_class_complexity
from ..losses import Loss, PreconditionError, eta_ell
from .agnostic import draw_labeled, draw_unlabeled, select_by_erm
from .cover import (STREAM_MECHANISM, STREAM_SUBSET, Cover, ReductionConfig, ReductionResult,
                    cost_tables, learning_to_cover, sample_costs)


def mechanism_probabilities(costs: np.ndarray, alpha: float, bound: float = 1.0) -> np.ndarray:
    """Selection law ``p_i ~ exp(alpha * s_i / 2)`` with score ``s_i = -costs_i / bound``."""
    if len(costs) == 0:
        raise InputError("empty cover")
    s = -np.asarray(costs, dtype=float) / float(bound)
    z = alpha * s / 2
    w = np.exp(z - z.max())
    return w / w.sum()


def _sample_index(p: np.ndarray, seed: int) -> int:
    u = rng_for(derive_seed(seed, STREAM_MECHANISM)).random()
    idx = int(np.searchsorted(np.cumsum(p), u, side="right"))
    return min(idx, int(np.flatnonzero(p)[-1]))


def exponential_mechanism(cover: Cover, S: LabeledSample, alpha: float, seed: int = 0,
                          loss: Loss | None = None, tables: np.ndarray | None = None):
    """Draw one cover member; returns ``(hypothesis, index, probabilities)``.

    A single substituted pair moves every score by at most one.
    """
    if len(cover) == 0:
        raise InputError("empty cover")
    if not alpha > 0:
        raise InputError("alpha must be positive")
    loss = loss or Loss.zero_one(max(2, int(cover.array.max()) + 1))
    if tables is None:
        tables = cost_tables(cover, loss.array)
    p = mechanism_probabilities(sample_costs(tables, S), alpha, float(loss.upper))
    i = _sample_index(p, seed)
    return cover[i], i, p


def mechanism_log_probabilities_mp(costs, alpha, bound=1, dps: int = 50) -> list:
    """High-precision log selection probabilities."""
    with mpmath.workdps(dps):
        a = mpmath.mpf(alpha)
        z = [a * (-mpmath.mpf(c) / mpmath.mpf(bound)) / 2 for c in costs]
        top = max(z)
        lse = top + mpmath.log(mpmath.fsum(mpmath.exp(v - top) for v in z))
        return [v - lse for v in z]


def dp_max_log_ratio(tables: np.ndarray, S: LabeledSample, alpha: float, bound: float = 1.0,
                     dps: int = 50) -> tuple[float, tuple]:
    """Largest ``|log P(out=i | S) - log P(out=i | S')|`` over every single-pair substitution.

    ``S'`` replaces one position of ``S`` by any ``(x, y)``.  Returns the value
    and the ``(position, x, y, member)`` attaining it.
    """
    n_points, n_labels = tables.shape[1], tables.shape[2]
    base = sample_costs(tables, S)
    ref = mechanism_log_probabilities_mp([str(c) for c in base], alpha, bound, dps)
    worst = mpmath.mpf(0)
    where: tuple = ()
    with mpmath.workdps(dps):
        for pos, (x0, y0) in enumerate(S):
            for x in range(n_points):
                for y in range(n_labels):
                    if (x, y) == (x0, y0):
                        continue
                    moved = base - tables[:, x0, y0] + tables[:, x, y]
                    lp = mechanism_log_probabilities_mp([str(c) for c in moved], alpha, bound, dps)
                    for i, (u, v) in enumerate(zip(ref, lp)):
                        r = abs(u - v)
                        if r > worst:
                            worst, where = r, (pos, x, y, i)
    return float(worst), where


def private_sample_size(cover_size: int, eps: float, delta: float, alpha: float, bound: float = 1.0) -> int:
    """Larger of the uniform-deviation size and the mechanism's utility size."""
    B = float(bound)
    lg = log(2 * cover_size / delta)
    return max(ceil(2 * B * B * lg / eps ** 2 - 1e-9), ceil(4 * B * lg / (alpha * eps) - 1e-9))


def _public_size(A: RealizableLearner, loss: Loss, cfg: ReductionConfig) -> int:
    if cfg.m_U is not None:
        return cfg.m_U
    return A.n(float(eta_ell(loss)) * cfg.eps, cfg.delta / 2)


def select_by_mechanism(cover: Cover, labeled, loss: Loss, cfg: ReductionConfig, seed: int, m_U: int,
                        alpha: float, m_L: int | None = None, **info) -> ReductionResult:
    if m_L is None:
        m_L = cfg.m_L if cfg.m_L is not None else private_sample_size(
            len(cover), cfg.eps, cfg.delta, alpha, float(loss.upper))
    S_L = draw_labeled(labeled, m_L, seed)
    tables = cost_tables(cover, loss.array)
    h, i, p = exponential_mechanism(cover, S_L, alpha, seed, loss, tables)
    return ReductionResult(h, cover, m_U, m_L, i, sample_costs(tables, S_L),
                           dict(info, probabilities=p, alpha=alpha))


def semiprivate_reduce(A: RealizableLearner, H: HypothesisClass, public_oracle, private_oracle,
                       cfg: ReductionConfig, seed: int = 0, loss: Loss | None = None) -> ReductionResult:
    """Cover from public unlabeled data; private labeled data only feeds the mechanism."""
    if cfg.alpha is None:
        raise InputError("semi-private learning needs alpha")
    loss = loss or Loss.zero_one(len(H.labels))
    m_U = _public_size(A, loss, cfg)
    S_U = draw_unlabeled(public_oracle, m_U, seed)
    cover = learning_to_cover(A, H, S_U, seed)
    return select_by_mechanism(cover, private_oracle, loss, cfg, seed, m_U, cfg.alpha)


@dataclass(frozen=True)
class PrivateSizeRow:
    eps: float
    m_pub: int
    growth: int
    sauer: float
    m_pri: int
    m_pri_sauer: int
    ratio: float
    ratio_sauer: float


def private_size_table(H: HypothesisClass, A: RealizableLearner, eps_values, delta: float, alpha: float,
                       loss: Loss | None = None) -> list[PrivateSizeRow]:
    """Public and private sample sizes across ``eps``.

    ``ratio`` is ``m_pri * eps^2 / (d ln(1/eps) + ln(1/delta))``; it stays in
    a bounded band when the private size scales like ``d log(1/eps)``.
    """
    loss = loss or Loss.zero_one(len(H.labels))
    d = max(vc_dimension(H), 1)
    B = float(loss.upper)
    rows = []
    for eps in eps_values:
        m_pub = A.n(float(eta_ell(loss)) * eps, delta / 2)
        pi = min(growth_function(H, m_pub), len(H))
        sauer = (e * m_pub / d) ** d
        m_pri = private_sample_size(pi, eps, delta, alpha, B)
        m_pri_s = private_sample_size(max(1, ceil(sauer)), eps, delta, alpha, B)
        scale = d * log(1 / eps) + log(1 / delta)
        rows.append(PrivateSizeRow(eps, m_pub, pi, sauer, m_pri, m_pri_s,
                                   m_pri * eps ** 2 / scale, m_pri_s * eps ** 2 / scale))
    return rows


# uniform stability


def stable_sizes(A: RealizableLearner, cfg: ReductionConfig) -> tuple[int, int]:
    """``(n, pool)`` with ``n = n(eps/2, delta/2)`` and ``pool = ceil(2n / alpha)``."""
    if cfg.alpha is None or not 0 < cfg.alpha <= 1:
        raise InputError("stability needs alpha in (0, 1]")
    n = A.n(cfg.eps / 2, cfg.delta / 2)
    return n, ceil(2 * n / cfg.alpha - 1e-9)


class StableRunner:
    """Stable learner on fixed data; covers are cached by the chosen point set."""

    def __init__(self, A: RealizableLearner, H: HypothesisClass, pool, S_L: LabeledSample,
                 cfg: ReductionConfig, loss: Loss | None = None, n: int | None = None):
        self.A, self.H, self.cfg = A, H, cfg
        self.loss = loss or Loss.zero_one(len(H.labels))
        self.pool = np.asarray(pool, dtype=np.int64).reshape(-1)
        self.S_L = S_L
        self.n = n if n is not None else stable_sizes(A, cfg)[0]
        if self.n > self.pool.size:
            raise InputError("pool smaller than the subset size")
        self.alpha = cfg.alpha / 4
        self._cache: dict = {}

    def subset(self, seed: int) -> np.ndarray:
        rng = rng_for(derive_seed(seed, STREAM_SUBSET))
        return np.sort(rng.choice(self.pool.size, self.n, replace=False))

    def _selection(self, pts: np.ndarray, seed: int):
        key = tuple(np.unique(pts).tolist()) if self.A.set_invariant else tuple(pts.tolist())
        if key not in self._cache:
            cover = learning_to_cover(self.A, self.H, pts, seed)
            costs = sample_costs(cost_tables(cover, self.loss.array), self.S_L)
            p = mechanism_probabilities(costs, self.alpha, float(self.loss.upper))
            self._cache[key] = (cover, p)
        return self._cache[key]

    def run(self, seed: int) -> tuple:
        """``(hypothesis, chosen pool positions, cover)``."""
        idx = self.subset(seed)
        cover, p = self._selection(self.pool[idx], seed)
        return cover[_sample_index(p, seed)], idx, cover


def stable_reduce(A: RealizableLearner, H: HypothesisClass, unlabeled_oracle, labeled_oracle,
                  cfg: ReductionConfig, seed: int = 0, loss: Loss | None = None) -> ReductionResult:
    """Cover from a random ``n``-subset of a ``2n/alpha`` pool, then the mechanism at ``alpha/4``.

    Any fixed pool point is chosen with probability ``alpha/2``.  The labeled
    size uses the growth-function bound on the cover so it does not depend on
    the subset.
    """
    loss = loss or Loss.zero_one(len(H.labels))
    n, pool_size = stable_sizes(A, cfg)
    if cfg.m_U is not None:
        pool_size = cfg.m_U
    pool = draw_unlabeled(unlabeled_oracle, pool_size, seed)
    bound = growth_function(H, n, cfg.budget)
    if A.proper:
        bound = min(bound, len(H))
    m_L = cfg.m_L if cfg.m_L is not None else private_sample_size(
        bound, cfg.eps, cfg.delta, cfg.alpha / 4, float(loss.upper))
    S_L = draw_labeled(labeled_oracle, m_L, seed)
    runner = StableRunner(A, H, pool, S_L, cfg, loss, n)
    h, idx, cover = runner.run(seed)
    return ReductionResult(h, cover, pool_size, m_L, cover.members.index(h),
                           info=dict(subset=idx, n=n))


# covariate shift


def shift_robust_learner(H: HypothesisClass, loss: Loss | None = None) -> RealizableLearner:
    """Consistent ERM sized so its error stays below ``eps`` after a shift of at most ``eps/2``
    in total variation over the class's symmetric differences."""
    base = consistent_erm_learner(H, loss)
    scale = 2 * (float(loss.upper) if loss is not None else 1.0)
    return RealizableLearner("consistent_erm_shift", base.rule, finite_class_complexity(len(H), scale))


def covariate_shift_reduce(A_cs: RealizableLearner, H: HypothesisClass, public_oracle,
                           private_oracle: JointDistribution, cfg: ReductionConfig, seed: int = 0,
                           loss: Loss | None = None, public_marginal: Distribution | None = None
                           ) -> ReductionResult:
    """Cover from the source marginal, selection on labeled target data.

    Raises :class:`PreconditionError` carrying ``value`` when the target
    marginal is more than ``eps/2`` from the source in TV over symmetric
    differences.  Uses the mechanism when ``cfg.alpha`` is set, ERM otherwise.
    """
    loss = loss or Loss.zero_one(len(H.labels))
    src = public_marginal
    if src is None:
        src = public_oracle.marginal if isinstance(public_oracle, JointDistribution) else public_oracle
    tv = tv_hdh(src, private_oracle.marginal, H)
    if float(tv) > cfg.eps / 2 + 1e-12:
        err = PreconditionError(f"target marginal is {float(tv):.6g} from the source, above eps/2")
        err.value = tv
        raise err
    m_U = _public_size(A_cs, loss, cfg)
    S_U = draw_unlabeled(public_oracle, m_U, seed)
    cover = learning_to_cover(A_cs, H, S_U, seed)
    if cfg.alpha is not None:
        return select_by_mechanism(cover, private_oracle, loss, cfg, seed, m_U, cfg.alpha, tv=tv)
    return select_by_erm(cover, private_oracle, loss, cfg, seed, m_U, tv=tv)
