"""Metric-fair agnostic learning over real-valued predictions."""
from __future__ import annotations

from ..core import HypothesisClass
from ..distributions import Distribution, JointDistribution, risk
from ..learners import RealizableLearner, consistent_erm_learner
from ..losses import FairnessMetric, Loss, UnsupportedError, fairness_violation
from .agnostic import draw_unlabeled, select_by_erm
from .cover import Cover, ReductionConfig, ReductionResult, cost_tables, learning_to_cover


class EmptyFairCoverError(RuntimeError):
    """No cover member passed the fairness filter."""


def fair_members(H: HypothesisClass, marginal: Distribution, metric: FairnessMetric,
                 slack: bool = False) -> list[int]:
    """Indices of members that are fair under ``marginal``, optionally at the relaxed parameters."""
    a = metric.alpha + (metric.eps_alpha if slack else 0.0)
    g = metric.gamma + (metric.eps_gamma if slack else 0.0)
    return [i for i, h in enumerate(H) if fairness_violation(h, marginal, metric, H.labels, g) <= a + 1e-12]


def fair_opt(H: HypothesisClass, D: JointDistribution, metric: FairnessMetric, loss: Loss):
    """Best risk among exactly fair members, and the member index (None if none is fair)."""
    keep = fair_members(H, D.marginal, metric)
    if not keep:
        return None, None
    vals = [(risk(H[i], D, loss), i) for i in keep]
    best = min(vals)
    return best[0], best[1]


def fair_reduce(H: HypothesisClass, unlabeled_oracle, labeled_oracle, metric: FairnessMetric,
                cfg: ReductionConfig, seed: int = 0, marginal: Distribution | None = None,
                A: RealizableLearner | None = None, loss: Loss | None = None) -> ReductionResult:
    """Cover over the fair members' restrictions, keep the members that are fair at the
    relaxed parameters, then ERM under absolute loss.

    Fairness only depends on the marginal, which is taken as known here, so
    the output passes the relaxed fairness check exactly.
    """
    if not H.labels.numeric:
        raise UnsupportedError("fair learning needs numeric label payloads")
    if marginal is None:
        marginal = unlabeled_oracle if isinstance(unlabeled_oracle, Distribution) else unlabeled_oracle.marginal
    loss = loss or Loss.from_payloads(H.labels, "absolute")
    fair = fair_members(H, marginal, metric)
    if not fair:
        raise EmptyFairCoverError("no member is fair at the target parameters")
    H_fair = HypothesisClass(H.members[fair], H.labels)
    A = A or consistent_erm_learner(H_fair, loss)
    m_U = cfg.m_U if cfg.m_U is not None else A.n(cfg.eps / 2, cfg.delta / 2)
    S_U = draw_unlabeled(unlabeled_oracle, m_U, seed)
    full = learning_to_cover(A, H_fair, S_U, seed)
    a, g = metric.alpha + metric.eps_alpha, metric.gamma + metric.eps_gamma
    keep = [i for i, h in enumerate(full)
            if fairness_violation(h, marginal, metric, H.labels, g) <= a + 1e-12]
    if not keep:
        raise EmptyFairCoverError("fairness filter removed every cover member")
    cover = Cover(tuple(full.members[i] for i in keep), tuple(full.provenance[i] for i in keep),
                  full.runs, full.subsets, full.skipped)
    return select_by_erm(cover, labeled_oracle, loss, cfg, seed, m_U,
                         tables=cost_tables(cover, loss.array), filtered=len(full) - len(cover))
