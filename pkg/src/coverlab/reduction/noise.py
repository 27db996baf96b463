"""Reductions that must tolerate corrupted or restricted data: malicious noise,
adversarial robustness and partial concepts."""
from __future__ import annotations

from fractions import Fraction
from math import ceil, log

import numpy as np

from ..core import STAR, HypothesisClass, InputError
from ..distributions import JointDistribution, risk
from ..learners import RealizableLearner
from ..losses import (Loss, PerturbationMap, PreconditionError, partial_risk, robust_risk,
                      robust_support, worst_case_table)
from .agnostic import draw_unlabeled, select_by_erm
from .cover import Cover, ReductionConfig, ReductionResult, cost_tables, subsample_cover


def malicious_labeled_size(cover_size: int, eps: float, delta: float, eta: float, bound: float = 1.0) -> int:
    """Labeled budget with all three deviation terms set to a quarter of the noise margin."""
    Delta = eps / (1 + eps) - eta
    B2 = float(bound) ** 2
    first = 8 * B2 * log(4 / delta) / Delta ** 2
    second = 8 * B2 * log(8 * cover_size / delta) / (Delta ** 2 * (1 - eta - Delta / 4))
    return ceil(max(first, second) - 1e-9)


def malicious_unlabeled_size(A: RealizableLearner, cfg: ReductionConfig) -> int:
    D, ep = cfg.Delta, cfg.eta_prime
    return ceil(A.n(D / 4, cfg.delta / 4) / (1 - ep) + 8 * log(4 / cfg.delta) / D ** 2 - 1e-9)


def check_malicious(cfg: ReductionConfig) -> None:
    if not cfg.eps < 0.5:
        raise PreconditionError("malicious path assumes eps < 1/2")
    if not cfg.eta < cfg.eps / (1 + cfg.eps):
        raise PreconditionError(
            f"eta={cfg.eta} must be below eps/(1+eps)={cfg.eps / (1 + cfg.eps):.6g}; "
            "no learner tolerates a higher malicious rate")


def malicious_reduce(A: RealizableLearner, H: HypothesisClass, oracle, cfg: ReductionConfig,
                     seed: int = 0, loss: Loss | None = None) -> ReductionResult:
    """Cover from every large subset of a corrupted unlabeled sample, then ERM on corrupted labels.

    The unlabeled and labeled draws are corrupted independently.
    """
    check_malicious(cfg)
    loss = loss or Loss.zero_one(len(H.labels))
    m_U = cfg.m_U if cfg.m_U is not None else malicious_unlabeled_size(A, cfg)
    S_U = draw_unlabeled(oracle, m_U, seed)
    cover = subsample_cover(A, H, S_U, 1 - cfg.eta_prime, seed, "fixed", cfg.budget)
    m_L = cfg.m_L if cfg.m_L is not None else malicious_labeled_size(
        len(cover), cfg.eps, cfg.delta, cfg.eta, float(loss.upper))
    return select_by_erm(cover, oracle, loss, cfg, seed, m_U, m_L=m_L,
                         eta_prime=cfg.eta_prime, Delta=cfg.Delta)


# unlabeled budget shared by the robust and partial paths

MU_STEP = 0.01


def restricted_unlabeled_size(A: RealizableLearner, eps: float, delta: float, step: float = MU_STEP) -> int:
    """Max over ``mu`` on a grid in ``[0, 1 - eps]`` of ``n(eps / (2(1-mu)), delta/3) / (1-mu)``."""
    best = 0
    k = 0
    while True:
        mu = k * step
        if mu > 1 - eps + 1e-12:
            break
        keep = 1 - mu
        best = max(best, ceil(A.n(eps / (2 * keep), delta / 3) / keep - 1e-9))
        k += 1
    return best


def _region_subsets(S_U: np.ndarray, regions: list[tuple[int, ...]], distinct: bool) -> list[np.ndarray]:
    base = np.unique(S_U) if distinct else S_U
    seen = {}
    for R in regions:
        sub = base[np.isin(base, R)]
        seen.setdefault(sub.tobytes(), sub)
    return list(seen.values())


def _restricted_cover(A, H, S_U, regions, subsets, seed, budget) -> Cover:
    if subsets == "all":
        return subsample_cover(A, H, S_U, seed=seed, mode="all", budget=budget)
    if subsets != "regions":
        raise InputError("subsets must be 'regions' or 'all'")
    return subsample_cover(A, H, S_U, seed=seed, mode="listed", budget=budget,
                           listed=_region_subsets(S_U, regions, A.set_invariant))


def robust_tables(cover: Cover, U: PerturbationMap, loss: Loss) -> np.ndarray:
    return np.array([worst_case_table(h, U, loss) for h in cover], dtype=float)


def robust_reduce(A_robust: RealizableLearner, H: HypothesisClass, unlabeled_oracle, labeled_oracle,
                  U: PerturbationMap, cfg: ReductionConfig, seed: int = 0, loss: Loss | None = None,
                  subsets: str = "regions") -> ReductionResult:
    """Cover from subsets of ``S_U`` that can be the robust region of a member; pick the
    lowest empirical robust risk.

    ``subsets="regions"`` enumerates ``S_U`` intersected with each member's
    robust region, which always includes the subset the guarantee needs;
    ``subsets="all"`` enumerates every subset.
    """
    loss = loss or Loss.zero_one(len(H.labels))
    m_U = cfg.m_U if cfg.m_U is not None else restricted_unlabeled_size(A_robust, cfg.eps, cfg.delta)
    S_U = draw_unlabeled(unlabeled_oracle, m_U, seed)
    regions = [robust_support(h, U, loss) for h in H]
    cover = _restricted_cover(A_robust, H, S_U, regions, subsets, seed, cfg.budget)
    return select_by_erm(cover, labeled_oracle, loss, cfg, seed, m_U,
                         tables=robust_tables(cover, U, loss))


def partial_reduce(A_partial: RealizableLearner, H: HypothesisClass, unlabeled_oracle, labeled_oracle,
                   cfg: ReductionConfig, seed: int = 0, subsets: str = "regions") -> ReductionResult:
    """Cover from subsets of ``S_U`` that can be a member's support; ERM where an
    undefined prediction is always a mistake."""
    loss = Loss.zero_one(len(H.labels))
    m_U = cfg.m_U if cfg.m_U is not None else restricted_unlabeled_size(A_partial, cfg.eps, cfg.delta)
    S_U = draw_unlabeled(unlabeled_oracle, m_U, seed)
    regions = [h.support() for h in H]
    cover = _restricted_cover(A_partial, H, S_U, regions, subsets, seed, cfg.budget)
    return select_by_erm(cover, labeled_oracle, loss, cfg, seed, m_U,
                         tables=cost_tables(cover, loss.array, star_cost=1.0))


# exact decompositions of the optimum


def _split(D: JointDistribution, region: tuple[int, ...]):
    """Mass outside ``region`` and the conditional distribution on it (None when massless)."""
    inside = D.marginal.mass_of(region)
    mu = 1 - inside
    if not inside:
        return mu, None
    keep = set(region)
    zero = Fraction(0) if D.exact else 0.0
    table = [list(row) if x in keep else [zero] * D.n_labels for x, row in enumerate(D.table)]
    return mu, JointDistribution(table, D.labels)


def robust_decomposition(H: HypothesisClass, D: JointDistribution, U: PerturbationMap, loss: Loss):
    """``(OPT, mu*, OPT')`` for the best robust member.

    ``mu*`` is the mass off the member's robust region and ``OPT'`` its
    ordinary risk on ``D`` conditioned on that region.
    """
    vals = [robust_risk(h, D, U, loss) for h in H]
    best = min(range(len(H)), key=lambda i: (vals[i], i))
    h = H[best]
    mu, cond = _split(D, robust_support(h, U, loss))
    opt_in = risk(h, cond, loss) if cond is not None else 0
    return vals[best], mu, opt_in, best


def partial_decomposition(H: HypothesisClass, D: JointDistribution):
    """``(OPT, mu*, OPT')`` for the best partial member; ``mu*`` is the mass where it is undefined."""
    vals = [partial_risk(h, D) for h in H]
    best = min(range(len(H)), key=lambda i: (vals[i], i))
    h = H[best]
    mu, cond = _split(D, h.support())
    opt_in = partial_risk(h, cond) if cond is not None else 0
    return vals[best], mu, opt_in, best


def robust_opt(H: HypothesisClass, D: JointDistribution, U: PerturbationMap, loss: Loss):
    return min(robust_risk(h, D, U, loss) for h in H)


def partial_opt(H: HypothesisClass, D: JointDistribution):
    return min(partial_risk(h, D) for h in H)
