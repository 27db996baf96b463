"""Agnostic, approximate-pseudometric and doubly-bounded reductions."""
from __future__ import annotations

import numpy as np

from ..core import HypothesisClass
from ..distributions import derive_seed, sample, unlabeled
from ..learners import DiscreteLearner, RealizableLearner
from ..losses import Loss, PreconditionError, eta_ell, verify_tags
from .cover import (STREAM_LABELED, STREAM_UNLABELED, Cover, ReductionConfig, ReductionResult,
                    cost_tables, erm_select, labeled_sample_size, learning_to_cover)


def draw_unlabeled(oracle, m: int, seed: int) -> np.ndarray:
    return unlabeled(oracle, m, derive_seed(seed, STREAM_UNLABELED))


def draw_labeled(oracle, m: int, seed: int):
    return sample(oracle, m, derive_seed(seed, STREAM_LABELED))


def select_by_erm(cover: Cover, labeled, loss: Loss, cfg: ReductionConfig, seed: int, m_U: int,
                  tables: np.ndarray | None = None, m_L: int | None = None,
                  **info) -> ReductionResult:
    """Draw the labeled sample for ``cover`` and return its empirical minimizer."""
    if m_L is None:
        m_L = cfg.m_L if cfg.m_L is not None else labeled_sample_size(
            len(cover), cfg.eps, cfg.delta, float(loss.upper))
    S_L = draw_labeled(labeled, m_L, seed)
    if tables is None:
        tables = cost_tables(cover, loss.array)
    idx, costs = erm_select(tables, S_L)
    return ReductionResult(cover[idx], cover, m_U, m_L, idx, costs, dict(info))


def agnostic_reduce(A: RealizableLearner, H: HypothesisClass, unlabeled_oracle, labeled_oracle,
                    cfg: ReductionConfig, seed: int = 0, loss: Loss | None = None) -> ReductionResult:
    """Cover from ``n(eta_l * eps, delta/2)`` unlabeled points, then ERM over the cover."""
    loss = loss or Loss.zero_one(len(H.labels))
    eta = float(eta_ell(loss))
    m_U = cfg.m_U if cfg.m_U is not None else A.n(eta * cfg.eps, cfg.delta / 2)
    S_U = draw_unlabeled(unlabeled_oracle, m_U, seed)
    cover = learning_to_cover(A, H, S_U, seed)
    return select_by_erm(cover, labeled_oracle, loss, cfg, seed, m_U)


def _discrete_path(discrete: DiscreteLearner, eps_prime: float, unlabeled_oracle, labeled_oracle,
                   cfg: ReductionConfig, seed: int, **info) -> ReductionResult:
    fine = discrete.at(eps_prime)
    m_U = cfg.m_U if cfg.m_U is not None else fine.learner.n(eps_prime, cfg.delta / 2)
    S_U = draw_unlabeled(unlabeled_oracle, m_U, seed)
    cover = learning_to_cover(fine.learner, fine.coarse, S_U, seed)
    return select_by_erm(cover, labeled_oracle, discrete.loss, cfg, seed, m_U,
                         eps_prime=eps_prime, **info)


def pseudometric_reduce(discrete: DiscreteLearner, unlabeled_oracle, labeled_oracle,
                        cfg: ReductionConfig, seed: int = 0) -> ReductionResult:
    """c-agnostic learning for a c-approximate pseudometric loss.

    The class is discretized at ``eps / (4 c^2 c1)`` with ``c`` the smallest
    verified constant.
    """
    tags = verify_tags(discrete.loss)
    if tags.c is None:
        raise PreconditionError("loss is not an approximate pseudometric")
    c = float(tags.c)
    eps_prime = cfg.eps / (4 * c * c * discrete.c1)
    return _discrete_path(discrete, eps_prime, unlabeled_oracle, labeled_oracle, cfg, seed, c=c)


def doubly_bounded_reduce(discrete: DiscreteLearner, unlabeled_oracle, labeled_oracle,
                          cfg: ReductionConfig, seed: int = 0) -> ReductionResult:
    """Truly agnostic learning when every off-diagonal cost lies in ``[a, b]`` with ``a > 0``."""
    tags = verify_tags(discrete.loss)
    if tags.bounds is None:
        raise PreconditionError("loss has a zero off-diagonal cost, so it is not (a, b)-bounded")
    a, b = (float(v) for v in tags.bounds)
    eps_prime = a * cfg.eps / (4 * b)
    return _discrete_path(discrete, eps_prime, unlabeled_oracle, labeled_oracle, cfg, seed,
                          bounds=(a, b))
