"""Reductions from agnostic to realizable learning built on learner-generated covers."""
from .agnostic import agnostic_reduce, doubly_bounded_reduce, pseudometric_reduce
from .cover import (Cover, ReductionConfig, ReductionResult, cost_tables, erm_select, labeled_sample_size,
                    learning_to_cover, subsample_cover)
from .fair import EmptyFairCoverError, fair_opt, fair_reduce
from .noise import (malicious_reduce, partial_decomposition, partial_opt, partial_reduce,
                    robust_decomposition, robust_opt, robust_reduce)
from .private import (covariate_shift_reduce, dp_max_log_ratio, exponential_mechanism,
                      mechanism_probabilities, private_sample_size, private_size_table,
                      semiprivate_reduce, shift_robust_learner, stable_reduce, stable_sizes)
from .sq import AdversarialOracle, HonestOracle, response_grid, sq_cover, sq_reduce, sq_worst_case

__all__ = [
    "Cover", "ReductionConfig", "ReductionResult", "learning_to_cover", "subsample_cover",
    "labeled_sample_size", "cost_tables", "erm_select", "agnostic_reduce", "pseudometric_reduce",
    "doubly_bounded_reduce", "malicious_reduce", "robust_reduce", "partial_reduce",
    "robust_decomposition", "partial_decomposition", "robust_opt", "partial_opt",
    "exponential_mechanism", "mechanism_probabilities", "dp_max_log_ratio",
    "private_sample_size", "private_size_table", "semiprivate_reduce", "stable_reduce", "stable_sizes",
    "shift_robust_learner", "covariate_shift_reduce", "response_grid", "sq_cover", "sq_reduce",
    "sq_worst_case", "HonestOracle", "AdversarialOracle", "fair_reduce", "fair_opt",
    "EmptyFairCoverError",
]
