"""Agnostic learning through covers built by realizable learners."""
from .core import Hypothesis, HypothesisClass, InputError, LabelSpace, ResourceError, growth_function, restrict
from .distributions import Distribution, JointDistribution, LabeledSample, derive_seed
from .losses import Loss, PerturbationMap, verify_tags

__version__ = "0.1.0"
