"""Experiment configuration and the Monte Carlo trial engine.

A config names one reduction, a class, a planted distribution and a loss.
``run_experiment`` builds the fixed instance once, computes the exact optimum,
and runs the reduction once per derived seed.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..core import DEFAULT_BUDGET, STAR, Hypothesis, HypothesisClass, InputError, LabelSpace, ResourceError
from ..distributions import (Distribution, JointDistribution, MaliciousOracle, WorstLabel, derive_seed,
                             opt_risk, risk)
from ..learners import consistent_erm_learner, discretize, robust_erm_learner, sq_learner
from ..losses import (FairnessMetric, Loss, PerturbationMap, is_fair, partial_risk, robust_risk,
                      verify_tags)
from ..reduction import (HonestOracle, ReductionConfig, agnostic_reduce, covariate_shift_reduce,
                         doubly_bounded_reduce, fair_opt, fair_reduce, malicious_reduce, partial_opt,
                         partial_reduce, pseudometric_reduce, robust_opt, robust_reduce,
                         semiprivate_reduce, shift_robust_learner, sq_reduce, stable_reduce)
from .report import TrialReport, TrialRow
from .stats import CONFIDENCE

EXPERIMENTS = ("agnostic", "pseudometric", "bounded", "malicious", "robust", "partial",
               "semiprivate", "stable", "covshift", "fair", "sq")

TOL = 1e-9


@dataclass
class ExperimentConfig:
    name: str
    experiment: str
    class_spec: dict
    distribution: dict = field(default_factory=dict)
    loss: dict = field(default_factory=lambda: {"kind": "zero_one"})
    params: dict = field(default_factory=dict)
    perturbation: dict = field(default_factory=dict)
    fairness: dict = field(default_factory=dict)
    trials: int = 500
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    confidence: float = CONFIDENCE

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise InputError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        if self.trials < 0:
            raise InputError("trials must be non-negative")
        if self.experiment != "sq":
            self.reduction_config()
        if self.experiment in ("semiprivate", "stable") and "alpha" not in self.params:
            raise InputError(f"{self.experiment} needs params.alpha")
        if self.experiment == "sq" and "tau" not in self.params:
            raise InputError("sq needs params.tau")
        if self.experiment == "fair":
            for k in ("scale", "alpha", "gamma"):
                if k not in self.fairness:
                    raise InputError(f"fair needs fairness.{k}")

    def reduction_config(self) -> ReductionConfig:
        p = self.params
        try:
            return ReductionConfig(float(p["eps"]), float(p["delta"]), p.get("alpha"), float(p.get("eta", 0.0)),
                                   p.get("m_U"), p.get("m_L"), self.budget)
        except KeyError as exc:
            raise InputError(f"params.{exc.args[0]} is required") from None

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        if "class" not in d:
            raise InputError("config needs a [class] table")
        cfg = cls(name=d.pop("name", d.get("experiment", "experiment")),
                  experiment=d.pop("experiment", ""), class_spec=d.pop("class"),
                  distribution=d.pop("distribution", {}), loss=d.pop("loss", {"kind": "zero_one"}),
                  params=d.pop("params", {}), perturbation=d.pop("perturbation", {}),
                  fairness=d.pop("fairness", {}), trials=int(d.pop("trials", 500)),
                  seed=int(d.pop("seed", 0)), budget=int(d.pop("budget", DEFAULT_BUDGET)),
                  confidence=float(d.pop("confidence", CONFIDENCE)))
        if d:
            raise InputError(f"unknown config keys {sorted(d)}")
        cfg.validate()
        return cfg

    @classmethod
    def from_toml(cls, text: str) -> "ExperimentConfig":
        try:
            return cls.from_dict(tomllib.loads(text))
        except tomllib.TOMLDecodeError as exc:
            raise InputError(f"bad config: {exc}") from None

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_toml(Path(path).read_text())


# instance builders


def pair_thresholds(n: int) -> HypothesisClass:
    """Thresholds whose outputs are the pair labels ``(b, 0)``."""
    return HypothesisClass(2 * HypothesisClass.thresholds(n).members, LabelSpace.pairs())


def band_thresholds(n: int, width: int = 1) -> HypothesisClass:
    """Partial thresholds: 0 below ``t``, 1 from ``t + width``, undefined in between."""
    x = np.arange(n)
    rows = []
    for t in range(n + 1):
        r = np.where(x < t, 0, np.where(x >= t + width, 1, STAR))
        rows.append(r)
    return HypothesisClass(np.array(rows, dtype=np.int64), LabelSpace.binary())


def fair_ramps(n: int, levels: int = 5) -> HypothesisClass:
    """Sharp thresholds and one-level-per-point ramps over a grid of ``levels`` values in ``[0, 1]``."""
    top = levels - 1
    labels = LabelSpace.grid([j / top for j in range(levels)])
    rows = []
    for t in range(n + 1):
        rows.append([top if x >= t else 0 for x in range(n)])
    for s in range(-top + 1, n):
        rows.append([min(top, max(0, x - s + 1)) for x in range(n)])
    return HypothesisClass(np.array(rows, dtype=np.int64), labels)


def build_class(spec: dict) -> HypothesisClass:
    spec = dict(spec)
    if "rows" in spec:
        rows = [[STAR if v == "*" else int(v) for v in r] for r in spec["rows"]]
        return HypothesisClass.explicit(rows)
    family = spec.pop("family", None)
    local = {"pair-thresholds": pair_thresholds, "band-thresholds": band_thresholds,
             "fair-ramps": fair_ramps}
    if family in local:
        return local[family](**spec)
    if family is None:
        raise InputError("class needs a family or rows")
    return HypothesisClass.from_family(family, **spec)


def build_marginal(spec: dict, n: int) -> Distribution:
    if "weights" in spec:
        w = spec["weights"]
        if len(w) != n:
            raise InputError("marginal weights must cover every point")
        return Distribution(w)
    kind = spec.get("marginal", "uniform")
    if kind != "uniform":
        raise InputError(f"unknown marginal {kind!r}")
    return Distribution.uniform(n)


def build_distribution(spec: dict, H: HypothesisClass) -> JointDistribution:
    """Labels from ``labels`` or member ``target`` (default 0), flipped with probability ``noise``."""
    marginal = build_marginal(spec, H.n_points)
    if "labels" in spec:
        h = Hypothesis(tuple(int(v) for v in spec["labels"]))
    else:
        h = H[int(spec.get("target", 0))]
    noise = spec.get("noise", 0)
    noise = str(noise) if isinstance(noise, float) else noise
    return JointDistribution.from_labeling(marginal, h, noise, H.labels, spec.get("noisy_points"))


def build_loss(spec: dict, H: HypothesisClass) -> Loss:
    kind = spec.get("kind", "zero_one")
    if kind == "zero_one":
        return Loss.zero_one(len(H.labels))
    if kind == "ternary":
        return Loss.ternary(spec.get("c", 3))
    if kind == "bounded":
        return Loss.bounded(len(H.labels), str(spec.get("a", 1)), str(spec.get("b", 4)))
    if kind in ("absolute", "squared"):
        return Loss.from_payloads(H.labels, kind)
    raise InputError(f"unknown loss {kind!r}")


def shifted_marginal(D: Distribution, source: int, dest: int, amount: float) -> Distribution:
    """``D`` with ``amount`` of mass moved from point ``source`` to point ``dest``."""
    w = [float(v) for v in D.mass]
    if amount > w[source] + TOL:
        raise InputError("cannot move more mass than the point holds")
    w[source] -= amount
    w[dest] += amount
    return Distribution(w)


# per-experiment trial functions; each returns (opt, trial) with
# trial(seed) -> (achieved, success, cover_size, m_U, m_L)


def _instance(cfg: ExperimentConfig):
    H = build_class(cfg.class_spec)
    D = build_distribution(cfg.distribution, H)
    loss = build_loss(cfg.loss, H)
    return H, D, loss


def _prepare(cfg: ExperimentConfig):
    H, D, loss = _instance(cfg)
    ex = cfg.experiment
    if ex == "sq":
        tau = float(cfg.params["tau"])
        L = sq_learner(H, tau)
        opt = float(opt_risk(H, D, loss)[0])
        slack = float(cfg.params.get("eps", L.eps)) + tau

        def sq_trial(seed):
            r = sq_reduce(L, HonestOracle(D), tau, loss=loss, n_points=H.n_points, budget=cfg.budget)
            got = float(risk(r.hypothesis, D, loss))
            return got, got <= opt + slack + TOL, len(r.cover), 0, 0
        return opt, sq_trial

    rc = cfg.reduction_config()
    eps = rc.eps

    def scored(run, measure, bound):
        def trial(seed):
            r = run(seed)
            got = float(measure(r.hypothesis))
            return got, got <= bound + eps + TOL, r.cover_size, r.m_U, r.m_L
        return trial

    if ex in ("agnostic", "semiprivate", "stable"):
        opt = float(opt_risk(H, D, loss)[0])
        A = consistent_erm_learner(H, None if loss.is_zero_one else loss)
        fn = {"agnostic": agnostic_reduce, "semiprivate": semiprivate_reduce, "stable": stable_reduce}[ex]
        return opt, scored(lambda s: fn(A, H, D, D, rc, s, loss), lambda h: risk(h, D, loss), opt)
    if ex in ("pseudometric", "bounded"):
        opt = float(opt_risk(H, D, loss)[0])
        disc = discretize(H, loss, eps)
        if ex == "pseudometric":
            c = verify_tags(loss).c
            if c is None:
                raise InputError("pseudometric experiment needs an approximate-pseudometric loss")
            bound = float(c) * opt
            fn = pseudometric_reduce
        else:
            bound = opt
            fn = doubly_bounded_reduce
        return opt, scored(lambda s: fn(disc, D, D, rc, s), lambda h: risk(h, D, loss), bound)
    if ex == "malicious":
        opt = float(opt_risk(H, D, loss)[0])
        oracle = MaliciousOracle(D, rc.eta, WorstLabel(D, H, loss))
        A = consistent_erm_learner(H)
        return opt, scored(lambda s: malicious_reduce(A, H, oracle, rc, s, loss),
                           lambda h: risk(h, D, loss), opt)
    if ex == "robust":
        U = PerturbationMap.line(H.n_points, int(cfg.perturbation.get("radius", 1)))
        opt = float(robust_opt(H, D, U, loss))
        A = robust_erm_learner(H, U, loss)
        subsets = cfg.params.get("subsets", "regions")
        return opt, scored(lambda s: robust_reduce(A, H, D, D, U, rc, s, loss, subsets),
                           lambda h: robust_risk(h, D, U, loss), opt)
    if ex == "partial":
        opt = float(partial_opt(H, D))
        A = consistent_erm_learner(H)
        subsets = cfg.params.get("subsets", "regions")
        return opt, scored(lambda s: partial_reduce(A, H, D, D, rc, s, subsets),
                           lambda h: partial_risk(h, D), opt)
    if ex == "covshift":
        p = cfg.params
        src = int(p.get("shift_from", 0))
        amount = float(p.get("shift", min(eps / 2, float(D.marginal.mass[src]))))
        target = shifted_marginal(D.marginal, src, int(p.get("shift_to", H.n_points - 1)), amount)
        D2 = D.with_marginal(target)
        opt = float(opt_risk(H, D2, loss)[0])
        A = shift_robust_learner(H)
        return opt, scored(lambda s: covariate_shift_reduce(A, H, D, D2, rc, s, loss, D.marginal),
                           lambda h: risk(h, D2, loss), opt)
    if ex == "fair":
        f = cfg.fairness
        metric = FairnessMetric.line(H.n_points, float(f["scale"]), float(f["alpha"]), float(f["gamma"]),
                                     eps_alpha=float(f.get("eps_alpha", 0.0)),
                                     eps_gamma=float(f.get("eps_gamma", 0.0)))
        fl = Loss.from_payloads(H.labels, "absolute")
        best, _ = fair_opt(H, D, metric, fl)
        if best is None:
            raise InputError("no member is fair at the target parameters")
        opt = float(best)

        def fair_trial(seed):
            r = fair_reduce(H, D, D, metric, rc, seed, D.marginal, loss=fl)
            got = float(risk(r.hypothesis, D, fl))
            ok = is_fair(r.hypothesis, D.marginal, metric, H.labels, slack=True) and got <= opt + eps + TOL
            return got, ok, r.cover_size, r.m_U, r.m_L
        return opt, fair_trial
    raise InputError(f"unknown experiment {ex!r}")


def run_experiment(cfg: ExperimentConfig, trials: int | None = None, seed: int | None = None) -> TrialReport:
    """Run ``cfg`` and return one row per trial.

    Trial ``t`` uses seed ``derive_seed(seed, t)``, so any row can be replayed
    alone.  A resource error stops the run and flags the report incomplete.
    """
    cfg.validate()
    trials = cfg.trials if trials is None else trials
    seed = cfg.seed if seed is None else seed
    target = 1.0 if cfg.experiment == "sq" else 1 - float(cfg.params["delta"])
    report = TrialReport(cfg.name, target, cfg.confidence)
    if trials == 0:
        return report
    opt, trial = _prepare(cfg)
    for t in range(trials):
        s = derive_seed(seed, t)
        try:
            got, ok, size, m_U, m_L = trial(s)
        except ResourceError as exc:
            report.complete = False
            report.note = f"trial {t}: {exc}"
            break
        report.add(TrialRow(t, s, opt, got, bool(ok), int(size), int(m_U), int(m_L)))
    return report


def replay_trial(cfg: ExperimentConfig, trial: int, seed: int | None = None) -> TrialRow:
    """Re-run a single trial by index."""
    seed = cfg.seed if seed is None else seed
    opt, fn = _prepare(cfg)
    s = derive_seed(seed, trial)
    got, ok, size, m_U, m_L = fn(s)
    return TrialRow(trial, s, opt, got, bool(ok), int(size), int(m_U), int(m_L))
