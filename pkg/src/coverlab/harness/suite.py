"""The acceptance battery: one deterministic pass/fail line per criterion."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, comb, e
from typing import Callable

import numpy as np

from ..core import HypothesisClass, growth_function
from ..distributions import Distribution, JointDistribution, derive_seed, risk
from ..learners import consistent_erm_learner, constant_learner, robust_erm_learner, signature_sq_learner, sq_learner
from ..losses import FairnessMetric, Loss, PerturbationMap, PreconditionError, is_fair
from ..reduction import (ReductionConfig, agnostic_reduce, fair_opt, fair_reduce, partial_decomposition,
                         partial_reduce, private_size_table, response_grid, robust_decomposition,
                         robust_reduce, sq_worst_case)
from ..reduction.cover import cost_tables, learning_to_cover
from ..reduction.noise import check_malicious
from ..reduction.private import StableRunner, dp_max_log_ratio, stable_sizes
from ..covers import (CoverDistribution, FractionalCover, coupon_miss_probability, cover_from_fractional,
                      estimate_nonuniform, fractional_coverage, frac_to_nonuniform, is_eps_cover,
                      max_packing, nonuniform_to_frac, realizable_to_uniform, separation_experiment)
from .experiments import ExperimentConfig, band_thresholds, build_class, build_distribution, run_experiment
from .lowerbounds import c_agnostic_k, first_coordinate_zero, ternary_lower_bound_experiment
from .stats import CONFIDENCE, hoeffding_check, hoeffding_slack, paired_slack

TOL = 1e-9


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: tuple[str, ...]

    def line(self) -> str:
        return f"criterion {self.number:02d} {'PASS' if self.passed else 'FAIL'}  {self.title}"

    def text(self) -> str:
        return "\n".join([self.line()] + [f"    {d}" for d in self.details])


def _freq(r) -> str:
    return f"{r.frequency:.4f} vs bound {r.bound:.4f} (slack {r.slack:.4f})"


def _report_line(label: str, rep) -> str:
    a = rep.aggregate()
    return (f"{label}: {a['successes']}/{a['trials']} = {a['frequency']:.4f}, "
            f"bound {a['bound']:.4f}, complete={rep.complete}")


# configs shared with the shipped examples


def suite_configs() -> dict[str, dict]:
    thr = lambda n: {"family": "thresholds", "n": n}
    return {
        "agnostic-realizable": {"experiment": "agnostic", "class": thr(100),
                                "distribution": {"target": 50}, "params": {"eps": 0.15, "delta": 0.1},
                                "trials": 500},
        "agnostic-noisy": {"experiment": "agnostic", "class": thr(100),
                           "distribution": {"target": 50, "noise": "1/10"},
                           "params": {"eps": 0.15, "delta": 0.1}, "trials": 500},
        "pseudometric": {"experiment": "pseudometric", "class": {"family": "pair-thresholds", "n": 20},
                         "distribution": {"target": 8, "noise": "1/20"}, "loss": {"kind": "ternary", "c": 3},
                         "params": {"eps": 0.3, "delta": 0.1}, "trials": 300},
        "bounded": {"experiment": "bounded", "class": thr(20), "distribution": {"target": 8, "noise": "1/10"},
                    "loss": {"kind": "bounded", "a": 1, "b": 4}, "params": {"eps": 0.2, "delta": 0.1},
                    "trials": 300},
        "malicious": {"experiment": "malicious", "class": thr(8), "distribution": {"target": 4},
                      "params": {"eps": 0.25, "delta": 0.1, "eta": 0.5 * 0.25 / 1.25, "m_U": 10},
                      "trials": 300},
        "semiprivate": {"experiment": "semiprivate", "class": thr(50),
                        "distribution": {"target": 20, "noise": "1/10"},
                        "params": {"eps": 0.15, "delta": 0.1, "alpha": 1.0}, "trials": 300},
        "robust": {"experiment": "robust", "class": thr(10), "distribution": {"target": 5, "noise": "1/10"},
                   "perturbation": {"radius": 1}, "params": {"eps": 0.2, "delta": 0.1}, "trials": 200},
        "partial": {"experiment": "partial", "class": {"family": "band-thresholds", "n": 10, "width": 1},
                    "distribution": {"labels": [0] * 5 + [1] * 5, "noise": "1/20"},
                    "params": {"eps": 0.2, "delta": 0.1}, "trials": 200},
        "fair": {"experiment": "fair", "class": {"family": "fair-ramps", "n": 8},
                 "distribution": {"labels": [0] * 4 + [4] * 4, "noise": "1/20"},
                 "params": {"eps": 0.2, "delta": 0.1},
                 "fairness": {"scale": 0.3, "alpha": 0.05, "gamma": 0.2, "eps_alpha": 0.02},
                 "trials": 200},
        "covshift": {"experiment": "covshift", "class": thr(20), "distribution": {"target": 8, "noise": "1/20"},
                     "params": {"eps": 0.2, "delta": 0.1}, "trials": 200},
        "stable": {"experiment": "stable", "class": thr(20), "distribution": {"target": 8, "noise": "1/20"},
                   "params": {"eps": 0.2, "delta": 0.2, "alpha": 0.2}, "trials": 200},
        "sq": {"experiment": "sq", "class": thr(3), "distribution": {"target": 1}, "params": {"tau": 0.25},
               "trials": 1},
    }


def _run(name: str, seed: int, **over):
    cfg = ExperimentConfig.from_dict(dict(suite_configs()[name], name=name, **over))
    return cfg, run_experiment(cfg, seed=seed)


# criteria


def c01_nonuniform_cover(seed: int) -> CriterionResult:
    H = HypothesisClass.thresholds(100)
    D = Distribution.uniform(100)
    A = consistent_erm_learner(H)
    eps, delta, trials = 0.1, 0.1, 500
    n = A.n(eps, delta)
    gen = CoverDistribution(lambda s: learning_to_cover(A, H, D.draw(n, s), s).members, None, "cover")
    members = list(range(5, 100, 10))
    est = estimate_nonuniform(gen, H.members[members], D, eps, Loss.zero_one(2), trials, seed)
    checks = [hoeffding_check(round(f * trials), trials, 1 - delta) for f in est.per_member]
    worst = min(checks, key=lambda r: r.frequency)
    return CriterionResult(1, "non-uniform cover from a realizable learner", all(c.passed for c in checks),
                           (f"sample size {n}, members {members}",
                            f"lowest member coverage {_freq(worst)}",
                            f"simultaneous coverage of the 10 members {est.uniform:.4f} (reported only)"))


def c02_agnostic(seed: int, store: dict) -> CriterionResult:
    lines, ok = [], True
    for i, name in enumerate(("agnostic-realizable", "agnostic-noisy")):
        cfg, rep = _run(name, derive_seed(seed, i))
        store[name] = (cfg, rep)
        ok &= rep.passed
        lines.append(_report_line(f"{name} (OPT={rep.rows[0].opt:g})", rep))
    return CriterionResult(2, "agnostic reduction: risk <= OPT + eps", ok, tuple(lines))


def c03_cover_size(seed: int, store: dict) -> CriterionResult:
    H = HypothesisClass.thresholds(100)
    bad, total = 0, 0
    for name in ("agnostic-realizable", "agnostic-noisy"):
        for r in store[name][1].rows:
            total += 1
            bad += r.cover_size > growth_function(H, r.m_U)
    return CriterionResult(3, "cover size never exceeds the growth function", bad == 0 and total > 0,
                           (f"{total} trials checked, {bad} violations",))


def c04_ternary(seed: int) -> CriterionResult:
    c = 3
    base = ternary_lower_bound_experiment(8, 2, c)
    H = first_coordinate_zero(8, 2)
    const = ternary_lower_bound_experiment(8, 2, c, learner=constant_learner(H, 0))
    zero = ternary_lower_bound_experiment(8, 0, c)
    k = c_agnostic_k(1, 4)
    wide = ternary_lower_bound_experiment(k, 1, c, n=4)
    # with no sample every prediction faces a uniform label: cost c w.p. 1/4, cost 1 w.p. 1/4
    ok = base.passed and const.passed and wide.passed and zero.expected == Fraction(1 + c, 4)
    return CriterionResult(4, "ternary-loss lower bound, exact enumeration", ok, (
        f"k=8 m=2 c={c} ERM: expected loss {base.expected} = {float(base.expected):.6f} >= c/12 = {base.bar:.6f}; "
        f"meets c/(4e) = {c / (4 * e):.6f}: {base.meets_4e}",
        f"k=8 m=2 constant learner: {const.expected} >= c/(4e): {const.meets_4e}",
        f"m=0: expected loss {zero.expected} = c/4 + 1/4",
        f"c-agnostic variant n=4 k={k} m=1: {float(wide.expected):.6f} >= (3/4)^3 c = {wide.bar:.6f}"))


def _trial_criterion(number: int, title: str, name: str, seed: int, extra: tuple = ()) -> CriterionResult:
    cfg, rep = _run(name, seed)
    return CriterionResult(number, title, rep.passed, (_report_line(name, rep),) + extra)


def c05_pseudometric(seed: int) -> CriterionResult:
    return _trial_criterion(5, "c-agnostic reduction for the ternary loss (c = 3 verified)", "pseudometric", seed)


def c06_bounded(seed: int) -> CriterionResult:
    return _trial_criterion(6, "doubly-bounded loss (1, 4): risk <= OPT + eps", "bounded", seed)


def c07_malicious(seed: int) -> CriterionResult:
    eps = 0.25
    cfg, rep = _run("malicious", seed)
    rejected = []
    for eta in (eps / (1 + eps), 0.25):
        try:
            check_malicious(ReductionConfig(eps, 0.1, eta=eta))
            rejected.append(False)
        except PreconditionError:
            rejected.append(True)
    check_malicious(ReductionConfig(eps, 0.1, eta=0.5 * eps / (1 + eps)))
    rc = cfg.reduction_config()
    keep = int(np.floor((1 - rc.eta_prime) * 10 + 1e-9))
    return CriterionResult(7, "malicious noise at half the tolerable rate", rep.passed and all(rejected), (
        _report_line("malicious", rep),
        f"eta={rc.eta:.4f}, eta'={rc.eta_prime:.4f}, subsets C(10,{keep}) = {comb(10, keep)}",
        f"eta = eps/(1+eps) and eta = 0.25 rejected: {rejected}"))


def c08_privacy(seed: int) -> CriterionResult:
    H = HypothesisClass.thresholds(12)
    D = JointDistribution.from_labeling(Distribution.uniform(12), H[6], Fraction(1, 10))
    A = consistent_erm_learner(H)
    L = Loss.zero_one(2)
    lines, ok = [], True
    for j in range(3):
        s = derive_seed(seed, j)
        cover = learning_to_cover(A, H, D.marginal.draw(8, s), s)
        S = D.draw(6, derive_seed(s, 1))
        tables = cost_tables(cover, L.array)
        for alpha in (0.5, 1.0):
            v, where = dp_max_log_ratio(tables, S, alpha)
            ok &= len(cover) <= 20 and v <= alpha + 1e-9
            lines.append(f"draw {j} |cover|={len(cover)} alpha={alpha}: max log ratio {v:.12f} at {where}")
    return CriterionResult(8, "exact differential privacy of the selection step", ok, tuple(lines))


def c09_semiprivate(seed: int) -> CriterionResult:
    cfg, rep = _run("semiprivate", seed)
    H = HypothesisClass.thresholds(50)
    rows = private_size_table(H, consistent_erm_learner(H), (0.2, 0.1, 0.05), 0.1, 1.0)
    ratios = [r.ratio_sauer for r in rows]
    band = max(ratios) / min(ratios)
    lines = [_report_line("semiprivate", rep),
             "eps    m_pub  growth  m_pri  m_pri(Sauer)  ratio(Sauer)"]
    for r in rows:
        lines.append(f"{r.eps:<6} {r.m_pub:<6} {r.growth:<7} {r.m_pri:<6} {r.m_pri_sauer:<13} {r.ratio_sauer:.4f}")
    lines.append(f"ratio band max/min {band:.4f} (<= 2 required)")
    return CriterionResult(9, "semi-private accuracy and private sample size scaling",
                           rep.passed and band <= 2, tuple(lines))


def _equivalence(run_a: Callable[[int], object], run_b: Callable[[int], object], seeds) -> int:
    same = 0
    for s in seeds:
        a, b = run_a(s), run_b(s)
        same += a.hypothesis == b.hypothesis and a.m_L == b.m_L and a.index == b.index
    return same


def c10_robust(seed: int) -> CriterionResult:
    cfg, rep = _run("robust", seed)
    H = HypothesisClass.thresholds(10)
    D = JointDistribution.from_labeling(Distribution.uniform(10), H[5], Fraction(1, 10))
    L = Loss.zero_one(2)
    rc = ReductionConfig(0.2, 0.1, m_U=40)
    I = PerturbationMap.identity(10)
    A, R = consistent_erm_learner(H), robust_erm_learner(H, I, L)
    seeds = [derive_seed(seed, 100 + i) for i in range(20)]
    same = _equivalence(lambda s: robust_reduce(R, H, D, D, I, rc, s, L),
                        lambda s: agnostic_reduce(A, H, D, D, rc, s, L), seeds)
    U = PerturbationMap.line(10, 1)
    opt, mu, inner, best = robust_decomposition(H, D, U, L)
    exact = opt == mu + (1 - mu) * inner
    return CriterionResult(10, "robust reduction", rep.passed and same == len(seeds) and exact, (
        _report_line("robust", rep),
        f"identity perturbations match the agnostic path on {same}/{len(seeds)} seeds",
        f"OPT {opt} = mu* {mu} + (1 - mu*) OPT' {inner}: {exact}"))


def c11_partial(seed: int) -> CriterionResult:
    cfg, rep = _run("partial", seed)
    H = HypothesisClass.thresholds(10)
    D = JointDistribution.from_labeling(Distribution.uniform(10), H[5], Fraction(1, 10))
    rc = ReductionConfig(0.2, 0.1, m_U=40)
    A = consistent_erm_learner(H)
    seeds = [derive_seed(seed, 100 + i) for i in range(20)]
    same = _equivalence(lambda s: partial_reduce(A, H, D, D, rc, s),
                        lambda s: agnostic_reduce(A, H, D, D, rc, s), seeds)
    B = band_thresholds(10, 1)
    DB = build_distribution(suite_configs()["partial"]["distribution"], B)
    opt, mu, inner, best = partial_decomposition(B, DB)
    exact = opt == mu + (1 - mu) * inner
    return CriterionResult(11, "partial-concept reduction", rep.passed and same == len(seeds) and exact, (
        _report_line("partial", rep),
        f"total members match the agnostic path on {same}/{len(seeds)} seeds",
        f"OPT {opt} = mu* {mu} + (1 - mu*) OPT' {inner}: {exact}"))


def c12_stability(seed: int, trials: int = 10_000) -> CriterionResult:
    H = HypothesisClass.thresholds(20)
    D = JointDistribution.from_labeling(Distribution.uniform(20), H[8], Fraction(1, 20))
    A = consistent_erm_learner(H)
    alpha = 0.2
    rc = ReductionConfig(0.2, 0.2, alpha=alpha)
    n, pool_size = stable_sizes(A, rc)
    pool = D.marginal.draw(pool_size, derive_seed(seed, 0))
    S_L = D.draw(400, derive_seed(seed, 1))
    moved = pool.copy()
    moved[0] = (pool[0] + 10) % 20
    S_L2 = type(S_L)(S_L.points.copy(), S_L.labels.copy())
    S_L2.points[0], S_L2.labels[0] = (S_L.points[0] + 10) % 20, 1 - S_L.labels[0]
    runners = {"base": StableRunner(A, H, pool, S_L, rc, n=n),
               "unlabeled neighbor": StableRunner(A, H, moved, S_L, rc, n=n),
               "labeled neighbor": StableRunner(A, H, pool, S_L2, rc, n=n)}
    preds = {k: np.zeros(20) for k in runners}
    included = 0
    for t in range(trials):
        s = derive_seed(seed, 1000 + t)
        for k, r in runners.items():
            h, idx, _ = r.run(s)
            preds[k] += np.array(h.labels)
            if k == "base":
                included += 0 in idx
    slack = paired_slack(trials, 2 * 20)
    lines = [f"subset size {n}, pool {pool_size}, {trials} paired seeds, slack {slack:.4f}"]
    ok = True
    for k in ("unlabeled neighbor", "labeled neighbor"):
        shift = float(np.abs(preds[k] - preds["base"]).max() / trials)
        ok &= shift <= alpha + slack
        lines.append(f"{k}: largest shift in P(h(x)=1) {shift:.4f} <= {alpha + slack:.4f}")
    inc = hoeffding_check(trials - included, trials, 1 - alpha / 2)
    ok &= inc.passed
    lines.append(f"pool position 0 chosen with frequency {included / trials:.4f}, "
                 f"at most alpha/2 + slack = {alpha / 2 + inc.slack:.4f}")
    return CriterionResult(12, "uniform stability of the subsampled mechanism", ok, tuple(lines))


def c13_sq(seed: int) -> CriterionResult:
    tau = 0.25
    H = HypothesisClass.thresholds(3)
    D = JointDistribution.from_labeling(Distribution.uniform(3), H[1], Fraction(1, 10))
    L = Loss.zero_one(2)
    y = np.array([[-1.0, 1.0]] * 3)
    probes = [y, y * np.array([[0.0], [1.0], [1.0]])]
    learner = signature_sq_learner(H, D.marginal, probes, tau)
    worst, patterns, cover, combos = sq_worst_case(learner, D, L)
    opt = float(min(risk(h, D, L) for h in H))
    grid = response_grid(tau)
    ok = combos == 25 and len(grid) == 5 and worst <= opt + learner.eps + tau + TOL
    X = HypothesisClass.explicit([(0, 0, 0, 0), (0, 1, 0, 1), (0, 0, 1, 1), (0, 1, 1, 0)])
    D2 = JointDistribution.from_labeling(Distribution.uniform(4), X[3], Fraction(1, 10))
    el = sq_learner(X, 0.2)
    worst2, _, cover2, combos2 = sq_worst_case(el, D2, L)
    opt2 = float(min(risk(h, D2, L) for h in X))
    ok &= worst2 <= opt2 + el.eps + el.tau + TOL
    return CriterionResult(13, "statistical-query reduction, exact worst case", ok, (
        f"grid {grid}; {combos} answer sequences; cover {len(cover)}; {patterns} adversarial patterns",
        f"signature learner (separation {learner.separation:.4f}): worst risk {worst:.4f} "
        f"<= OPT {opt:.4f} + eps {learner.eps} + tau {tau}",
        f"parity pairs, elimination learner: {combos2} sequences, worst {worst2:.4f} "
        f"<= {opt2:.4f} + {el.eps:.2f} + {el.tau}"))


def c14_fair(seed: int, trials: int = 200) -> CriterionResult:
    cfg = ExperimentConfig.from_dict(dict(suite_configs()["fair"], name="fair"))
    H = build_class(cfg.class_spec)
    D = build_distribution(cfg.distribution, H)
    f = cfg.fairness
    metric = FairnessMetric.line(8, f["scale"], f["alpha"], f["gamma"], eps_alpha=f["eps_alpha"])
    L = Loss.from_payloads(H.labels, "absolute")
    opt, _ = fair_opt(H, D, metric, L)
    rc = cfg.reduction_config()
    fair_all, good = True, 0
    for t in range(trials):
        r = fair_reduce(H, D, D, metric, rc, derive_seed(seed, t), D.marginal, loss=L)
        fair_all &= is_fair(r.hypothesis, D.marginal, metric, H.labels, slack=True)
        good += float(risk(r.hypothesis, D, L)) <= float(opt) + rc.eps + TOL
    acc = hoeffding_check(good, trials, 1 - rc.delta)
    unconstrained = min(float(risk(h, D, L)) for h in H)
    return CriterionResult(14, "metric-fair learning", fair_all and acc.passed, (
        f"fair optimum {float(opt):.6f} (unconstrained {unconstrained:.6f})",
        f"relaxed fairness held on every trial: {fair_all}",
        f"accuracy {_freq(acc)}"))


def c15_separation(seed: int) -> CriterionResult:
    miss = coupon_miss_probability(10, 24)
    rep = separation_experiment(30, 0.15, 0.1, 500, seed, claim_sets=[(1, 2, 3, 4, 5), (0, 1, 2, 3, 4)])
    claims_ok = all(cnt <= bound for _, cnt, bound in rep.claim_counts)
    cov = hoeffding_check(round(float(rep.per_member.min()) * 500), 500, 0.9)
    ok = miss >= Fraction(1, 2) and claims_ok and cov.passed
    lines = [f"coupon miss probability k=10, 24 draws: {float(miss):.12f} >= 0.5",
             f"k={rep.k}, construction draws {rep.construction_draws}, largest cover {rep.max_size}"]
    for C, cnt, bound in rep.claim_counts:
        lines.append(f"cover {C}: covers {cnt} of {comb(30, 3)} targets, at most C(5,3) = {bound}")
    lines.append(f"construction coverage, lowest member {_freq(cov)}")
    return CriterionResult(15, "separation of uniform and non-uniform covers", ok, tuple(lines))


def c16_conversions(seed: int) -> CriterionResult:
    L = Loss.zero_one(2)
    H = HypothesisClass.thresholds(20)
    D = Distribution.uniform(20)
    eps, delta, trials = 0.1, 0.1, 500
    law = [(H[i], 1.0) for i in range(0, 21, 2)]
    f = FractionalCover.from_law(law, eps, 0.0)
    p = float(fractional_coverage(f, H, D, L).min())
    f = FractionalCover.from_law(law, eps, p)
    gen = frac_to_nonuniform(f, p, delta)
    est = estimate_nonuniform(gen, H, D, eps, L, trials, derive_seed(seed, 0))
    c1 = hoeffding_check(round(est.min_member * trials), trials, 1 - delta)
    greedy = cover_from_fractional(f, p, eps, H, D, L)
    is_cover, _ = is_eps_cover(greedy, H, D, 2 * eps, L)
    pack = max_packing(H, D, 2 * eps, L)
    bound = ceil(1 / p - 1e-12)
    H10 = HypothesisClass.thresholds(10)
    A10 = consistent_erm_learner(H10)
    m = A10.n(eps, delta)
    k = growth_function(H10, m)
    D10 = Distribution.uniform(10)
    g10 = CoverDistribution(lambda s: learning_to_cover(A10, H10, D10.draw(m, s), s).members, k)
    frac = nonuniform_to_frac(g10, k, eps)
    n_frac = 10_000
    cov = fractional_coverage(frac, H10, D10, L, n_frac, derive_seed(seed, 1))
    c2 = float(cov.min()) >= frac.p - hoeffding_slack(n_frac)
    A = consistent_erm_learner(H)
    ugen, urep = realizable_to_uniform(A, H, D, 0.2, 0.2)
    uest = estimate_nonuniform(ugen, H, D, 0.2, L, trials, derive_seed(seed, 2))
    c3 = hoeffding_check(round(uest.uniform * trials), trials, 0.8)
    ok = c1.passed and is_cover and len(greedy) <= bound + 1 and len(pack) <= bound and c2 and c3.passed
    return CriterionResult(16, "conversions between fractional, non-uniform and uniform covers", ok, (
        f"fractional law on every other threshold, exact p = {p:.4f}; "
        f"{gen.size_bound} draws per set, lowest member coverage {_freq(c1)}",
        f"greedy 2eps-cover size {len(greedy)} <= ceil(1/p) + 1 = {bound + 1}, is a 2eps-cover: {is_cover}; "
        f"largest 2eps-packing {len(pack)} <= {bound}",
        f"non-uniform to fractional: k = {k}, p = 1/(2k) = {frac.p:.4f}, "
        f"lowest member coverage {float(cov.min()):.4f} over {n_frac} draws",
        f"realizable to uniform: sample {urep.n}, simultaneous coverage {_freq(c3)}"))


CRITERIA = 16


def run_suite(seed: int = 0, only: set[int] | None = None) -> list[CriterionResult]:
    """Criteria 1 to 16; the determinism criterion compares two full runs and lives in the caller."""
    store: dict = {}
    s = lambda i: derive_seed(seed, i)
    plan = [
        (1, lambda: c01_nonuniform_cover(s(1))),
        (2, lambda: c02_agnostic(s(2), store)),
        (3, lambda: c03_cover_size(s(3), store)),
        (4, lambda: c04_ternary(s(4))),
        (5, lambda: c05_pseudometric(s(5))),
        (6, lambda: c06_bounded(s(6))),
        (7, lambda: c07_malicious(s(7))),
        (8, lambda: c08_privacy(s(8))),
        (9, lambda: c09_semiprivate(s(9))),
        (10, lambda: c10_robust(s(10))),
        (11, lambda: c11_partial(s(11))),
        (12, lambda: c12_stability(s(12))),
        (13, lambda: c13_sq(s(13))),
        (14, lambda: c14_fair(s(14))),
        (15, lambda: c15_separation(s(15))),
        (16, lambda: c16_conversions(s(16))),
    ]
    if only is not None and 3 in only:
        only = only | {2}
    out = []
    for i, fn in plan:
        if only is None or i in only:
            out.append(fn())
    return out


def suite_text(results: list[CriterionResult], seed: int) -> str:
    lines = [f"coverlab acceptance suite, seed {seed}, confidence {CONFIDENCE:g}"]
    lines += [r.text() for r in results]
    return "\n".join(lines) + "\n"


def determinism(seed: int, first: str) -> CriterionResult:
    second = suite_text(run_suite(seed), seed)
    same = first == second
    return CriterionResult(17, "determinism: two suite runs are byte-identical", same,
                           (f"{len(first.encode())} bytes compared, identical: {same}",))
