"""Finite distributions, joint (instance, label) tables, and sampling oracles.

Masses built from integer or rational weights stay exact
(:class:`fractions.Fraction`); float weights are normalized once.  Every
draw is a pure function of a 64-bit seed.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .core import STAR, DEFAULT_BUDGET, Hypothesis, HypothesisClass, InputError, LabelSpace, ResourceError
from .losses import Loss, UnsupportedError

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Child seed: ``seed XOR splitmix64(index)``."""
    return (int(seed) ^ splitmix64(int(index))) & MASK64


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & MASK64))


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def _normalize(weights: Sequence) -> tuple:
    if len(weights) == 0:
        raise InputError("empty weight vector")
    if all(_is_exact(w) for w in weights):
        vals = [Fraction(w) for w in weights]
        if any(v < 0 for v in vals):
            raise InputError("negative weight")
        total = sum(vals)
        if total <= 0:
            raise InputError("weights sum to zero")
        return tuple(v / total for v in vals)
    vals = np.asarray(weights, dtype=float)
    if (vals < 0).any():
        raise InputError("negative weight")
    total = vals.sum()
    if total <= 0:
        raise InputError("weights sum to zero")
    return tuple(float(v) for v in vals / total)


class Distribution:
    """Probability vector over instance points ``0..n-1``."""

    def __init__(self, weights: Sequence):
        self.mass = _normalize(list(weights))
        self.exact = all(isinstance(m, Fraction) for m in self.mass)
        self.p = np.array([float(m) for m in self.mass])
        self.p.setflags(write=False)
        self._cdf = np.cumsum(self.p)
        self._last = int(np.flatnonzero(self.p)[-1])

    def __len__(self) -> int:
        return len(self.mass)

    def __eq__(self, other) -> bool:
        return isinstance(other, Distribution) and self.mass == other.mass

    def __hash__(self) -> int:
        return hash(self.mass)

    def __repr__(self) -> str:
        return f"Distribution({[str(m) for m in self.mass]})"

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.mass) if m)

    def mass_of(self, points: Iterable[int]):
        pts = set(int(x) for x in points)
        return sum((self.mass[x] for x in pts), Fraction(0) if self.exact else 0.0)

    @classmethod
    def uniform(cls, n: int) -> "Distribution":
        return cls([1] * n)

    @classmethod
    def point_mass(cls, n: int, x: int) -> "Distribution":
        w = [0] * n
        w[x] = 1
        return cls(w)

    @classmethod
    def uniform_on(cls, n: int, subset: Iterable[int]) -> "Distribution":
        w = [0] * n
        for x in subset:
            w[x] = 1
        return cls(w)

    def draw(self, n: int, seed: int) -> np.ndarray:
        u = rng_for(seed).random(n)
        return np.minimum(np.searchsorted(self._cdf, u, side="right"), self._last)

    def dumps(self) -> str:
        if not self.exact:
            raise InputError("only rational distributions serialize exactly")
        return "".join(f"{x},{m.numerator},{m.denominator}\n" for x, m in enumerate(self.mass) if m)

    @classmethod
    def loads(cls, text: str, n: int | None = None) -> "Distribution":
        rows = []
        for ln in text.splitlines():
            ln = ln.strip()
            if ln and not ln.startswith("#"):
                x, num, den = (int(t) for t in ln.split(","))
                rows.append((x, Fraction(num, den)))
        size = n if n is not None else max(x for x, _ in rows) + 1
        w = [Fraction(0)] * size
        for x, m in rows:
            w[x] += m
        if sum(w) != 1:
            raise InputError("serialized masses must sum to one")
        return cls(w)


@dataclass
class DistributionFamily:
    """Finite set of marginals; ``tag`` records how it was generated."""

    members: list[Distribution]
    tag: str = "explicit"
    support: tuple[int, ...] | None = None

    def __iter__(self) -> Iterator[Distribution]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def contains(self, D: Distribution) -> bool:
        if self.tag == "all-on-support":
            return set(D.support) <= set(self.support or ())
        return any(D == M for M in self.members)

    @classmethod
    def singleton(cls, D: Distribution) -> "DistributionFamily":
        return cls([D], "singleton")

    @classmethod
    def k_sets(cls, n: int, k: int, budget: int = DEFAULT_BUDGET) -> "DistributionFamily":
        count = comb(n, k)
        if count > budget:
            raise ResourceError("k-set family", count, budget)
        return cls([Distribution.uniform_on(n, T) for T in itertools.combinations(range(n), k)],
                   "k-sets")

    @classmethod
    def all_on_support(cls, support: Iterable[int]) -> "DistributionFamily":
        return cls([], "all-on-support", tuple(sorted(support)))


@dataclass
class LabeledSample:
    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.int64).reshape(-1)
        self.labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if self.points.shape != self.labels.shape:
            raise InputError("points and labels differ in length")

    def __len__(self) -> int:
        return int(self.points.size)

    def __iter__(self):
        return iter(zip(self.points.tolist(), self.labels.tolist()))

    def pairs(self) -> list[tuple[int, int]]:
        return list(self)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "LabeledSample":
        pairs = list(pairs)
        if not pairs:
            return cls(np.zeros(0), np.zeros(0))
        xs, ys = zip(*pairs)
        return cls(np.array(xs), np.array(ys))


class JointDistribution:
    """Mass table over ``(instance, label)`` pairs."""

    def __init__(self, table: Sequence[Sequence], labels: LabelSpace | None = None,
                 family: DistributionFamily | None = None):
        rows = [list(r) for r in table]
        k = len(rows[0]) if rows else 0
        if not rows or any(len(r) != k for r in rows):
            raise InputError("joint table must be a non-empty rectangle")
        flat = _normalize([v for r in rows for v in r])
        self.table = tuple(tuple(flat[x * k:(x + 1) * k]) for x in range(len(rows)))
        self.labels = labels or LabelSpace.categorical(k)
        if len(self.labels) != k:
            raise InputError("label space size does not match the table")
        self.exact = all(isinstance(v, Fraction) for v in flat)
        self.P = np.array([[float(v) for v in r] for r in self.table])
        self.P.setflags(write=False)
        self.marginal = Distribution([sum(r, Fraction(0)) if self.exact else float(sum(r)) for r in self.table])
        self._cdf = np.cumsum(self.P.reshape(-1))
        self._last = int(np.flatnonzero(self.P.reshape(-1))[-1])
        self.family = family
        if family is not None and not family.contains(self.marginal):
            raise InputError("marginal is outside the declared family")

    @property
    def n_points(self) -> int:
        return len(self.table)

    @property
    def n_labels(self) -> int:
        return len(self.labels)

    def __eq__(self, other) -> bool:
        return isinstance(other, JointDistribution) and self.table == other.table

    @classmethod
    def from_labeling(cls, marginal: Distribution, h: Hypothesis, noise=0,
                      labels: LabelSpace | None = None, noisy_points: Iterable[int] | None = None,
                      **kw) -> "JointDistribution":
        """Labels follow ``h``; with probability ``noise`` a uniformly random other label is used.

        ``noisy_points`` limits the noise to a subset of points.
        """
        labels = labels or LabelSpace.binary()
        k = len(labels)
        if h.partial:
            raise InputError("labeling function must be total")
        noise = Fraction(noise) if _is_exact(noise) or isinstance(noise, str) else noise
        where = set(range(len(marginal))) if noisy_points is None else set(noisy_points)
        table = []
        for x, m in enumerate(marginal.mass):
            row = [0 * m] * k
            q = noise if x in where else 0 * noise
            row[h(x)] += m * (1 - q)
            if k > 1:
                for y in range(k):
                    if y != h(x):
                        row[y] += m * q / (k - 1)
            table.append(row)
        return cls(table, labels, **kw)

    @classmethod
    def from_conditional(cls, marginal: Distribution, conditional: Sequence[Sequence],
                         labels: LabelSpace | None = None, **kw) -> "JointDistribution":
        """``conditional[x][y]`` is the label law at ``x``; rows are normalized."""
        table = []
        for x, m in enumerate(marginal.mass):
            row = _normalize(list(conditional[x]))
            table.append([m * v for v in row])
        return cls(table, labels, **kw)

    def with_marginal(self, marginal: Distribution) -> "JointDistribution":
        """Same conditional label law, new marginal (points with zero mass keep a uniform law)."""
        cond = []
        for x, row in enumerate(self.table):
            tot = sum(row)
            cond.append(list(row) if tot else [1] * self.n_labels)
        return JointDistribution.from_conditional(marginal, cond, self.labels)

    def draw(self, n: int, seed: int) -> LabeledSample:
        u = rng_for(seed).random(n)
        # round-off past the final cumulative mass goes to the last positive cell
        flat = np.minimum(np.searchsorted(self._cdf, u, side="right"), self._last)
        pts, ys = np.divmod(flat, self.n_labels)
        return LabeledSample(pts, ys)

    def dumps(self) -> str:
        if not self.exact:
            raise InputError("only rational tables serialize exactly")
        out = []
        for x, row in enumerate(self.table):
            for y, m in enumerate(row):
                if m:
                    out.append(f"{x},{y},{m.numerator},{m.denominator}\n")
        return "".join(out)


Adversary = Callable[[int, int], tuple[int, int]]


@dataclass(frozen=True)
class FixedPair:
    x: int
    y: int

    def __call__(self, seed: int, index: int) -> tuple[int, int]:
        return (self.x, self.y)


class WorstLabel:
    """Always emits the pair on which the best in-class hypothesis pays the most.

    Ties go to the heavier point under the clean marginal, then the lowest
    ``(x, y)``.
    """

    def __init__(self, base: JointDistribution, H: HypothesisClass, loss: Loss):
        _, argmin = opt_risk(H, base, loss)
        self.target = H[argmin[0]]
        L = loss.table
        best = None
        for x in range(base.n_points):
            for y in range(base.n_labels):
                key = (L[self.target(x)][y], base.marginal.mass[x], -x, -y)
                if best is None or key > best[0]:
                    best = (key, (x, y))
        self.pair = best[1]

    def __call__(self, seed: int, index: int) -> tuple[int, int]:
        return self.pair


@dataclass
class MaliciousOracle:
    """Clean draws from ``base``; each replaced with probability ``rate`` by the adversary's pair."""

    base: JointDistribution
    rate: float
    adversary: Adversary = field(default=FixedPair(0, 0))

    def __post_init__(self):
        if not 0 <= float(self.rate) < 1:
            raise InputError("malicious rate must lie in [0, 1)")

    @property
    def n_points(self) -> int:
        return self.base.n_points

    @property
    def n_labels(self) -> int:
        return self.base.n_labels

    def draw_flagged(self, n: int, seed: int) -> tuple[LabeledSample, np.ndarray]:
        clean = self.base.draw(n, seed)
        coins = rng_for(derive_seed(seed, 0xC0FFEE)).random(n) < float(self.rate)
        pts, ys = clean.points.copy(), clean.labels.copy()
        for i in np.flatnonzero(coins):
            pts[i], ys[i] = self.adversary(seed, int(i))
        return LabeledSample(pts, ys), coins

    def draw(self, n: int, seed: int) -> LabeledSample:
        return self.draw_flagged(n, seed)[0]


def sample(source, n: int, seed: int):
    """``n`` i.i.d. draws: instance indices for a marginal, a labeled sample otherwise."""
    if n < 0:
        raise InputError("n must be non-negative")
    return source.draw(n, seed)


def unlabeled(source, n: int, seed: int) -> np.ndarray:
    """Instance part of ``n`` draws from any oracle."""
    out = source.draw(n, seed)
    return out.points if isinstance(out, LabeledSample) else out


def _expected_cost(D: JointDistribution, loss: Loss, exact: bool):
    """``E[x][a] = sum_y P(x, y) * loss(a, y)``."""
    if len(loss) != D.n_labels:
        raise InputError("loss and distribution use different label spaces")
    if exact:
        L = loss.table
        return [[sum((row[y] * L[a][y] for y in range(D.n_labels) if row[y]), Fraction(0))
                 for a in range(D.n_labels)] for row in D.table]
    return D.P @ loss.array.T


def risk(h: Hypothesis, D: JointDistribution, loss: Loss):
    """Expected loss of ``h``; a Fraction when both ``D`` and ``loss`` are rational."""
    if h.partial:
        raise InputError("risk needs a total hypothesis; use partial_risk")
    if len(h) != D.n_points:
        raise InputError("hypothesis and distribution sizes differ")
    if D.exact and loss.exact:
        E = _expected_cost(D, loss, True)
        return sum((E[x][a] for x, a in enumerate(h.labels)), Fraction(0))
    E = _expected_cost(D, loss, False)
    return float(E[np.arange(len(h)), h.array].sum())


def risk_vector(members: np.ndarray, D: JointDistribution, loss: Loss) -> np.ndarray:
    """Float risks of many total label vectors at once."""
    E = _expected_cost(D, loss, False)
    return E[np.arange(members.shape[1])[None, :], members].sum(axis=1)


def opt_risk(H: HypothesisClass, D: JointDistribution, loss: Loss):
    """Smallest risk in the class and every member attaining it, in member order."""
    if len(H) == 0:
        raise InputError("empty class")
    if D.exact and loss.exact:
        E = _expected_cost(D, loss, True)
        vals = [sum((E[x][a] for x, a in enumerate(row)), Fraction(0)) for row in H.members.tolist()]
        best = min(vals)
        return best, [i for i, v in enumerate(vals) if v == best]
    vals = risk_vector(H.members, D, loss)
    best = float(vals.min())
    return best, [int(i) for i in np.flatnonzero(vals <= best + 1e-12)]


def empirical_risk(h: Hypothesis, S: LabeledSample, loss: Loss) -> float:
    if len(S) == 0:
        raise InputError("empirical risk of an empty sample")
    L = loss.array
    return float(L[h.array[S.points], S.labels].mean())


def empirical_risk_vector(members: np.ndarray, S: LabeledSample, loss: Loss) -> np.ndarray:
    if len(S) == 0:
        raise InputError("empirical risk of an empty sample")
    L = loss.array
    return L[members[:, S.points], S.labels[None, :]].mean(axis=1)


def symmetric_difference_sets(H: HypothesisClass) -> list[tuple[int, ...]]:
    """Distinct supports of ``h XOR h'`` over all member pairs (binary labels)."""
    if len(H.labels) != 2 or H.partial:
        raise UnsupportedError("symmetric differences need total binary hypotheses")
    rows = H.members.astype(bool)
    seen = {}
    for i in range(len(rows)):
        diff = rows[i][None, :] ^ rows[i:]
        for d in diff:
            key = d.tobytes()
            if key not in seen:
                seen[key] = tuple(int(v) for v in np.flatnonzero(d))
    return list(seen.values())


def tv_hdh(D: Distribution, D2: Distribution, H: HypothesisClass):
    """Largest gap in mass that ``D`` and ``D2`` give to any symmetric difference of two members."""
    best = Fraction(0) if D.exact and D2.exact else 0.0
    for s in symmetric_difference_sets(H):
        gap = abs(D.mass_of(s) - D2.mass_of(s))
        if gap > best:
            best = gap
    return best


def covariate_shift_family(D: Distribution, H: HypothesisClass, eps, candidates: Iterable[Distribution]
                           ) -> DistributionFamily:
    """Candidates within ``eps / 2`` of ``D`` in TV over the class's symmetric differences."""
    if len(H.labels) != 2:
        raise UnsupportedError("covariate-shift family needs binary labels")
    r = Fraction(eps) / 2 if _is_exact(eps) else eps / 2
    keep = [C for C in candidates if tv_hdh(D, C, H) <= r + (0 if _is_exact(eps) else 1e-12)]
    return DistributionFamily(keep, "covariate-shift")
