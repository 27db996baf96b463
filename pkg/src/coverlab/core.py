"""Instance spaces, label spaces, hypotheses and finite hypothesis classes.

A hypothesis is an explicit label vector over a finite instance space
``{0, ..., n-1}``.  Label entries are indices into a :class:`LabelSpace`;
partial hypotheses use :data:`STAR` for undefined points.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Iterator, Sequence

import numpy as np

STAR = -1

FAMILIES = (
    "explicit",
    "thresholds",
    "intervals",
    "finite-support-indicators",
    "first-bit-zero",
    "k-set-indicators",
)

DEFAULT_BUDGET = 2_000_000


class InputError(ValueError):
    """Malformed or out-of-range input."""


class ResourceError(RuntimeError):
    """An enumeration would exceed its declared budget."""

    def __init__(self, what: str, needed: int, budget: int):
        super().__init__(f"{what}: needs {needed} evaluations, budget is {budget}")
        self.what = what
        self.needed = needed
        self.budget = budget


@dataclass(frozen=True)
class InstanceSpace:
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise InputError("instance space needs at least one point")

    @property
    def points(self) -> range:
        return range(self.size)


@dataclass(frozen=True)
class LabelSpace:
    names: tuple[str, ...]
    payloads: tuple[float, ...] | None = None

    def __post_init__(self):
        if len(self.names) < 1:
            raise InputError("label space needs at least one label")
        if len(set(self.names)) != len(self.names):
            raise InputError("label names must be distinct")
        if self.payloads is not None:
            if len(self.payloads) != len(self.names):
                raise InputError("one payload per label")
            if len(set(self.payloads)) != len(self.payloads):
                raise InputError("label payloads must be distinct")

    def __len__(self) -> int:
        return len(self.names)

    @property
    def numeric(self) -> bool:
        return self.payloads is not None

    @classmethod
    def binary(cls) -> "LabelSpace":
        return cls(("0", "1"), (0.0, 1.0))

    @classmethod
    def categorical(cls, k: int) -> "LabelSpace":
        return cls(tuple(str(i) for i in range(k)))

    @classmethod
    def pairs(cls) -> "LabelSpace":
        """Labels (b, r) in {0,1}^2, stored at index 2*b + r."""
        return cls(("00", "01", "10", "11"))

    @classmethod
    def grid(cls, values: Iterable[float]) -> "LabelSpace":
        vals = tuple(float(v) for v in values)
        return cls(tuple(f"{v:g}" for v in vals), vals)


@dataclass(frozen=True, order=True)
class Hypothesis:
    labels: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(int(v) for v in self.labels))

    def __call__(self, x: int) -> int:
        return self.labels[x]

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def partial(self) -> bool:
        return STAR in self.labels

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.labels, dtype=np.int64)

    def support(self) -> tuple[int, ...]:
        """Points where the hypothesis is defined."""
        return tuple(i for i, v in enumerate(self.labels) if v != STAR)

    def __str__(self) -> str:
        return ",".join("*" if v == STAR else str(v) for v in self.labels)


def _dedup_rows(rows: np.ndarray) -> np.ndarray:
    seen = set()
    keep = []
    for i, row in enumerate(rows):
        key = row.tobytes()
        if key not in seen:
            seen.add(key)
            keep.append(i)
    return rows[keep]


@dataclass
class HypothesisClass:
    """Finite class stored as an ``(m, n)`` integer matrix of label vectors.

    Rows are distinct; member order is the tie-breaking order everywhere.
    """

    members: np.ndarray
    labels: LabelSpace = field(default_factory=LabelSpace.binary)
    family: str = "explicit"
    params: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        rows = np.asarray(self.members, dtype=np.int64)
        if rows.ndim != 2 or rows.shape[0] == 0 or rows.shape[1] == 0:
            raise InputError("a class needs at least one member over at least one point")
        if rows.min() < STAR or rows.max() >= len(self.labels):
            raise InputError("label index out of range")
        if self.family not in FAMILIES:
            raise InputError(f"unknown family {self.family!r}")
        rows = _dedup_rows(rows)
        rows.setflags(write=False)
        self.members = rows

    def __len__(self) -> int:
        return self.members.shape[0]

    def __getitem__(self, i: int) -> Hypothesis:
        return Hypothesis(tuple(self.members[i]))

    def __iter__(self) -> Iterator[Hypothesis]:
        for i in range(len(self)):
            yield self[i]

    @property
    def space(self) -> InstanceSpace:
        return InstanceSpace(self.members.shape[1])

    @property
    def n_points(self) -> int:
        return self.members.shape[1]

    @property
    def partial(self) -> bool:
        return bool((self.members == STAR).any())

    def index(self, h: Hypothesis | Sequence[int]) -> int:
        target = np.asarray(h.labels if isinstance(h, Hypothesis) else h)
        hits = np.flatnonzero((self.members == target).all(axis=1))
        if hits.size == 0:
            raise KeyError("not a member")
        return int(hits[0])

    def __contains__(self, h) -> bool:
        try:
            self.index(h)
        except KeyError:
            return False
        return True

    # family generators

    @classmethod
    def explicit(cls, rows, labels: LabelSpace | None = None) -> "HypothesisClass":
        rows = [list(r.labels) if isinstance(r, Hypothesis) else list(r) for r in rows]
        if labels is None:
            top = max((v for r in rows for v in r), default=1)
            labels = LabelSpace.binary() if top <= 1 else LabelSpace.categorical(top + 1)
        return cls(np.array(rows, dtype=np.int64), labels)

    @classmethod
    def thresholds(cls, n: int) -> "HypothesisClass":
        """Members ``x -> 1{x >= t}`` for ``t = 0..n`` (t = n is all-zero)."""
        x = np.arange(n)
        rows = (x[None, :] >= np.arange(n + 1)[:, None]).astype(np.int64)
        return cls(rows, LabelSpace.binary(), "thresholds", (("n", n),))

    @classmethod
    def intervals(cls, n: int) -> "HypothesisClass":
        """The empty set, then ``1{a <= x < b}`` for ``0 <= a < b <= n`` in lexicographic order."""
        rows = [np.zeros(n, dtype=np.int64)]
        x = np.arange(n)
        for a in range(n):
            for b in range(a + 1, n + 1):
                rows.append(((x >= a) & (x < b)).astype(np.int64))
        return cls(np.array(rows), LabelSpace.binary(), "intervals", (("n", n),))

    @classmethod
    def finite_support_indicators(cls, n: int, max_support: int = 1) -> "HypothesisClass":
        """Indicators of subsets of size at most ``max_support`` (by size, then lexicographic), then all-ones."""
        rows = []
        for s in range(min(max_support, n) + 1):
            for sub in itertools.combinations(range(n), s):
                r = np.zeros(n, dtype=np.int64)
                r[list(sub)] = 1
                rows.append(r)
        rows.append(np.ones(n, dtype=np.int64))
        return cls(np.array(rows), LabelSpace.binary(), "finite-support-indicators",
                   (("n", n), ("max_support", max_support)))

    @classmethod
    def first_bit_zero(cls, k: int) -> "HypothesisClass":
        """All maps into pair labels whose first bit is 0, over ``k`` points."""
        if k > 20:
            raise ResourceError("first-bit-zero members", 2 ** k, 2 ** 20)
        rows = np.array(list(itertools.product((0, 1), repeat=k)), dtype=np.int64)
        return cls(rows, LabelSpace.pairs(), "first-bit-zero", (("k", k),))

    @classmethod
    def k_set_indicators(cls, n: int, k: int = 1) -> "HypothesisClass":
        """All-zero first, then indicators of every ``k``-subset in lexicographic order."""
        if comb(n, k) > DEFAULT_BUDGET:
            raise ResourceError("k-set members", comb(n, k), DEFAULT_BUDGET)
        rows = [np.zeros(n, dtype=np.int64)]
        for sub in itertools.combinations(range(n), k):
            r = np.zeros(n, dtype=np.int64)
            r[list(sub)] = 1
            rows.append(r)
        return cls(np.array(rows), LabelSpace.binary(), "k-set-indicators", (("n", n), ("k", k)))

    @classmethod
    def from_family(cls, family: str, **params) -> "HypothesisClass":
        builders = {
            "thresholds": cls.thresholds,
            "intervals": cls.intervals,
            "finite-support-indicators": cls.finite_support_indicators,
            "first-bit-zero": cls.first_bit_zero,
            "k-set-indicators": cls.k_set_indicators,
        }
        if family not in builders:
            raise InputError(f"unknown family {family!r}")
        return builders[family](**params)

    # serialization

    def dumps(self) -> str:
        if self.family != "explicit":
            args = ",".join(f"{k}={v}" for k, v in self.params)
            return f"family:{self.family},{args}\n"
        lines = [str(h) for h in self]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, labels: LabelSpace | None = None) -> "HypothesisClass":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not lines:
            raise InputError("empty class description")
        if lines[0].startswith("family:"):
            head, *args = lines[0][len("family:"):].split(",")
            params = {}
            for a in args:
                if a:
                    k, v = a.split("=")
                    params[k.strip()] = int(v)
            return cls.from_family(head.strip(), **params)
        rows = [[STAR if tok.strip() == "*" else int(tok) for tok in ln.split(",")] for ln in lines]
        if len({len(r) for r in rows}) != 1:
            raise InputError("rows have different lengths")
        return cls.explicit(rows, labels)


def _check_sample(H: HypothesisClass, sample) -> np.ndarray:
    idx = np.asarray(sample, dtype=np.int64).reshape(-1)
    if idx.size and (idx.min() < 0 or idx.max() >= H.n_points):
        raise InputError("sample index outside the instance space")
    return idx


def restriction_table(H: HypothesisClass, sample) -> tuple[np.ndarray, np.ndarray]:
    """Distinct projections onto ``sample`` and the first member producing each.

    Rows are returned in order of first appearance in member order.
    """
    idx = _check_sample(H, sample)
    proj = H.members[:, idx]
    if idx.size == 0:
        return np.zeros((1, 0), dtype=np.int64), np.zeros(1, dtype=np.int64)
    _, first = np.unique(proj, axis=0, return_index=True)
    first = np.sort(first)
    return proj[first], first


def restrict(H: HypothesisClass, sample) -> dict[tuple[int, ...], list[int]]:
    """Map each distinct labeling of ``sample`` to the members that produce it."""
    idx = _check_sample(H, sample)
    out: dict[tuple[int, ...], list[int]] = {}
    for i, row in enumerate(H.members[:, idx]):
        out.setdefault(tuple(int(v) for v in row), []).append(i)
    return out


def _count_distinct(rows: np.ndarray) -> int:
    if rows.shape[1] == 0:
        return 1
    return int(np.unique(rows, axis=0).shape[0])


def _closed_form_growth(H: HypothesisClass, p: int) -> int | None:
    params = dict(H.params)
    npts = H.n_points
    if H.family == "thresholds":
        return p + 1
    if H.family == "intervals":
        return 1 + p * (p + 1) // 2
    if H.family == "first-bit-zero":
        return 2 ** p
    if H.family == "finite-support-indicators":
        s = params["max_support"]
        if p <= s:
            return 2 ** p
        return sum(comb(p, j) for j in range(s + 1)) + 1
    if H.family == "k-set-indicators":
        k = params["k"]
        lo = max(0, k - (npts - p))
        total = sum(comb(p, j) for j in range(lo, min(k, p) + 1))
        return total + (1 if lo > 0 else 0)
    return None


def growth_function(H: HypothesisClass, n: int, budget: int = DEFAULT_BUDGET,
                    closed_form: bool = True) -> int:
    """Largest number of distinct restrictions over samples of size ``n``.

    Repeated points never add labelings, so only ``min(n, |X|)`` distinct
    points are searched.
    """
    if n < 0:
        raise InputError("n must be non-negative")
    p = min(n, H.n_points)
    if closed_form:
        value = _closed_form_growth(H, p)
        if value is not None:
            return value
    count = comb(H.n_points, p)
    if count * len(H) > budget:
        raise ResourceError(f"growth function at n={n}", count * len(H), budget)
    best = 0
    cap = min(len(H), len(H.labels) ** p)
    for sub in itertools.combinations(range(H.n_points), p):
        best = max(best, _count_distinct(H.members[:, list(sub)]))
        if best == cap:
            break
    return best


def vc_dimension(H: HypothesisClass, budget: int = DEFAULT_BUDGET) -> int:
    """Largest ``d`` with growth ``2**d`` (binary classes)."""
    d = 0
    while d < H.n_points and growth_function(H, d + 1, budget) == 2 ** (d + 1):
        d += 1
    return d


def classification_distance(h: Hypothesis, g: Hypothesis, D) -> float:
    """Mass of points where ``h`` and ``g`` disagree under marginal ``D``."""
    a, b = h.array, g.array
    if a.shape != b.shape:
        raise InputError("hypotheses over different instance spaces")
    if h.partial or g.partial:
        raise InputError("distance between partial hypotheses needs a star policy")
    return D.mass_of(np.flatnonzero(a != b))
