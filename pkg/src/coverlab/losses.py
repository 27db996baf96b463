"""Label-pair loss tables, their structural tags, and extended risks."""
from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import STAR, Hypothesis, InputError, LabelSpace

# comparisons on float tables
TOL = 1e-12


class TagError(ValueError):
    """A claimed loss tag does not hold; ``witness`` names the offending labels."""

    def __init__(self, msg: str, witness: tuple):
        super().__init__(f"{msg}; witness {witness}")
        self.witness = witness


class PreconditionError(ValueError):
    pass


class UnsupportedError(ValueError):
    pass


def _num(v):
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    return float(v)


@dataclass(frozen=True)
class Loss:
    """Cost ``table[a][y]`` of predicting label ``a`` when the truth is ``y``."""

    table: tuple[tuple, ...]
    name: str = "custom"

    def __post_init__(self):
        rows = tuple(tuple(_num(v) for v in row) for row in self.table)
        k = len(rows)
        if k == 0 or any(len(r) != k for r in rows):
            raise InputError("loss table must be square and non-empty")
        for a in range(k):
            if rows[a][a] != 0:
                raise InputError(f"loss must vanish on the diagonal (label {a})")
            for y in range(k):
                if rows[a][y] < 0:
                    raise InputError("loss entries must be non-negative")
        object.__setattr__(self, "table", rows)

    def __len__(self) -> int:
        return len(self.table)

    def __call__(self, a: int, y: int):
        return self.table[a][y]

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for row in self.table for v in row)

    @property
    def array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.table])

    @property
    def upper(self):
        """Largest entry, the range bound B."""
        return max(v for row in self.table for v in row)

    def off_diagonal(self) -> list:
        k = len(self)
        return [self.table[a][b] for a in range(k) for b in range(k) if a != b]

    @property
    def is_zero_one(self) -> bool:
        return all(v == 1 for v in self.off_diagonal())

    def scaled(self, factor) -> "Loss":
        f = _num(factor)
        return Loss(tuple(tuple(v * f for v in row) for row in self.table), f"{self.name}*{factor}")

    # constructors

    @classmethod
    def zero_one(cls, k: int = 2) -> "Loss":
        return cls(tuple(tuple(int(a != y) for y in range(k)) for a in range(k)), "zero_one")

    @classmethod
    def ternary(cls, c=3) -> "Loss":
        """Loss on pair labels ``(b, r)`` at index ``2b + r``.

        Zero when the first bits agree, 1 when only the first bits differ,
        ``c`` when both bits differ.
        """
        def cost(a, y):
            b1, r1 = divmod(a, 2)
            b2, r2 = divmod(y, 2)
            if b1 == b2:
                return 0
            return 1 if r1 == r2 else c
        return cls(tuple(tuple(cost(a, y) for y in range(4)) for a in range(4)), f"ternary(c={c})")

    @classmethod
    def from_payloads(cls, labels: LabelSpace, kind: str = "absolute") -> "Loss":
        if not labels.numeric:
            raise UnsupportedError("payload losses need numeric labels")
        fns: dict[str, Callable[[Fraction, Fraction], Fraction]] = {
            "absolute": lambda a, y: abs(a - y),
            "squared": lambda a, y: (a - y) ** 2,
        }
        if kind not in fns:
            raise InputError(f"unknown payload loss {kind!r}")
        # payload grids are decimal; keep the table rational
        vals = [Fraction(str(p)) for p in labels.payloads]
        return cls(tuple(tuple(fns[kind](a, y) for y in vals) for a in vals), kind)

    @classmethod
    def bounded(cls, k: int, a, b) -> "Loss":
        """Costs growing with label distance from ``a`` (adjacent) to ``b`` (farthest)."""
        if k < 2:
            raise InputError("need at least two labels")
        a, b = Fraction(a), Fraction(b)

        def cost(i, j):
            if i == j:
                return 0
            if k == 2:
                return a if i < j else b
            return a + (b - a) * (abs(i - j) - 1) / (k - 2)
        return cls(tuple(tuple(cost(i, j) for j in range(k)) for i in range(k)), f"bounded({a},{b})")

    # persistence

    def to_csv(self, names: Sequence[str] | None = None) -> str:
        names = list(names or (str(i) for i in range(len(self))))
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(names)
        for row in self.table:
            w.writerow([str(v) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, name: str = "csv") -> "Loss":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        header, body = rows[0], rows[1:]
        if len(body) != len(header):
            raise InputError("loss CSV must be square under its header")

        def parse(tok: str):
            tok = tok.strip()
            try:
                return Fraction(tok)
            except ValueError:
                return float(tok)
        return cls(tuple(tuple(parse(t) for t in r) for r in body), name)


@dataclass(frozen=True)
class VerifiedTags:
    identity: bool
    bounds: tuple | None
    c: object | None
    upper: object
    witness_c: tuple | None = None

    @property
    def pseudometric(self) -> bool:
        return self.c is not None


def verify_tags(loss: Loss, identity: bool = False, c=None, bounds=None) -> VerifiedTags:
    """Exhaustively check the tags a loss satisfies.

    Returns the maximal verified tag set, including the smallest valid
    approximate-pseudometric constant.  Any tag passed as a claim must hold,
    otherwise :class:`TagError` is raised with a witness.
    """
    k = len(loss)
    t = loss.table
    ident = all(t[a][b] > 0 for a in range(k) for b in range(k) if a != b)
    off = loss.off_diagonal()
    bnds = (min(off), max(off)) if ident and off else None

    best_c = 1 if any(v > 0 for v in off) else 0
    witness = None
    finite = True
    for y1, y2, y3 in itertools.product(range(k), repeat=3):
        num = t[y1][y3]
        if num == 0:
            continue
        den = t[y1][y2] + t[y2][y3]
        if den == 0:
            finite = False
            witness = (y1, y2, y3)
            break
        r = Fraction(num) / Fraction(den) if loss.exact else float(num) / float(den)
        if r > best_c:
            best_c, witness = r, (y1, y2, y3)
    tags = VerifiedTags(ident, bnds, best_c if finite else None, loss.upper, witness)

    if identity and not ident:
        a, b = next((a, b) for a in range(k) for b in range(k) if a != b and t[a][b] == 0)
        raise TagError("identity of indiscernibles fails", (a, b))
    if c is not None:
        if not finite:
            raise TagError("not an approximate pseudometric", witness)
        if best_c > c + (0 if loss.exact else TOL):
            raise TagError(f"c={c} too small, need {best_c}", witness)
    if bounds is not None:
        lo, hi = bounds
        for a in range(k):
            for b in range(k):
                if a != b and not (lo - TOL <= t[a][b] <= hi + TOL):
                    raise TagError(f"not ({lo},{hi})-bounded", (a, b))
    return tags


def eta_ell(loss: Loss):
    """Half the ratio of the smallest to the largest off-diagonal cost."""
    off = loss.off_diagonal()
    if not off:
        raise PreconditionError("need at least two labels")
    if min(off) <= 0:
        raise PreconditionError("a zero off-diagonal cost breaks identity of indiscernibles")
    lo, hi = min(off), max(off)
    if isinstance(lo, Fraction) and isinstance(hi, Fraction):
        return Fraction(1, 2) * lo / hi
    return 0.5 * float(lo) / float(hi)


@dataclass(frozen=True)
class PerturbationMap:
    """Neighborhood ``U(x)`` of every instance point."""

    neighbors: tuple[tuple[int, ...], ...]
    reflexive: bool = True

    def __post_init__(self):
        n = len(self.neighbors)
        fixed = []
        for x, nb in enumerate(self.neighbors):
            s = set(int(v) for v in nb)
            if self.reflexive:
                s.add(x)
            if not s:
                raise InputError(f"empty neighborhood at {x}")
            if min(s) < 0 or max(s) >= n:
                raise InputError(f"neighbor of {x} outside the instance space")
            fixed.append(tuple(sorted(s)))
        object.__setattr__(self, "neighbors", tuple(fixed))

    def __len__(self) -> int:
        return len(self.neighbors)

    def __call__(self, x: int) -> tuple[int, ...]:
        return self.neighbors[x]

    @property
    def is_identity(self) -> bool:
        return all(nb == (x,) for x, nb in enumerate(self.neighbors))

    @classmethod
    def identity(cls, n: int) -> "PerturbationMap":
        return cls(tuple((x,) for x in range(n)))

    @classmethod
    def line(cls, n: int, radius: int = 1, reflexive: bool = True) -> "PerturbationMap":
        nb = []
        for x in range(n):
            pts = [z for z in range(x - radius, x + radius + 1) if 0 <= z < n and (reflexive or z != x)]
            nb.append(tuple(pts))
        return cls(tuple(nb), reflexive)

    @classmethod
    def from_adjacency(cls, text: str, n: int | None = None, reflexive: bool = True) -> "PerturbationMap":
        """Lines ``x: a b c``; points without a line get an empty list."""
        table: dict[int, list[int]] = {}
        for ln in text.splitlines():
            ln = ln.split("#")[0].strip()
            if not ln:
                continue
            head, _, rest = ln.partition(":")
            table[int(head)] = [int(v) for v in rest.replace(",", " ").split()]
        size = n if n is not None else max(table) + 1
        return cls(tuple(tuple(table.get(x, ())) for x in range(size)), reflexive)

    def to_adjacency(self) -> str:
        return "".join(f"{x}: {' '.join(map(str, nb))}\n" for x, nb in enumerate(self.neighbors))


def _expect(P, W):
    """Sum of ``P[x][y] * W[x][y]`` over the support, exact for rational inputs."""
    total = 0
    for x, row in enumerate(P):
        for y, p in enumerate(row):
            if p:
                total += p * W[x][y]
    return total


def worst_case_table(h: Hypothesis, U: PerturbationMap, loss: Loss) -> list[list]:
    """``W[x][y] = max over x' in U(x) of loss(h(x'), y)``."""
    k = len(loss)
    W = []
    for x in range(len(h)):
        nb = U(x)
        if not nb:
            raise InputError(f"empty neighborhood at {x}")
        W.append([max(loss(h(z), y) for z in nb) for y in range(k)])
    return W


def robust_risk(h: Hypothesis, D, U: PerturbationMap, loss: Loss):
    """Expected worst-case loss over each point's neighborhood."""
    if len(U) != len(h):
        raise InputError("perturbation map and hypothesis sizes differ")
    return _expect(D.table, worst_case_table(h, U, loss))


def robust_support(h: Hypothesis, U: PerturbationMap, loss: Loss) -> tuple[int, ...]:
    """Points whose whole neighborhood is labeled at zero loss from the point's own label."""
    return tuple(x for x in range(len(h)) if all(loss(h(z), h(x)) == 0 for z in U(x)))


def partial_risk(h: Hypothesis, D, loss: Loss | None = None):
    """Classification error where an undefined prediction always counts as a mistake."""
    if loss is not None and not loss.is_zero_one:
        raise UnsupportedError("partial risk is defined for classification loss only")
    W = [[1 if (a == STAR or a != y) else 0 for y in range(D.n_labels)] for a in h.labels]
    return _expect(D.table, W)


@dataclass(frozen=True)
class FairnessMetric:
    d: tuple[tuple[float, ...], ...]
    alpha: float
    gamma: float
    eps_alpha: float = 0.0
    eps_gamma: float = 0.0

    def __post_init__(self):
        d = tuple(tuple(float(v) for v in row) for row in self.d)
        n = len(d)
        for i in range(n):
            if len(d[i]) != n:
                raise InputError("similarity matrix must be square")
            if d[i][i] != 0:
                raise InputError("similarity matrix needs a zero diagonal")
            for j in range(n):
                if d[i][j] < 0 or d[i][j] != d[j][i]:
                    raise InputError("similarity matrix must be symmetric and non-negative")
        object.__setattr__(self, "d", d)

    @classmethod
    def constant(cls, n: int, value: float, alpha: float, gamma: float, **kw) -> "FairnessMetric":
        return cls(tuple(tuple(0.0 if i == j else value for j in range(n)) for i in range(n)),
                   alpha, gamma, **kw)

    @classmethod
    def line(cls, n: int, scale: float, alpha: float, gamma: float, **kw) -> "FairnessMetric":
        return cls(tuple(tuple(scale * abs(i - j) for j in range(n)) for i in range(n)),
                   alpha, gamma, **kw)

    def permuted(self, perm: Sequence[int]) -> "FairnessMetric":
        """Metric on relabeled points where new point ``i`` is old point ``perm[i]``."""
        n = len(self.d)
        return FairnessMetric(tuple(tuple(self.d[perm[i]][perm[j]] for j in range(n)) for i in range(n)),
                              self.alpha, self.gamma, self.eps_alpha, self.eps_gamma)


def fairness_violation(h: Hypothesis, D, metric: FairnessMetric, labels: LabelSpace,
                       gamma: float | None = None):
    """Mass of independent pairs ``(x, x')`` whose predictions differ by more than ``d + gamma``."""
    if not labels.numeric:
        raise UnsupportedError("fairness needs numeric label payloads")
    if h.partial:
        raise InputError("fairness needs a total hypothesis")
    g = metric.gamma if gamma is None else gamma
    pay = [labels.payloads[a] for a in h.labels]
    mass = D.mass
    total = 0
    for i, pi in enumerate(mass):
        if not pi:
            continue
        for j, pj in enumerate(mass):
            if pj and abs(pay[i] - pay[j]) > metric.d[i][j] + g + TOL:
                total += pi * pj
    return total


def is_fair(h: Hypothesis, D, metric: FairnessMetric, labels: LabelSpace, slack: bool = False) -> bool:
    a = metric.alpha + (metric.eps_alpha if slack else 0.0)
    g = metric.gamma + (metric.eps_gamma if slack else 0.0)
    return fairness_violation(h, D, metric, labels, g) <= a + TOL

