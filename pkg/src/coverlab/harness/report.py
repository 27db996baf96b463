"""Per-trial rows, aggregates and bit-stable serialization."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..core import InputError
from .stats import CONFIDENCE, hoeffding_check

COLUMNS = ("trial", "seed", "opt", "achieved", "success", "cover_size", "m_U", "m_L")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(round(v, 12))
    return str(v)


@dataclass
class TrialRow:
    trial: int
    seed: int
    opt: float
    achieved: float
    success: bool
    cover_size: int = 0
    m_U: int = 0
    m_L: int = 0


@dataclass
class TrialReport:
    experiment: str
    target: float
    confidence: float = CONFIDENCE
    rows: list[TrialRow] = field(default_factory=list)
    complete: bool = True
    note: str = ""

    def add(self, row: TrialRow) -> None:
        self.rows.append(row)
        self.rows.sort(key=lambda r: r.trial)

    @property
    def trials(self) -> int:
        return len(self.rows)

    @property
    def successes(self) -> int:
        return sum(r.success for r in self.rows)

    def aggregate(self) -> dict:
        """Success frequency and its Hoeffding bound; ``defined`` is false without rows."""
        if not self.rows:
            return {"defined": False, "trials": 0}
        h = hoeffding_check(self.successes, self.trials, self.target, self.confidence)
        return {"defined": True, "trials": self.trials, "successes": self.successes,
                "frequency": h.frequency, "bound": h.bound, "slack": h.slack, "passed": h.passed}

    @property
    def passed(self) -> bool:
        agg = self.aggregate()
        return bool(self.complete and agg["defined"] and agg["passed"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(getattr(r, c)) for c in COLUMNS])
        return buf.getvalue()

    def to_json(self) -> str:
        data = {"experiment": self.experiment, "target": self.target, "confidence": self.confidence,
                "complete": self.complete, "note": self.note,
                "rows": [asdict(r) for r in self.rows], "aggregate": self.aggregate()}
        return json.dumps(data, sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "TrialReport":
        d = json.loads(text)
        rep = cls(d["experiment"], d["target"], d["confidence"], complete=d["complete"], note=d["note"])
        rep.rows = [TrialRow(**r) for r in d["rows"]]
        return rep

    def __eq__(self, other) -> bool:
        return isinstance(other, TrialReport) and self.to_json() == other.to_json()


def emit(report: TrialReport, fmt: str = "csv", path: str | Path | None = None) -> str:
    """Serialize ``report``; also write it to ``path`` when given."""
    if fmt == "csv":
        text = report.to_csv()
    elif fmt == "json":
        text = report.to_json()
    else:
        raise InputError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text


def load(path: str | Path) -> TrialReport:
    return TrialReport.from_json(Path(path).read_text())
