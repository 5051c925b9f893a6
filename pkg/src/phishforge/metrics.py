"""Confusion-matrix scoring of detector verdicts.

Phishing is the positive class: a phishing page predicted phishing counts
as a true positive, a legitimate page predicted phishing as a false
positive. Degenerate denominators yield an explicit undefined marker
(None) rather than a silent zero.
"""
from __future__ import annotations

from dataclasses import dataclass

PHISHING = "phishing"
LEGITIMATE = "legitimate"
_LABELS = (PHISHING, LEGITIMATE)


class VerdictError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise VerdictError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class ScoreReport:
    accuracy: float
    precision: float | None
    recall: float | None
    f1: float | None

    def to_dict(self) -> dict:
        def cell(v: float | None) -> float | str:
            return "undefined" if v is None else v

        return {
            "accuracy": self.accuracy,
            "precision": cell(self.precision),
            "recall": cell(self.recall),
            "f1": cell(self.f1),
        }


def tally(verdicts: list[tuple[str, str]]) -> ConfusionCounts:
    """Count (actual, predicted) pairs; permutation-invariant."""
    if not verdicts:
        raise VerdictError("no verdicts to tally")
    tp = fp = tn = fn = 0
    for actual, predicted in verdicts:
        if actual not in _LABELS or predicted not in _LABELS:
            raise VerdictError(
                f"labels must be 'phishing' or 'legitimate', got {(actual, predicted)!r}"
            )
        if actual == PHISHING:
            if predicted == PHISHING:
                tp += 1
            else:
                fn += 1
        else:
            if predicted == PHISHING:
                fp += 1
            else:
                tn += 1
    return ConfusionCounts(tp, fp, tn, fn)


def score(counts: ConfusionCounts) -> ScoreReport:
    if counts.total == 0:
        raise VerdictError("cannot score zero verdicts")
    accuracy = (counts.tp + counts.tn) / counts.total
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else None
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else None
    f1 = None
    if precision is not None and recall is not None and precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    return ScoreReport(accuracy, precision, recall, f1)


def read_verdicts(path: str, delimiter: str = ",") -> list[tuple[str, str]]:
    """Read `id,actual,predicted` rows; a header row is skipped if present."""
    import csv

    verdicts: list[tuple[str, str]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row_no, row in enumerate(csv.reader(fh, delimiter=delimiter)):
            if not row or not "".join(row).strip():
                continue
            if len(row) != 3:
                raise VerdictError(f"row {row_no + 1}: need id,actual,predicted")
            _, actual, predicted = (cell.strip().lower() for cell in row)
            if row_no == 0 and actual == "actual":
                continue
            verdicts.append((actual, predicted))
    if not verdicts:
        raise VerdictError(f"no verdicts found in {path}")
    return verdicts
