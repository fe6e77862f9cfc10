"""Two-class labels, three-judge majority vote and annotation file I/O."""

from __future__ import annotations

import csv
import enum
import io
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .errors import DuplicateWord, ParseError, WrongJudgeCount
from .model import FiveClass

N_JUDGES = 3


class TwoClass(str, enum.Enum):
    NEGATIVE = "neg"
    NON_NEGATIVE = "nonneg"

    @classmethod
    def parse(cls, text: str) -> "TwoClass":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ParseError(f"label must be 'neg' or 'nonneg', got {text!r}") from None


def map_five_to_two(c) -> TwoClass:
    """Very negative and negative collapse to Negative; the other three to NonNegative."""
    c = FiveClass(c)
    return TwoClass.NEGATIVE if c <= FiveClass.NEGATIVE else TwoClass.NON_NEGATIVE


def majority_vote(labels) -> TwoClass:
    labels = [TwoClass(x) for x in labels]
    if len(labels) != N_JUDGES:
        raise WrongJudgeCount(f"expected {N_JUDGES} judge labels, got {len(labels)}")
    return Counter(labels).most_common(1)[0][0]


@dataclass(frozen=True)
class AnnotationRecord:
    item: str
    judge_labels: tuple
    resolved: TwoClass

    @classmethod
    def from_judges(cls, item: str, labels) -> "AnnotationRecord":
        labels = tuple(TwoClass(x) for x in labels)
        return cls(item, labels, majority_vote(labels))


def _rows(path):
    text = Path(path).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text), delimiter="\t", quotechar='"')
    for lineno, row in enumerate(reader, 1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        yield lineno, row


def load_annotations(path) -> list[AnnotationRecord]:
    """Parse ``item<TAB>l1<TAB>l2<TAB>l3`` lines; quoted items may contain spaces."""
    records, seen = [], set()
    for lineno, row in _rows(path):
        item, labels = row[0].strip(), row[1:]
        if not item:
            raise ParseError(f"{path}:{lineno}: empty item")
        if len(labels) != N_JUDGES:
            raise WrongJudgeCount(f"{path}:{lineno}: expected {N_JUDGES} labels, got {len(labels)}")
        try:
            parsed = [TwoClass.parse(x) for x in labels]
        except ParseError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None
        if item in seen:
            raise DuplicateWord(f"{path}:{lineno}: duplicate item {item!r}")
        seen.add(item)
        records.append(AnnotationRecord.from_judges(item, parsed))
    return records


def save_annotations(records, path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", quotechar='"', lineterminator="\n")
    for r in records:
        writer.writerow([r.item, *(lab.value for lab in r.judge_labels)])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def gold_map(records) -> dict[str, TwoClass]:
    return {r.item: r.resolved for r in records}


def read_gold_testset(path) -> list[tuple[str, TwoClass]]:
    """Phrase set with resolved labels.

    Accepts either the three-judge annotation format or a pre-resolved
    ``phrase<TAB>label`` file; the two can be mixed line by line.
    """
    out, seen = [], set()
    for lineno, row in _rows(path):
        phrase = row[0].strip()
        try:
            if len(row) == 2:
                label = TwoClass.parse(row[1])
            elif len(row) == N_JUDGES + 1:
                label = majority_vote([TwoClass.parse(x) for x in row[1:]])
            else:
                raise WrongJudgeCount(f"{path}:{lineno}: expected 1 or {N_JUDGES} labels")
        except ParseError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None
        if phrase in seen:
            raise DuplicateWord(f"{path}:{lineno}: duplicate phrase {phrase!r}")
        seen.add(phrase)
        out.append((phrase, label))
    return out
