"""Two-class confusion matrices, percentage metrics and model comparison reports."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Optional

from .annotate import TwoClass
from .classify import ClassifyOptions, classify_batch
from .errors import EmptyInput, LengthMismatch
from .trees import read_tree

CLASSES = (TwoClass.NEGATIVE, TwoClass.NON_NEGATIVE)
_NAMES = {TwoClass.NEGATIVE: "Negative", TwoClass.NON_NEGATIVE: "Non-negative"}


class Rounding(str, enum.Enum):
    TRUNCATE = "truncate"
    HALF_UP = "half-up"


def percent(num: int, den: int, rounding=Rounding.TRUNCATE, places: int = 2) -> Optional[Decimal]:
    """``100 * num / den`` as an exact decimal with ``places`` digits; ``None`` if ``den`` is 0.

    Truncation is the default; ``half-up`` rounds the last digit instead.
    """
    if den == 0:
        return None
    scaled = Fraction(100 * num, den) * 10**places
    if Rounding(rounding) is Rounding.TRUNCATE:
        units = scaled.numerator // scaled.denominator
    else:
        units = (2 * scaled.numerator + scaled.denominator) // (2 * scaled.denominator)
    return Decimal(units).scaleb(-places)


@dataclass(frozen=True)
class ConfusionMatrix2:
    """``counts[actual][predicted]`` with index 0 = Negative, 1 = NonNegative."""

    counts: tuple = ((0, 0), (0, 0))

    def __post_init__(self):
        if any(c < 0 for row in self.counts for c in row):
            raise ValueError("confusion counts must be non-negative")

    @classmethod
    def from_counts(cls, neg_neg, neg_non, non_neg, non_non) -> "ConfusionMatrix2":
        return cls(((neg_neg, neg_non), (non_neg, non_non)))

    def cell(self, actual, predicted) -> int:
        return self.counts[CLASSES.index(TwoClass(actual))][CLASSES.index(TwoClass(predicted))]

    def row_total(self, actual) -> int:
        return sum(self.counts[CLASSES.index(TwoClass(actual))])

    def col_total(self, predicted) -> int:
        j = CLASSES.index(TwoClass(predicted))
        return self.counts[0][j] + self.counts[1][j]

    @property
    def total(self) -> int:
        return sum(sum(r) for r in self.counts)

    @property
    def correct(self) -> int:
        return self.counts[0][0] + self.counts[1][1]


def confusion(preds, golds) -> ConfusionMatrix2:
    preds, golds = list(preds), list(golds)
    if len(preds) != len(golds):
        raise LengthMismatch(f"{len(preds)} predictions vs {len(golds)} gold labels")
    if not preds:
        raise EmptyInput("no predictions to score")
    m = [[0, 0], [0, 0]]
    for p, g in zip(preds, golds):
        m[CLASSES.index(TwoClass(g))][CLASSES.index(TwoClass(p))] += 1
    return ConfusionMatrix2((tuple(m[0]), tuple(m[1])))


@dataclass
class MetricsReport:
    accuracy: Decimal
    precision: dict  # TwoClass -> Decimal or None (absent when undefined)
    recall: dict
    phrase_count: int
    matrix: ConfusionMatrix2
    rounding: Rounding = Rounding.TRUNCATE
    deviated_coverage: Optional[float] = None
    divergence: Optional[float] = None

    def row_percentages(self, actual) -> list[Optional[Decimal]]:
        n = self.matrix.row_total(actual)
        return [percent(self.matrix.cell(actual, p), n, self.rounding) for p in CLASSES]

    def to_json(self) -> dict:
        def f(x):
            return None if x is None else float(x)

        doc = {
            "phrase_count": self.phrase_count,
            "accuracy": f(self.accuracy),
            "precision": {c.value: f(v) for c, v in self.precision.items() if v is not None},
            "recall": {c.value: f(v) for c, v in self.recall.items() if v is not None},
            "confusion": [list(r) for r in self.matrix.counts],
            "rounding": self.rounding.value,
        }
        if self.deviated_coverage is not None:
            doc["deviated_coverage"] = self.deviated_coverage
        if self.divergence is not None:
            doc["divergence"] = self.divergence
        return doc


def metrics(cm: ConfusionMatrix2, rounding=Rounding.TRUNCATE) -> MetricsReport:
    if cm.total < 1:
        raise EmptyInput("confusion matrix is empty")
    rounding = Rounding(rounding)
    return MetricsReport(
        accuracy=percent(cm.correct, cm.total, rounding),
        precision={c: percent(cm.cell(c, c), cm.col_total(c), rounding) for c in CLASSES},
        recall={c: percent(cm.cell(c, c), cm.row_total(c), rounding) for c in CLASSES},
        phrase_count=cm.total,
        matrix=cm,
        rounding=rounding,
    )


def phrase_tokens(phrase: str) -> list[str]:
    if phrase.lstrip().startswith("("):
        return read_tree(phrase).tokens
    return phrase.split()


def deviated_coverage(phrases, deviated_words) -> float:
    dev = {w.lower() for w in deviated_words}
    phrases = list(phrases)
    if not phrases:
        raise EmptyInput("no phrases")
    hit = sum(1 for p in phrases if any(t.lower() in dev for t in phrase_tokens(p)))
    return hit / len(phrases)


@dataclass
class Evaluation:
    report: MetricsReport
    predictions: list = field(default_factory=list)


def evaluate(model, testset, options: Optional[ClassifyOptions] = None, rounding=Rounding.TRUNCATE, threads: int = 1) -> Evaluation:
    testset = list(testset)
    if not testset:
        raise EmptyInput("empty test set")
    results = classify_batch(model, [p for p, _ in testset], options, threads)
    preds = [r.two_class for r in results]
    cm = confusion(preds, [g for _, g in testset])
    return Evaluation(metrics(cm, rounding), results)


@dataclass
class Comparison:
    a: MetricsReport
    b: MetricsReport
    divergence: float
    deviated_coverage: float


def compare_models(
    model_a,
    model_b,
    testset,
    deviated_words=(),
    options_a: Optional[ClassifyOptions] = None,
    options_b: Optional[ClassifyOptions] = None,
    rounding=Rounding.TRUNCATE,
    threads: int = 1,
) -> Comparison:
    """Score two models on one test set; ``a`` is conventionally the source model."""
    testset = list(testset)
    ea = evaluate(model_a, testset, options_a, rounding, threads)
    eb = evaluate(model_b, testset, options_b or options_a, rounding, threads)
    differ = sum(x.two_class != y.two_class for x, y in zip(ea.predictions, eb.predictions))
    div = differ / len(testset)
    cov = deviated_coverage([p for p, _ in testset], deviated_words)
    for r in (ea.report, eb.report):
        r.divergence, r.deviated_coverage = div, cov
    return Comparison(ea.report, eb.report, div, cov)


def _fmt(x) -> str:
    return "-" if x is None else f"{x}%"


def render_confusion(report: MetricsReport, title: str = "") -> str:
    """Plain-text confusion table: row percentages, row totals and predicted totals."""
    cm = report.matrix
    corner = "Actual \\ Predicted"
    head = f"{corner:<20}{'Negative':>12}{'Non-negative':>14}{'Total':>8}"
    lines = [title] if title else []
    lines.append(head)
    for c in CLASSES:
        pn, pp = report.row_percentages(c)
        lines.append(f"{_NAMES[c]:<20}{_fmt(pn):>12}{_fmt(pp):>14}{cm.row_total(c):>8}")
    lines.append(f"{'Total':<20}{cm.col_total(TwoClass.NEGATIVE):>12}{cm.col_total(TwoClass.NON_NEGATIVE):>14}{cm.total:>8}")
    lines.append(f"accuracy {_fmt(report.accuracy)}")
    for c in CLASSES:
        lines.append(
            f"{_NAMES[c]}: precision {_fmt(report.precision[c])}  recall {_fmt(report.recall[c])}"
        )
    return "\n".join(lines) + "\n"


def render_comparison(cmp: Comparison, names=("source", "adapted")) -> str:
    parts = [render_confusion(cmp.a, f"[{names[0]}]"), render_confusion(cmp.b, f"[{names[1]}]")]
    parts.append(f"divergence {cmp.divergence:.4f}\ndeviated_coverage {cmp.deviated_coverage:.4f}\n")
    return "\n".join(parts)


def comparison_json(cmp: Comparison, names=("source", "adapted")) -> dict:
    return {
        names[0]: cmp.a.to_json(),
        names[1]: cmp.b.to_json(),
        "divergence": cmp.divergence,
        "deviated_coverage": cmp.deviated_coverage,
    }
