"""Corpus tokenization, stop-word filtering and frequency-ranked vocabulary cutoff."""

from __future__ import annotations

import enum
import math
import os
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import EmptyTable, StoplistMissing

STOPLIST_ENV = "LEXSENT_STOPLIST"
DEFAULT_COVERAGE = 0.95


class CutoffMode(str, enum.Enum):
    MASS = "mass"    # share of token occurrences
    TYPES = "types"  # share of distinct words


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[str]:
    """Whitespace split, strip edge punctuation, lower-case, drop empties."""
    out = []
    for raw in text.split():
        start, end = 0, len(raw)
        while start < end and _is_punct(raw[start]):
            start += 1
        while end > start and _is_punct(raw[end - 1]):
            end -= 1
        if start < end:
            out.append(raw[start:end].lower())
    return out


def read_word_list(path) -> frozenset[str]:
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def load_stoplist(path=None) -> frozenset[str]:
    """Load a stop-list; ``None`` means ``$LEXSENT_STOPLIST`` or the bundled list."""
    if path is None:
        path = os.environ.get(STOPLIST_ENV)
    if path is None:
        ref = resources.files("lexsent") / "data" / "van_stoplist.txt"
        with resources.as_file(ref) as p:
            return read_word_list(p)
    if not Path(path).is_file():
        raise StoplistMissing(f"stop-list not found: {path}")
    return read_word_list(path)


def remove_stopwords(tokens, stoplist) -> list[str]:
    if stoplist is None:
        raise StoplistMissing("no stop-list loaded")
    return [t for t in tokens if t.lower() not in stoplist]


@dataclass
class TermFrequencyTable:
    entries: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for w, c in self.entries.items():
            if c < 0:
                raise ValueError(f"negative count for {w!r}")

    @property
    def total_tokens(self) -> int:
        return sum(self.entries.values())

    def __len__(self):
        return len(self.entries)

    def ranked(self) -> list[tuple[str, int]]:
        """Descending count, ties broken lexicographically."""
        return sorted(self.entries.items(), key=lambda kv: (-kv[1], kv[0]))

    @classmethod
    def from_tokens(cls, tokens) -> "TermFrequencyTable":
        return cls(dict(Counter(tokens)))

    def merge(self, other: "TermFrequencyTable") -> "TermFrequencyTable":
        return TermFrequencyTable(dict(Counter(self.entries) + Counter(other.entries)))


def corpus_files(path) -> list[Path]:
    p = Path(path)
    if p.is_file():
        return [p]
    if p.is_dir():
        return sorted(f for f in p.rglob("*.txt") if f.is_file())
    raise FileNotFoundError(f"corpus not found: {path}")


def count_terms(path, stoplist) -> TermFrequencyTable:
    """Term frequencies over a ``.txt`` file or a directory of them, stop-words removed."""
    counts = Counter()
    for f in corpus_files(path):
        counts.update(remove_stopwords(tokenize(f.read_text(encoding="utf-8")), stoplist))
    return TermFrequencyTable(dict(counts))


@dataclass
class VocabSelection:
    words: list[str]
    counts: list[int]
    coverage: float
    cumulative_mass: float
    mode: CutoffMode = CutoffMode.MASS
    total_tokens: int = 0

    def cumulative(self) -> list[float]:
        run, out = 0, []
        for c in self.counts:
            run += c
            out.append(run / self.total_tokens if self.total_tokens else 0.0)
        return out


def select_vocabulary(
    tf: TermFrequencyTable, coverage: float = DEFAULT_COVERAGE, mode=CutoffMode.MASS
) -> VocabSelection:
    """Shortest prefix of the ranked table that reaches ``coverage``.

    In ``mass`` mode the prefix must hold at least ``coverage`` of all token
    occurrences; in ``types`` mode it is the first ``ceil(coverage * n)``
    words.  Comparisons use exact rationals so 0.95 of 100 is exactly 95.
    """
    mode = CutoffMode(mode)
    if not 0 < coverage <= 1:
        raise ValueError("coverage must lie in (0, 1]")
    ranked = tf.ranked()
    if not ranked:
        raise EmptyTable("term-frequency table is empty")
    total = tf.total_tokens
    target = Fraction(str(coverage))
    if mode is CutoffMode.TYPES:
        n = math.ceil(target * len(ranked))
    elif total == 0:
        n = len(ranked)
    else:
        run, n = 0, len(ranked)
        for i, (_, c) in enumerate(ranked, 1):
            run += c
            if Fraction(run, total) >= target:
                n = i
                break
    chosen = ranked[:n]
    mass = sum(c for _, c in chosen) / total if total else 1.0
    return VocabSelection(
        words=[w for w, _ in chosen],
        counts=[c for _, c in chosen],
        coverage=coverage,
        cumulative_mass=mass,
        mode=mode,
        total_tokens=total,
    )


def write_vocab(selection: VocabSelection, path) -> None:
    lines = [
        f"{w}\t{c}\t{m:.6f}\n"
        for w, c, m in zip(selection.words, selection.counts, selection.cumulative())
    ]
    Path(path).write_text("".join(lines), encoding="utf-8")


def read_vocab(path) -> list[str]:
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip() and not line.startswith("#"):
            words.append(line.split("\t")[0])
    return words
