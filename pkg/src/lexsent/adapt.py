"""Deviation detection and POS-keyed donor-vector substitution."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import model as rntn
from .annotate import TwoClass, map_five_to_two
from .errors import (
    DonorMissing,
    DuplicateDeviation,
    MissingGold,
    MissingTag,
    NoDonorForTag,
    ParseError,
)
from .model import SentimentModel
from .tagger import DONOR_TAGS
from .trees import SentimentTree


@dataclass(frozen=True)
class DonorTable:
    """``(tag, actual class) -> donor word``."""

    cells: dict = field(default_factory=dict)

    def __contains__(self, tag: str) -> bool:
        return any(t == tag for t, _ in self.cells)

    def tags(self) -> list[str]:
        return list(dict.fromkeys(t for t, _ in self.cells))

    def donors(self) -> set[str]:
        return set(self.cells.values())

    @classmethod
    def from_printed(cls, path) -> "DonorTable":
        """Read the table in its printed layout and re-key it by actual class.

        The printed ``non-negative`` column holds negative-sentiment donors and
        vice versa, so the columns are swapped.  A repeated tag takes the
        next tag in :data:`lexsent.tagger.DONOR_TAGS` order that is still
        missing, which turns the second ``VBZ`` row into ``VBG``.
        """
        cells = {}
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParseError(f"{path}:{lineno}: expected pos<TAB>printed-nonneg<TAB>printed-neg")
            tag, printed_nonneg, printed_neg = (p.strip() for p in parts)
            if (tag, TwoClass.NEGATIVE) in cells:
                missing = [t for t in DONOR_TAGS if (t, TwoClass.NEGATIVE) not in cells]
                if not missing:
                    raise ParseError(f"{path}:{lineno}: repeated tag {tag}")
                tag = missing[0]
            cells[(tag, TwoClass.NEGATIVE)] = printed_nonneg
            cells[(tag, TwoClass.NON_NEGATIVE)] = printed_neg
        return cls(cells)

    @classmethod
    def default(cls) -> "DonorTable":
        ref = resources.files("lexsent") / "data" / "donor_table_raw.tsv"
        with resources.as_file(ref) as p:
            return cls.from_printed(p)

    @classmethod
    def from_override(cls, path, base: "DonorTable | None" = None) -> "DonorTable":
        """Apply ``pos<TAB>target_class<TAB>donor`` rows on top of ``base``."""
        cells = dict((base or cls.default()).cells)
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split("\t")]
            if len(parts) != 3 or not all(parts):
                raise ParseError(f"{path}:{lineno}: expected pos<TAB>target_class<TAB>donor")
            cells[(parts[0], TwoClass.parse(parts[1]))] = parts[2]
        return cls(cells)


def donor_word(table: DonorTable, pos: str, target) -> str:
    try:
        return table.cells[(pos, TwoClass(target))]
    except KeyError:
        raise NoDonorForTag(pos) from None


@dataclass(frozen=True)
class DeviationEntry:
    word: str
    model_class: TwoClass
    actual_class: TwoClass
    pos: str
    donor: str

    def __post_init__(self):
        if self.model_class == self.actual_class:
            raise ValueError(f"{self.word!r}: model and actual class agree")


@dataclass
class DeviationReport:
    entries: list[DeviationEntry]
    skipped: list[tuple[str, str]]  # (word, tag) with no donor row

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    @property
    def words(self) -> list[str]:
        return [e.word for e in self.entries]


def model_word_class(model: SentimentModel, word: str) -> TwoClass:
    """Two-class reading of the model's argmax for a one-word phrase."""
    leaf = rntn.forward(model, SentimentTree.leaf(word))
    return map_five_to_two(int(np.argmax(leaf.dist)))


def detect_deviations(vocab, model, gold, tags, table: DonorTable | None = None) -> DeviationReport:
    """Words whose model class disagrees with the resolved human label.

    ``gold`` maps word to :class:`TwoClass` (or is a list of annotation
    records); ``tags`` maps word to a Penn tag.
    """
    table = table or DonorTable.default()
    if not isinstance(gold, dict):
        gold = {r.item: r.resolved for r in gold}
    entries, skipped = [], []
    for word in vocab:
        if word not in gold:
            raise MissingGold(word)
        if word not in tags:
            raise MissingTag(word)
        actual = TwoClass(gold[word])
        predicted = model_word_class(model, word)
        if predicted == actual:
            continue
        tag = tags[word]
        try:
            donor = donor_word(table, tag, actual)
        except NoDonorForTag:
            skipped.append((word, tag))
            continue
        entries.append(DeviationEntry(word, predicted, actual, tag, donor))
    return DeviationReport(entries, skipped)


def substitute_vectors(model: SentimentModel, deviations) -> SentimentModel:
    """New model where each deviated word's row is a copy of its donor's row.

    Donor rows are always read from the input model, so the result does not
    depend on the order of ``deviations``.  OOV words are appended to the
    vocabulary.  Nothing but embedding rows changes.
    """
    deviations = list(deviations)
    seen = set()
    for d in deviations:
        key = model.normalize(d.word)
        if key in seen:
            raise DuplicateDeviation(f"word {d.word!r} listed more than once")
        seen.add(key)
        if model.normalize(d.donor) not in model.vocab:
            raise DonorMissing(d.donor)

    vocab = dict(model.vocab)
    new_words = [model.normalize(d.word) for d in deviations if model.normalize(d.word) not in vocab]
    for i, w in enumerate(new_words):
        vocab[w] = model.E.shape[0] + i
    E = np.vstack([model.E, np.zeros((len(new_words), model.dim))]) if new_words else model.E.copy()
    for d in deviations:
        E[vocab[model.normalize(d.word)]] = model.E[model.vocab[model.normalize(d.donor)]]
    params = {k: v.copy() for k, v in model.params().items()}
    params["E"] = E
    return model.with_params(params, vocab=vocab)


def write_deviations(entries, path) -> None:
    lines = [f"{e.word}\t{e.model_class.value}\t{e.actual_class.value}\t{e.pos}\t{e.donor}\n" for e in entries]
    Path(path).write_text("".join(lines), encoding="utf-8")


def read_deviations(path) -> list[DeviationEntry]:
    out = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split("\t")]
        if len(parts) != 5:
            raise ParseError(f"{path}:{lineno}: expected 5 tab-separated fields")
        word, mc, ac, pos, donor = parts
        try:
            out.append(DeviationEntry(word, TwoClass.parse(mc), TwoClass.parse(ac), pos, donor))
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None
    return out


def write_skipped(skipped, path) -> None:
    Path(path).write_text("".join(f"{w}\t{t}\n" for w, t in skipped), encoding="utf-8")
