"""A small lexicon-plus-suffix POS tagger and the tag sidecar reader.

Good enough for the fourteen donor-table tags on short phrases; real corpora
should supply tags from a proper tagger through a sidecar file.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import ParseError

DONOR_TAGS = ("JJ", "JJR", "JJS", "NN", "NNS", "RB", "RBR", "RBS",
              "VB", "VBZ", "VBP", "VBD", "VBN", "VBG")

_AUXILIARIES = frozenset(
    "is are was were be been being has have had get got gets "
    "am 's 're 've".split()
)
_ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "less")


def read_lexicon(path) -> dict[str, str]:
    lex = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        word, tag = line.split("\t")[:2]
        lex[word.strip().lower()] = tag.strip()
    return lex


@lru_cache(maxsize=1)
def default_lexicon() -> dict[str, str]:
    ref = resources.files("lexsent") / "data" / "pos_lexicon.tsv"
    with resources.as_file(ref) as p:
        return read_lexicon(p)


def _guess(word: str, prev: str | None, lex) -> str:
    if word in lex:
        return lex[word]
    if word.isdigit():
        return "CD"
    if word.endswith("ly") and len(word) > 3:
        return "RB"
    if word.endswith("ing") and len(word) > 4:
        return "VBG"
    if word.endswith("ed") and len(word) > 3:
        return "VBN" if prev in _AUXILIARIES else "VBD"
    if word.endswith("s") and not word.endswith("ss"):
        stems = (word[:-1], word[:-3] + "y") if word.endswith("ies") else (word[:-1],)
        if any(lex.get(s) == "NN" for s in stems):
            return "NNS"
    if word.endswith(_ADJ_SUFFIXES) and len(word) > 5:
        return "JJ"
    return "NN"


def pos_tag(tokens, lexicon=None) -> list[str]:
    """One Penn tag per token: lexicon first, then suffix rules, default NN."""
    lex = default_lexicon() if lexicon is None else lexicon
    tags, prev = [], None
    for tok in tokens:
        w = tok.lower()
        tags.append(_guess(w, prev, lex))
        prev = w
    return tags


def read_tag_blocks(path) -> list[list[tuple[str, str]]]:
    """``token<TAB>tag`` sidecar; blank lines separate phrases."""
    blocks, cur = [], []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            if cur:
                blocks.append(cur)
                cur = []
            continue
        if line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ParseError(f"{path}:{lineno}: expected token<TAB>tag")
        cur.append((parts[0].strip(), parts[1].strip()))
    if cur:
        blocks.append(cur)
    return blocks


def read_word_tags(path) -> dict[str, str]:
    """Flatten a sidecar into word -> tag, keeping the most frequent tag per word."""
    counts: dict[str, dict[str, int]] = {}
    for block in read_tag_blocks(path):
        for tok, tag in block:
            d = counts.setdefault(tok.lower(), {})
            d[tag] = d.get(tag, 0) + 1
    return {w: max(sorted(d), key=d.__getitem__) for w, d in counts.items()}
