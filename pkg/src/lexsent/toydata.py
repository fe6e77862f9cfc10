"""Synthetic toy domain pair used for fixtures and end-to-end tests.

The source side is a labelled "movie review" treebank.  The target side is a
small "legal" corpus, judge annotations, a POS sidecar and a gold phrase set.
Several legal words carry a sentiment the source model cannot know: they are
either out of vocabulary there (and so read as neutral) or have the opposite
polarity in reviews.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .annotate import AnnotationRecord, TwoClass, map_five_to_two
from .trees import SentimentTree, binarize

NEGATOR = "not"

# word -> five-class label in the review domain
SOURCE_LEXICON = {
    # neutral fillers and the neutral donors
    "the": 2, "a": 2, "film": 2, "movie": 2, "story": 2, "plot": 2, "actor": 2,
    "it": 2, "is": 2, "was": 2, "this": 2, "and": 2, "thing": 2, "things": 2,
    "natural": 2, "naturally": 2, "do": 2, "does": 2, "did": 2, "given": 2,
    "doing": 2, "scene": 2, "ending": 2, NEGATOR: 2,
    # negative, including the negative donors
    "wrong": 1, "worse": 1, "failure": 1, "politics": 1, "insufficiently": 1,
    "hate": 1, "hates": 1, "hated": 1, "bored": 1, "ignoring": 1, "bad": 1,
    "boring": 1, "dull": 1, "crime": 1, "guilty": 1, "dismissed": 1, "strike": 1,
    "worst": 0, "awful": 0, "terrible": 0,
    # positive; "charged" and "execution" praise a film
    "good": 3, "fun": 3, "nice": 3, "charged": 3, "execution": 3,
    "great": 4, "brilliant": 4, "masterpiece": 4,
}

_SOURCE_NEUTRAL = [w for w, c in SOURCE_LEXICON.items() if c == 2 and w != NEGATOR]
_SOURCE_POLAR = [w for w, c in SOURCE_LEXICON.items() if c != 2]

# word -> (resolved class, Penn tag) in the legal domain
LEGAL_LEXICON = {
    # negative in law, unknown or positive in reviews
    "insufficient": (TwoClass.NEGATIVE, "JJ"),
    "deficiently": (TwoClass.NEGATIVE, "RB"),
    "convicted": (TwoClass.NEGATIVE, "VBN"),
    "violated": (TwoClass.NEGATIVE, "VBD"),
    "breach": (TwoClass.NEGATIVE, "NN"),
    "penalties": (TwoClass.NEGATIVE, "NNS"),
    "liable": (TwoClass.NEGATIVE, "JJ"),
    "fraudulent": (TwoClass.NEGATIVE, "JJ"),
    "negligent": (TwoClass.NEGATIVE, "JJ"),
    "infringes": (TwoClass.NEGATIVE, "VBZ"),
    "accused": (TwoClass.NEGATIVE, "VBN"),
    "denies": (TwoClass.NEGATIVE, "VBZ"),
    "charged": (TwoClass.NEGATIVE, "VBN"),
    "execution": (TwoClass.NEGATIVE, "NN"),
    # routine in law, negative in reviews
    "dismissed": (TwoClass.NON_NEGATIVE, "VBN"),
    "strike": (TwoClass.NON_NEGATIVE, "VB"),
    # negative, but its tag has no donor row
    "unless": (TwoClass.NEGATIVE, "IN"),
    # agrees across domains
    "guilty": (TwoClass.NEGATIVE, "JJ"),
    # neutral legal vocabulary (out of vocabulary for the source model)
    "court": (TwoClass.NON_NEGATIVE, "NN"),
    "evidence": (TwoClass.NON_NEGATIVE, "NN"),
    "defendant": (TwoClass.NON_NEGATIVE, "NN"),
    "plaintiff": (TwoClass.NON_NEGATIVE, "NN"),
    "judge": (TwoClass.NON_NEGATIVE, "NN"),
    "appeal": (TwoClass.NON_NEGATIVE, "NN"),
    "motion": (TwoClass.NON_NEGATIVE, "NN"),
    "contract": (TwoClass.NON_NEGATIVE, "NN"),
    "claim": (TwoClass.NON_NEGATIVE, "NN"),
    "statute": (TwoClass.NON_NEGATIVE, "NN"),
    "witness": (TwoClass.NON_NEGATIVE, "NN"),
    "counsel": (TwoClass.NON_NEGATIVE, "NN"),
    "jury": (TwoClass.NON_NEGATIVE, "NN"),
    "filed": (TwoClass.NON_NEGATIVE, "VBD"),
    "reviewed": (TwoClass.NON_NEGATIVE, "VBD"),
    "performed": (TwoClass.NON_NEGATIVE, "VBD"),
    "acted": (TwoClass.NON_NEGATIVE, "VBD"),
    "admissible": (TwoClass.NON_NEGATIVE, "JJ"),
    "valid": (TwoClass.NON_NEGATIVE, "JJ"),
}

# rare words that the coverage cutoff should drop
LEGAL_RARE = (
    "aforesaid", "hereinafter", "notwithstanding", "heretofore", "forthwith", "pursuant",
    "herewith", "inasmuch", "arguendo", "certiorari", "estoppel", "mandamus", "subpoena",
    "tort", "lien", "escrow", "remand", "affidavit", "deposition", "docket", "bailiff",
    "clerk", "tribunal", "magistrate", "injunction", "covenant", "easement", "probate",
    "codicil", "bequest", "tenancy", "replevin", "laches", "venue", "joinder", "proviso",
)

_NOUNS = ["court", "evidence", "defendant", "plaintiff", "judge", "appeal", "motion",
          "contract", "claim", "statute", "witness", "counsel", "jury"]
_PARTIES = ["defendant", "plaintiff", "witness", "counsel"]

DEVIATED_NEGATIVE = [w for w, (c, t) in LEGAL_LEXICON.items()
                     if c is TwoClass.NEGATIVE and w not in ("guilty",)]


def _flip(label: int) -> int:
    return {0: 3, 1: 3, 2: 2, 3: 1, 4: 1}[label]


def label_tree(tree: SentimentTree, word_label) -> SentimentTree:
    """Assign gold labels bottom-up.

    ``not X`` flips X; otherwise any negative child wins (the most negative),
    then any positive child (the most positive), else neutral.
    """
    for node in tree.nodes():
        if node.is_leaf:
            node.label = word_label(node.token)
            continue
        a, b = node.left.label, node.right.label
        if node.left.is_leaf and node.left.token == NEGATOR:
            node.label = _flip(b)
        elif min(a, b) <= 1:
            node.label = min(a, b)
        elif max(a, b) >= 3:
            node.label = max(a, b)
        else:
            node.label = 2
    return tree


def _random_bracketing(units, rng) -> SentimentTree:
    while len(units) > 1:
        i = int(rng.integers(len(units) - 1))
        units = units[:i] + [SentimentTree.node(units[i], units[i + 1])] + units[i + 2:]
    return units[0]


def source_treebank(n_trees: int = 400, seed: int = 0) -> list[SentimentTree]:
    """Labelled review trees: every word alone once, then random short sentences."""
    rng = np.random.default_rng(seed)
    trees = [SentimentTree.leaf(w, label) for w, label in SOURCE_LEXICON.items()]
    while len(trees) < n_trees:
        n_neutral = int(rng.integers(1, 4))
        units = [SentimentTree.leaf(str(rng.choice(_SOURCE_NEUTRAL))) for _ in range(n_neutral)]
        for _ in range(int(rng.integers(0, 3))):
            w = SentimentTree.leaf(str(rng.choice(_SOURCE_POLAR)))
            if rng.random() < 0.3:
                w = SentimentTree.node(SentimentTree.leaf(NEGATOR), w)
            units.insert(int(rng.integers(len(units) + 1)), w)
        shape = rng.random()
        if shape < 0.5:
            # right-branching, the shape used for unparsed target phrases
            tree = units[-1]
            for u in reversed(units[:-1]):
                tree = SentimentTree.node(u, tree)
        else:
            tree = _random_bracketing(units, rng)
        trees.append(label_tree(tree, SOURCE_LEXICON.__getitem__))
    return trees


def legal_word_label(word: str) -> int:
    """Five-class stand-in for a legal word: Negative (1) or Neutral (2)."""
    c = LEGAL_LEXICON.get(word, (TwoClass.NON_NEGATIVE, ""))[0]
    return 1 if c is TwoClass.NEGATIVE else 2


def legal_gold(phrase: str) -> TwoClass:
    tree = label_tree(binarize(phrase.split()), legal_word_label)
    return map_five_to_two(tree.label)


def _pick(rng, xs):
    return str(xs[int(rng.integers(len(xs)))])


def _legal_phrase(rng, deviated: bool) -> str:
    n, n2, p = _pick(rng, _NOUNS), _pick(rng, _NOUNS), _pick(rng, _PARTIES)
    if deviated:
        templates = [
            lambda: f"the {n} is {_pick(rng, ['insufficient', 'liable', 'fraudulent', 'negligent'])}",
            lambda: f"the {p} was {_pick(rng, ['convicted', 'accused', 'charged'])}",
            lambda: f"the {p} {_pick(rng, ['infringes', 'denies'])} the {n2}",
            lambda: f"the {p} violated the {n2}",
            lambda: f"{p} performed deficiently",
            lambda: f"the {_pick(rng, ['breach', 'execution'])} of the {n2}",
            lambda: f"penalties for the {p}",
            lambda: f"the {n} dismissed the {n2}",
            lambda: f"strike the {n2}",
            lambda: f"the {p} is not {_pick(rng, ['liable', 'negligent'])}",
        ]
    else:
        templates = [
            lambda: f"the {n} {_pick(rng, ['filed', 'reviewed'])} the {n2}",
            lambda: f"the {n} is {_pick(rng, ['admissible', 'valid'])}",
            lambda: f"the {p} acted",
            lambda: f"the {p} is guilty",
            lambda: f"the {p} is not guilty",
            lambda: f"the {n} of the {n2}",
        ]
    return templates[int(rng.integers(len(templates)))]()


def legal_testset(n_phrases: int = 200, seed: int = 0, deviated_share: float = 0.6):
    """``[(phrase, judge_labels)]`` with unique phrases; two judges always match the truth."""
    rng = np.random.default_rng([seed, 7])
    out, seen = [], set()
    while len(out) < n_phrases:
        phrase = _legal_phrase(rng, rng.random() < deviated_share)
        if phrase in seen:
            continue
        seen.add(phrase)
        truth = legal_gold(phrase)
        other = TwoClass.NON_NEGATIVE if truth is TwoClass.NEGATIVE else TwoClass.NEGATIVE
        dissent = other if rng.random() < 0.2 else truth
        labels = [truth, truth, dissent]
        rng.shuffle(labels)
        out.append((phrase, tuple(labels)))
    return out


def legal_corpus(n_docs: int = 12, sentences_per_doc: int = 25, seed: int = 0) -> list[str]:
    rng = np.random.default_rng([seed, 3])
    docs = []
    for _ in range(n_docs):
        sents = []
        for _ in range(sentences_per_doc):
            s = _legal_phrase(rng, rng.random() < 0.6)
            sents.append(s[0].upper() + s[1:] + ".")
            if rng.random() < 0.08:
                sents.append(f"Unless the {_pick(rng, _NOUNS)} is valid.")
        docs.append(" ".join(sents) + "\n")
    # each rare word occurs once, together well under the coverage cutoff
    for i, w in enumerate(LEGAL_RARE):
        j = i % n_docs
        docs[j] = docs[j].rstrip("\n") + f" The {w}.\n"
    return docs


def legal_annotations(seed: int = 0) -> list[AnnotationRecord]:
    rng = np.random.default_rng([seed, 5])
    records = []
    for word, (truth, _) in LEGAL_LEXICON.items():
        other = TwoClass.NON_NEGATIVE if truth is TwoClass.NEGATIVE else TwoClass.NEGATIVE
        if word == "charged":
            labels = (TwoClass.NEGATIVE, TwoClass.NEGATIVE, TwoClass.NON_NEGATIVE)
        else:
            labels = (truth, truth, other if rng.random() < 0.25 else truth)
        records.append(AnnotationRecord.from_judges(word, labels))
    for w in LEGAL_RARE:
        records.append(AnnotationRecord.from_judges(w, (TwoClass.NON_NEGATIVE,) * 3))
    return records


def legal_tags() -> dict[str, str]:
    tags = {w: t for w, (_, t) in LEGAL_LEXICON.items()}
    tags.update({w: "NN" for w in LEGAL_RARE})
    return tags


def _tsv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, delimiter="\t", quotechar='"', lineterminator="\n").writerows(rows)
    return buf.getvalue()


def write_toy_domain(outdir, seed: int = 0, n_source_trees: int = 400, n_test: int = 200) -> dict[str, Path]:
    """Write every input file of the toy pipeline under ``outdir``."""
    from .annotate import save_annotations
    from .trainer import write_treebank

    out = Path(outdir)
    (out / "legal_corpus").mkdir(parents=True, exist_ok=True)
    paths = {
        "treebank": out / "source_treebank.txt",
        "corpus": out / "legal_corpus",
        "annotations": out / "legal_annotations.tsv",
        "tags": out / "legal_tags.tsv",
        "testset": out / "legal_testset.tsv",
    }
    write_treebank(source_treebank(n_source_trees, seed), paths["treebank"])
    for i, doc in enumerate(legal_corpus(seed=seed)):
        (paths["corpus"] / f"doc{i:02d}.txt").write_text(doc, encoding="utf-8")
    save_annotations(legal_annotations(seed), paths["annotations"])
    paths["tags"].write_text("".join(f"{w}\t{t}\n" for w, t in legal_tags().items()), encoding="utf-8")
    paths["testset"].write_text(
        _tsv([p, *(lab.value for lab in labels)] for p, labels in legal_testset(n_test, seed)),
        encoding="utf-8",
    )
    return paths
