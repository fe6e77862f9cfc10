"""Phrase classification with the two-class negative-threshold rule."""

from __future__ import annotations

import enum
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import model as rntn
from .annotate import TwoClass, map_five_to_two
from .errors import InvalidDistribution
from .model import FiveClass, SentimentModel
from .tagger import pos_tag
from .trees import SentimentTree, binarize, read_tree

DEFAULT_THRESHOLD = 0.4


class MassMode(str, enum.Enum):
    COMBINED = "combined"
    NEGATIVE_ONLY = "negative-only"


class RuleFired(str, enum.Enum):
    ARGMAX = "argmax"
    THRESHOLD = "threshold"
    DEFAULT = "default"


class InputFormat(str, enum.Enum):
    TEXT = "text"
    SEXPR = "sexpr"


def _check_distribution(dist) -> np.ndarray:
    p = np.asarray(dist, dtype=np.float64)
    if p.shape != (rntn.N_CLASSES,) or not np.all(np.isfinite(p)):
        raise InvalidDistribution(f"expected {rntn.N_CLASSES} finite probabilities, got {p!r}")
    if np.any(p < 0) or np.any(p > 1) or abs(p.sum() - 1.0) > 1e-9:
        raise InvalidDistribution(f"not a probability distribution: {p!r}")
    return p


def negative_mass(dist, mass_mode=MassMode.COMBINED) -> float:
    p = np.asarray(dist, dtype=np.float64)
    if MassMode(mass_mode) is MassMode.NEGATIVE_ONLY:
        return float(p[FiveClass.NEGATIVE])
    return float(p[FiveClass.VERY_NEGATIVE] + p[FiveClass.NEGATIVE])


def decide_two_class(dist, threshold: float = DEFAULT_THRESHOLD, mass_mode=MassMode.COMBINED):
    """Return ``(TwoClass, RuleFired)``.

    Negative if the argmax class is negative; otherwise Negative when the
    negative score is strictly above ``threshold``.
    """
    p = _check_distribution(dist)
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    if map_five_to_two(int(np.argmax(p))) is TwoClass.NEGATIVE:
        return TwoClass.NEGATIVE, RuleFired.ARGMAX
    if negative_mass(p, mass_mode) > threshold:
        return TwoClass.NEGATIVE, RuleFired.THRESHOLD
    return TwoClass.NON_NEGATIVE, RuleFired.DEFAULT


@dataclass
class ClassifyOptions:
    threshold: float = DEFAULT_THRESHOLD
    mass_mode: MassMode = MassMode.COMBINED
    input_format: InputFormat = InputFormat.TEXT
    tag: bool = False

    def __post_init__(self):
        self.mass_mode = MassMode(self.mass_mode)
        self.input_format = InputFormat(self.input_format)
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")


@dataclass
class ClassificationResult:
    text: str
    two_class: TwoClass
    five_dist: np.ndarray
    negative_mass: float
    rule_fired: RuleFired
    tree: SentimentTree

    def to_json(self) -> dict:
        return {
            "text": self.text,
            "two_class": self.two_class.value,
            "five_dist": [float(x) for x in self.five_dist],
            "negative_mass": self.negative_mass,
            "rule_fired": self.rule_fired.value,
        }


def phrase_tree(
    phrase,
    input_format=InputFormat.TEXT,
    binarizer: Callable[[list], SentimentTree] = binarize,
    tags=None,
) -> SentimentTree:
    """Build a tree from an s-expression, a raw string, or a token list."""
    if isinstance(phrase, SentimentTree):
        tree = phrase.copy()
    elif InputFormat(input_format) is InputFormat.SEXPR:
        tree = read_tree(phrase)
    else:
        tokens = phrase.split() if isinstance(phrase, str) else list(phrase)
        tree = binarizer(tokens)
    leaves = tree.leaves()
    if tags is True:
        tags = pos_tag([n.token for n in leaves])
    if tags:
        for node, tag in zip(leaves, tags):
            node.tag = tag
    return tree


def classify_tree(model: SentimentModel, tree: SentimentTree, text: str, options=None) -> ClassificationResult:
    options = options or ClassifyOptions()
    rntn.forward(model, tree)
    two, rule = decide_two_class(tree.dist, options.threshold, options.mass_mode)
    return ClassificationResult(
        text=text,
        two_class=two,
        five_dist=tree.dist,
        negative_mass=negative_mass(tree.dist, options.mass_mode),
        rule_fired=rule,
        tree=tree,
    )


def classify_phrase(
    model: SentimentModel,
    phrase,
    options: Optional[ClassifyOptions] = None,
    binarizer: Callable[[list], SentimentTree] = binarize,
    tags=None,
) -> ClassificationResult:
    options = options or ClassifyOptions()
    tree = phrase_tree(phrase, options.input_format, binarizer, tags if tags is not None else options.tag)
    text = phrase if isinstance(phrase, str) else " ".join(tree.tokens)
    return classify_tree(model, tree, text, options)


def classify_batch(model, phrases, options=None, threads: int = 1) -> list[ClassificationResult]:
    """Classify many phrases; ``threads > 1`` fans out over a thread pool (results keep input order)."""
    phrases = list(phrases)
    if threads <= 1:
        return [classify_phrase(model, p, options) for p in phrases]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda p: classify_phrase(model, p, options), phrases))


def to_jsonl(results) -> str:
    return "".join(json.dumps(r.to_json()) + "\n" for r in results)


def render_trace(tree: SentimentTree, options=None, indent: str = "  ") -> str:
    """Indented per-node view: label, negative mass and top class, children below parents."""
    options = options or ClassifyOptions()
    lines = []

    def walk(node, depth):
        two, _ = decide_two_class(node.dist, options.threshold, options.mass_mode)
        head = node.token if node.is_leaf else "*"
        tag = f"/{node.tag}" if node.tag else ""
        top = FiveClass(int(np.argmax(node.dist))).name.lower()
        mass = negative_mass(node.dist, options.mass_mode)
        lines.append(f"{indent * depth}{head}{tag}  {two.value}  neg={mass:.4f}  top={top}")
        if not node.is_leaf:
            walk(node.left, depth + 1)
            walk(node.right, depth + 1)

    walk(tree, 0)
    return "\n".join(lines) + "\n"
