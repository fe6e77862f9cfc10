"""Binary phrase trees, the PTB-style s-expression reader and a fallback binarizer."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .errors import EmptyPhrase, EmptyTree, NonBinaryNode, ParseError


@dataclass(eq=False)
class SentimentTree:
    """A strictly binary tree node.

    Leaves carry ``token``; internal nodes carry ``left`` and ``right``.
    ``vector`` and ``dist`` are filled in by :func:`lexsent.model.forward`.
    """

    token: Optional[str] = None
    left: Optional["SentimentTree"] = None
    right: Optional["SentimentTree"] = None
    label: Optional[int] = None
    tag: Optional[str] = None
    vector: Optional[np.ndarray] = field(default=None, repr=False)
    dist: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.token is None:
            if self.left is None or self.right is None:
                raise NonBinaryNode("internal node needs exactly two children")
        elif self.left is not None or self.right is not None:
            raise NonBinaryNode(f"leaf {self.token!r} cannot have children")

    @classmethod
    def leaf(cls, token: str, label: Optional[int] = None) -> "SentimentTree":
        return cls(token=token, label=label)

    @classmethod
    def node(cls, left, right, label: Optional[int] = None) -> "SentimentTree":
        return cls(left=left, right=right, label=label)

    @property
    def is_leaf(self) -> bool:
        return self.token is not None

    def nodes(self) -> Iterator["SentimentTree"]:
        """Post-order traversal (children before parents)."""
        if not self.is_leaf:
            yield from self.left.nodes()
            yield from self.right.nodes()
        yield self

    def leaves(self) -> list["SentimentTree"]:
        return [n for n in self.nodes() if n.is_leaf]

    @property
    def tokens(self) -> list[str]:
        return [n.token for n in self.leaves()]

    def __len__(self):
        return sum(1 for _ in self.nodes())

    def copy(self) -> "SentimentTree":
        """Structure-only copy: drops forward annotations."""
        if self.is_leaf:
            return SentimentTree(token=self.token, label=self.label, tag=self.tag)
        return SentimentTree(left=self.left.copy(), right=self.right.copy(), label=self.label)

    def to_sexpr(self, labels: bool = True) -> str:
        head = f"{self.label} " if labels and self.label is not None else ""
        if self.is_leaf:
            return f"({head}{self.token})"
        return f"({head}{self.left.to_sexpr(labels)} {self.right.to_sexpr(labels)})"

    def __str__(self):
        return self.to_sexpr()


_TOKEN = re.compile(r"\(|\)|[^\s()]+")
_LABEL = re.compile(r"^[0-4]$")


def read_tree(text: str) -> SentimentTree:
    """Parse one s-expression into a strictly binary tree.

    Both ``((not) (guilty))`` and ``(2 (1 not) (1 guilty))`` are accepted.
    A leading integer 0-4 inside a group that has further elements is read
    as the node's gold label.  Unary wrappers are collapsed.
    """
    matches = list(_TOKEN.finditer(text))
    if not matches:
        raise EmptyTree("empty tree text")
    pos = 0

    def parse():
        nonlocal pos
        if pos >= len(matches):
            raise ParseError("unexpected end of input", len(text))
        m = matches[pos]
        if m.group() == ")":
            raise ParseError("unexpected ')'", m.start())
        if m.group() != "(":
            pos += 1
            return m.group()
        start = m.start()
        pos += 1
        items = []
        while True:
            if pos >= len(matches):
                raise ParseError("unbalanced '('", start)
            if matches[pos].group() == ")":
                pos += 1
                break
            items.append(parse())
        return _build(items, text[start:matches[pos - 1].end()], start)

    result = parse()
    if pos != len(matches):
        raise ParseError("trailing input after tree", matches[pos].start())
    if isinstance(result, str):
        return SentimentTree.leaf(result)
    return result


def _build(items, span, start):
    label = None
    if len(items) >= 2 and isinstance(items[0], str) and _LABEL.match(items[0]):
        label = int(items[0])
        items = items[1:]
    children = [SentimentTree.leaf(i) if isinstance(i, str) else i for i in items]
    if not children:
        raise ParseError("empty group", start)
    if len(children) == 1:
        child = children[0]
        if label is not None:
            child.label = label
        return child
    if len(children) > 2:
        raise NonBinaryNode(f"node with {len(children)} children: {span}")
    return SentimentTree.node(children[0], children[1], label=label)


def binarize(tokens) -> SentimentTree:
    """Right-branching tree ``(t1 (t2 (... (tn-1 tn))))``."""
    tokens = list(tokens)
    if not tokens:
        raise EmptyPhrase("cannot build a tree from zero tokens")
    tree = SentimentTree.leaf(tokens[-1])
    for tok in reversed(tokens[:-1]):
        tree = SentimentTree.node(SentimentTree.leaf(tok), tree)
    return tree
