"""Toy-scale RNTN training: per-node cross-entropy, backprop through structure, AdaGrad."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import model as rntn
from .errors import EmptyTreebank, ParseError, TrainingDiverged, UnlabeledNode
from .model import N_CLASSES, OOVPolicy, SentimentModel
from .trees import SentimentTree, read_tree

log = logging.getLogger(__name__)

PARAM_NAMES = ("E", "V", "W", "b", "Ws", "bs")


@dataclass
class TrainConfig:
    dim: int = rntn.DEFAULT_DIM
    epochs: int = 30
    learning_rate: float = 0.05
    l2: float = 1e-4
    batch_size: int = 10
    seed: int = 0
    init_scale: float = 0.01
    tensor_scale: Optional[float] = None
    oov_policy: OOVPolicy = OOVPolicy.NEUTRAL_DONOR
    neutral_donor: str = rntn.DEFAULT_NEUTRAL_DONOR

    def __post_init__(self):
        self.oov_policy = OOVPolicy(self.oov_policy)
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.l2 < 0:
            raise ValueError("l2 must be >= 0")
        if self.init_scale <= 0:
            raise ValueError("init_scale must be > 0")


@dataclass
class Gradients:
    """Parameter-shaped gradients.  ``E`` is dense; ``rows`` lists rows the data touched."""

    E: np.ndarray
    V: np.ndarray
    W: np.ndarray
    b: np.ndarray
    Ws: np.ndarray
    bs: np.ndarray
    rows: frozenset = frozenset()

    def as_dict(self) -> dict[str, np.ndarray]:
        return {k: getattr(self, k) for k in PARAM_NAMES}


def _check_labels(tree: SentimentTree):
    for node in tree.nodes():
        if node.label is None:
            raise UnlabeledNode(f"unlabeled node in {tree.to_sexpr()}")


def _l2_term(model: SentimentModel, l2: float) -> float:
    if l2 == 0:
        return 0.0
    return l2 * sum(float(np.sum(p * p)) for p in model.params().values())


def loss(model: SentimentModel, tree: SentimentTree, l2: float = 0.0) -> float:
    """Sum of per-node cross-entropies plus ``l2 * ||theta||^2``."""
    _check_labels(tree)
    rntn.forward(model, tree)
    ce = -sum(float(np.log(node.dist[node.label])) for node in tree.nodes())
    return ce + _l2_term(model, l2)


def _leaf_row(model: SentimentModel, token: str) -> Optional[int]:
    row = model.vocab.get(model.normalize(token))
    if row is None and model.oov_policy is OOVPolicy.NEUTRAL_DONOR:
        row = model.vocab.get(model.normalize(model.neutral_donor))
    return row


def gradients(model: SentimentModel, tree: SentimentTree, l2: float = 0.0) -> Gradients:
    """Analytic gradient of :func:`loss` by backpropagation through the tree."""
    _check_labels(tree)
    rntn.forward(model, tree)
    d = model.dim
    V, W = model.layer.V, model.layer.W
    Ws = model.head.Ws
    g = {k: np.zeros_like(v) for k, v in model.params().items()}
    rows = set()

    # top-down: delta[node] = dLoss/d(node.vector) arriving from the parent
    delta = {id(tree): np.zeros(d)}
    for node in reversed(list(tree.nodes())):
        dlogits = node.dist.copy()
        dlogits[node.label] -= 1.0
        g["Ws"] += np.outer(dlogits, node.vector)
        g["bs"] += dlogits
        dp = delta.pop(id(node)) + Ws.T @ dlogits
        if node.is_leaf:
            row = _leaf_row(model, node.token)
            if row is not None:
                g["E"][row] += dp
                rows.add(row)
            continue
        c = np.concatenate([node.left.vector, node.right.vector])
        dz = dp * (1.0 - node.vector**2)
        g["V"] += dz[:, None, None] * np.outer(c, c)[None, :, :]
        g["W"] += np.outer(dz, c)
        g["b"] += dz
        dc = W.T @ dz + np.einsum("k,kij,j->i", dz, V, c) + np.einsum("k,kji,j->i", dz, V, c)
        delta[id(node.left)] = dc[:d]
        delta[id(node.right)] = dc[d:]

    if l2:
        for k, p in model.params().items():
            g[k] += 2.0 * l2 * p
    return Gradients(rows=frozenset(rows), **g)


@dataclass
class GradCheckReport:
    max_rel_error: float
    worst_parameter: str
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= self.tolerance


def grad_check(
    model: SentimentModel,
    tree: SentimentTree,
    epsilon: float = 1e-5,
    tolerance: float = 1e-4,
    l2: float = 0.0,
    analytic: Optional[Gradients] = None,
) -> GradCheckReport:
    """Compare analytic gradients with central differences over every parameter entry.

    ``worst_parameter`` names the block and index, e.g. ``"W[1, 3]"``.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    if analytic is None:
        analytic = gradients(model, tree, l2)
    probe = model.copy()
    worst, worst_name = 0.0, ""
    for name, param in probe.params().items():
        ga_block = getattr(analytic, name)
        for idx in np.ndindex(param.shape):
            orig = param[idx]
            param[idx] = orig + epsilon
            up = loss(probe, tree, l2)
            param[idx] = orig - epsilon
            down = loss(probe, tree, l2)
            param[idx] = orig
            gn = (up - down) / (2 * epsilon)
            ga = ga_block[idx]
            rel = abs(ga - gn) / max(1e-12, abs(ga) + abs(gn))
            if rel > worst or not worst_name:
                worst, worst_name = rel, f"{name}[{', '.join(map(str, idx))}]"
    return GradCheckReport(worst, worst_name, tolerance)


class AdaGrad:
    """Per-parameter AdaGrad with squared-gradient accumulators."""

    def __init__(self, params: dict[str, np.ndarray], learning_rate: float, eps: float = 1e-8):
        self.learning_rate = learning_rate
        self.eps = eps
        self.history = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        for k, g in grads.items():
            self.history[k] += g * g
            params[k] -= self.learning_rate * g / (np.sqrt(self.history[k]) + self.eps)


def mean_node_loss(model: SentimentModel, trees) -> float:
    total, count = 0.0, 0
    for tree in trees:
        total += loss(model, tree)
        count += len(tree)
    return total / count


def node_accuracy(model: SentimentModel, trees) -> float:
    hit = total = 0
    for tree in trees:
        rntn.forward(model, tree)
        for node in tree.nodes():
            hit += int(np.argmax(node.dist)) == node.label
            total += 1
    return hit / total


def train(trees, config: TrainConfig, history: Optional[list] = None) -> SentimentModel:
    """Fit an RNTN on labelled trees with mini-batch AdaGrad.

    Vocabulary is taken from the treebank leaves (case-folded, first-seen
    order); the neutral donor is appended if absent so OOV lookup stays
    defined.  Mean per-node training loss for epoch 0 and every epoch after
    it is appended to ``history`` when given.
    """
    trees = list(trees)
    if not trees:
        raise EmptyTreebank("treebank has no trees")
    for t in trees:
        _check_labels(t)
    words = [tok.lower() for t in trees for tok in t.tokens]
    if config.oov_policy is OOVPolicy.NEUTRAL_DONOR:
        words.append(config.neutral_donor.lower())
    model = SentimentModel.random(
        words,
        dim=config.dim,
        seed=config.seed,
        init_scale=config.init_scale,
        tensor_scale=config.tensor_scale,
        oov_policy=config.oov_policy,
        neutral_donor=config.neutral_donor,
    )
    rng = np.random.default_rng([config.seed, 1])
    params = model.params()
    opt = AdaGrad(params, config.learning_rate)
    losses = [mean_node_loss(model, trees)]
    log.info("epoch 0: mean node loss %.5f", losses[0])
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(trees))
        for start in range(0, len(trees), config.batch_size):
            batch = [trees[i] for i in order[start:start + config.batch_size]]
            acc = {k: np.zeros_like(v) for k, v in params.items()}
            for tree in batch:
                for k, g in gradients(model, tree).as_dict().items():
                    acc[k] += g
            for k in acc:
                acc[k] /= len(batch)
                if config.l2:
                    acc[k] += 2.0 * config.l2 * params[k]
            opt.step(params, acc)
        if not all(np.all(np.isfinite(p)) for p in params.values()):
            raise TrainingDiverged(f"non-finite parameters after epoch {epoch}")
        losses.append(mean_node_loss(model, trees))
        log.info("epoch %d: mean node loss %.5f", epoch, losses[-1])
    if history is not None:
        history.extend(losses)
    return model


def read_treebank(path) -> list[SentimentTree]:
    """One labelled s-expression per non-blank line."""
    trees = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            trees.append(read_tree(line))
        except ParseError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
    return trees


def write_treebank(trees, path) -> None:
    Path(path).write_text("".join(t.to_sexpr() + "\n" for t in trees), encoding="utf-8")


def check_label_coverage(trees) -> set[int]:
    """Classes that never occur as gold labels (empty set means full coverage)."""
    seen = {n.label for t in trees for n in t.nodes()}
    return set(range(N_CLASSES)) - seen
