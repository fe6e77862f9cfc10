import math
from pathlib import Path

import numpy as np
import pytest

from lexsent.model import load_model

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
TOY = FIXTURES / "toy"
EXPECTED = FIXTURES / "expected"


def oracle_compose(a, b, V, W, bias):
    """Plain-Python parent vector: nested loops, no numpy linear algebra."""
    c = list(a) + list(b)
    n = len(c)
    out = []
    for k in range(len(bias)):
        quad = 0.0
        for i in range(n):
            for j in range(n):
                quad += c[i] * V[k][i][j] * c[j]
        lin = sum(W[k][i] * c[i] for i in range(n))
        out.append(math.tanh(quad + lin + bias[k]))
    return out


def oracle_softmax(logits):
    m = max(logits)
    e = [math.exp(z - m) for z in logits]
    s = sum(e)
    return [x / s for x in e]


def oracle_forward(model, tree):
    """Root distribution recomputed from plain lists (no calls into lexsent maths)."""
    E = model.E.tolist()
    V, W, bias = model.layer.V.tolist(), model.layer.W.tolist(), model.layer.b.tolist()
    Ws, bs = model.head.Ws.tolist(), model.head.bs.tolist()

    def vec(node):
        if node.is_leaf:
            key = node.token.lower()
            if key not in model.vocab:
                key = model.neutral_donor
            return E[model.vocab[key]]
        return oracle_compose(vec(node.left), vec(node.right), V, W, bias)

    p = vec(tree)
    logits = [sum(Ws[r][i] * p[i] for i in range(len(p))) + bs[r] for r in range(5)]
    return oracle_softmax(logits)


def random_tree(rng, words, n_leaves, labelled=False):
    from lexsent.trees import SentimentTree

    units = [SentimentTree.leaf(str(rng.choice(words))) for _ in range(n_leaves)]
    while len(units) > 1:
        i = int(rng.integers(len(units) - 1))
        units[i:i + 2] = [SentimentTree.node(units[i], units[i + 1])]
    tree = units[0]
    if labelled:
        for node in tree.nodes():
            node.label = int(rng.integers(5))
    return tree


@pytest.fixture(scope="session")
def toy_source():
    return load_model(TOY / "source_model.json")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one line per acceptance criterion, echoed again at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
