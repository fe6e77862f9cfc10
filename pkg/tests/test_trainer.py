import math

import numpy as np
import pytest

from lexsent.errors import EmptyTreebank, ParseError, TrainingDiverged, UnlabeledNode
from lexsent.model import SentimentHead, SentimentModel
from lexsent.trainer import (
    AdaGrad,
    Gradients,
    TrainConfig,
    check_label_coverage,
    grad_check,
    gradients,
    loss,
    node_accuracy,
    read_treebank,
    train,
    write_treebank,
)
from lexsent.trees import SentimentTree, read_tree

from conftest import oracle_compose, oracle_softmax, random_tree


def uniform_head_model(words=("a", "b", "thing"), dim=3):
    m = SentimentModel.random(list(words), dim=dim, seed=1)
    m.head = SentimentHead(np.zeros((5, dim)), np.zeros(5))
    return m


def test_uniform_loss_single_leaf():
    assert abs(loss(uniform_head_model(), SentimentTree.leaf("a", 3)) - math.log(5)) < 1e-12


def test_uniform_loss_three_nodes():
    t = read_tree("(2 (1 a) (4 b))")
    assert abs(loss(uniform_head_model(), t) - 3 * math.log(5)) < 1e-12


def test_loss_matches_oracle():
    m = SentimentModel.random(["a", "b", "thing"], dim=2, seed=3, init_scale=0.9, tensor_scale=0.9)
    t = read_tree("(0 (3 a) (1 b))")
    E, V, W, b = m.E.tolist(), m.layer.V.tolist(), m.layer.W.tolist(), m.layer.b.tolist()
    Ws, bs = m.head.Ws.tolist(), m.head.bs.tolist()

    def dist(p):
        return oracle_softmax([sum(Ws[r][i] * p[i] for i in range(2)) + bs[r] for r in range(5)])

    va, vb = E[m.vocab["a"]], E[m.vocab["b"]]
    root = oracle_compose(va, vb, V, W, b)
    want = -math.log(dist(va)[3]) - math.log(dist(vb)[1]) - math.log(dist(root)[0])
    assert abs(loss(m, t) - want) < 1e-12


def test_loss_includes_l2():
    m = uniform_head_model()
    t = SentimentTree.leaf("a", 0)
    sq = sum(float(np.sum(p * p)) for p in m.params().values())
    assert abs(loss(m, t, l2=0.3) - (math.log(5) + 0.3 * sq)) < 1e-12


def test_unlabelled_rejected():
    with pytest.raises(UnlabeledNode):
        loss(uniform_head_model(), read_tree("((a) (b))"))
    with pytest.raises(UnlabeledNode):
        gradients(uniform_head_model(), read_tree("(1 (a) (1 b))"))


def test_gradient_at_zero_parameters():
    m = SentimentModel.random(["a", "thing"], dim=2, seed=0)
    for p in m.params().values():
        p[...] = 0.0
    g = gradients(m, SentimentTree.leaf("a", 2))
    want = np.full(5, 0.2)
    want[2] -= 1
    assert np.allclose(g.bs, want, atol=1e-15)


def test_untouched_rows_have_zero_gradient():
    m = SentimentModel.random(["a", "b", "c", "thing"], dim=3, seed=0)
    g = gradients(m, read_tree("(1 (1 a) (2 b))"))
    assert not np.any(g.E[m.vocab["c"]]) and not np.any(g.E[m.vocab["thing"]])
    assert g.rows == {m.vocab["a"], m.vocab["b"]}


def test_oov_gradient_lands_on_donor_row():
    m = SentimentModel.random(["a", "thing"], dim=3, seed=0)
    g = gradients(m, read_tree("(1 (1 a) (2 zzz))"))
    assert np.any(g.E[m.vocab["thing"]])


def test_full_bundle_against_finite_differences():
    rng = np.random.default_rng(5)
    m = SentimentModel.random(["a", "b", "c", "thing"], dim=3, seed=11, init_scale=0.5, tensor_scale=0.5)
    t = random_tree(rng, ["a", "b", "c", "thing"], 5, labelled=True)
    report = grad_check(m, t, epsilon=1e-5, tolerance=1e-4, l2=1e-3)
    assert report.passed, report


def test_grad_check_zero_model_passes():
    m = SentimentModel.random(["a", "thing"], dim=2, seed=0)
    for p in m.params().values():
        p[...] = 0.0
    assert grad_check(m, read_tree("(1 (1 a) (2 a))")).passed


def test_grad_check_detects_corruption():
    m = SentimentModel.random(["a", "b", "thing"], dim=3, seed=2, init_scale=0.5, tensor_scale=0.5)
    t = read_tree("(1 (3 a) (0 b))")
    g = gradients(m, t)
    idx = np.unravel_index(np.argmax(np.abs(g.W)), g.W.shape)
    g.W[idx] *= 2
    report = grad_check(m, t, analytic=g)
    assert not report.passed
    assert report.worst_parameter.startswith("W[")


def test_grad_check_rejects_bad_epsilon():
    m = uniform_head_model()
    with pytest.raises(ValueError):
        grad_check(m, SentimentTree.leaf("a", 1), epsilon=0)


def test_adagrad_accumulators_monotone():
    rng = np.random.default_rng(0)
    params = {"x": rng.normal(size=4)}
    opt = AdaGrad(params, 0.1)
    prev = opt.history["x"].copy()
    for _ in range(20):
        opt.step(params, {"x": rng.normal(size=4)})
        assert np.all(opt.history["x"] >= prev)
        prev = opt.history["x"].copy()


def test_l2_alone_shrinks_magnitude():
    params = {"x": np.array([0.5, -0.3, 2.0])}
    opt = AdaGrad(params, 0.01)
    l2 = 0.1
    for _ in range(10):
        before = np.abs(params["x"]).copy()
        opt.step(params, {"x": 2 * l2 * params["x"]})
        assert np.all(np.abs(params["x"]) < before)


def _toy_corpus(rng, n=20):
    words = ["bad", "awful", "film", "plot", "the", "is", "thing", "story"]
    negative = {"bad", "awful"}
    trees = []
    for _ in range(n):
        t = random_tree(rng, words, int(rng.integers(1, 5)))
        for node in t.nodes():
            if node.is_leaf:
                node.label = 1 if node.token in negative else 2
            else:
                node.label = min(node.left.label, node.right.label)
        trees.append(t)
    return trees


def test_training_reduces_loss_and_is_deterministic():
    trees = _toy_corpus(np.random.default_rng(0))
    cfg = TrainConfig(dim=4, epochs=50, seed=3)
    h1, h2 = [], []
    m1 = train(trees, cfg, h1)
    m2 = train(trees, cfg, h2)
    assert h1[-1] < h1[0]
    assert m1.equals(m2) and h1 == h2
    for p in m1.params().values():
        assert np.all(np.isfinite(p))


def test_separable_corpus_accuracy():
    trees = _toy_corpus(np.random.default_rng(1), n=60)
    m = train(trees, TrainConfig(dim=4, epochs=60, seed=0))
    assert node_accuracy(m, trees) >= 0.95


def test_training_errors():
    with pytest.raises(EmptyTreebank):
        train([], TrainConfig())
    with pytest.raises(UnlabeledNode):
        train([read_tree("((a) (b))")], TrainConfig(dim=2, epochs=1))
    with pytest.raises(ValueError):
        TrainConfig(epochs=0)
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0)
    with pytest.raises(ValueError):
        TrainConfig(batch_size=0)


def test_divergence_is_reported():
    trees = _toy_corpus(np.random.default_rng(2), n=5)
    with pytest.raises(TrainingDiverged):
        train(trees, TrainConfig(dim=2, epochs=2, learning_rate=float("inf")))


def test_treebank_io(tmp_path):
    text = "# comment\n(3 (2 (2 The) (2 movie)) (3 (2 was) (4 great)))\n\n(1 (0 awful) (1 bad))\n"
    (tmp_path / "tb.txt").write_text(text)
    trees = read_treebank(tmp_path / "tb.txt")
    assert len(trees) == 2
    write_treebank(trees, tmp_path / "out.txt")
    assert [t.to_sexpr() for t in read_treebank(tmp_path / "out.txt")] == [t.to_sexpr() for t in trees]
    assert check_label_coverage(trees) == set()
    assert check_label_coverage(trees[1:]) == {2, 3, 4}


def test_treebank_parse_error_names_line(tmp_path):
    (tmp_path / "tb.txt").write_text("(1 a)\n(1 (a)\n")
    with pytest.raises(ParseError, match=":2:"):
        read_treebank(tmp_path / "tb.txt")


def test_gradients_bundle_dict():
    m = uniform_head_model()
    g = gradients(m, SentimentTree.leaf("a", 1))
    assert isinstance(g, Gradients)
    assert set(g.as_dict()) == {"E", "V", "W", "b", "Ws", "bs"}
