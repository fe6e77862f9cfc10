"""One test per acceptance criterion; each prints a PASS/FAIL line with its runtime."""

import contextlib
import json
import subprocess
import sys
import time
from decimal import Decimal
from fractions import Fraction

import numpy as np

from lexsent.adapt import DonorTable, donor_word, model_word_class, read_deviations, substitute_vectors
from lexsent.annotate import TwoClass, map_five_to_two, read_gold_testset
from lexsent.classify import classify_batch, classify_phrase, decide_two_class
from lexsent.evaluate import ConfusionMatrix2, metrics
from lexsent.model import SentimentModel, forward, load_model
from lexsent.tagger import DONOR_TAGS
from lexsent.trainer import grad_check
from lexsent.vocab import TermFrequencyTable, select_vocabulary

from conftest import ACCEPTANCE_LINES, EXPECTED, ROOT, TOY, oracle_forward, random_tree

NEG, NON = TwoClass.NEGATIVE, TwoClass.NON_NEGATIVE


@contextlib.contextmanager
def criterion(number, title, budget):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        in_time = elapsed < budget
        status = "PASS" if ok and in_time else "FAIL"
        line = f"criterion {number}: {status}  {title}  ({elapsed:.2f}s, budget {budget:g}s)"
        ACCEPTANCE_LINES.append(line)
        print(line)
    assert in_time, f"criterion {number} took {elapsed:.2f}s (budget {budget}s)"


def test_1_gradient_check():
    with criterion(1, "analytic gradients match central differences", 30):
        worst = 0.0
        for seed in range(12):
            rng = np.random.default_rng(seed)
            dim = int(rng.integers(2, 6))
            words = [f"w{i}" for i in range(6)]
            tree = random_tree(rng, words, int(rng.integers(2, 8)), labelled=True)
            model = SentimentModel.random(words, dim=dim, seed=seed, init_scale=0.5, tensor_scale=0.5)
            rep = grad_check(model, tree, epsilon=1e-5, tolerance=1e-4, l2=1e-3)
            worst = max(worst, rep.max_rel_error)
            assert rep.passed, (seed, rep.worst_parameter, rep.max_rel_error)
        assert worst <= 1e-4


def test_2_forward_oracle():
    with criterion(2, "forward pass equals straight-line recomputation", 5):
        rng = np.random.default_rng(2)
        words = ["a", "b", "c", "d", "thing"]
        for i in range(100):
            model = SentimentModel.random(words, dim=int(rng.integers(2, 6)), seed=i, init_scale=0.8, tensor_scale=0.3)
            tree = random_tree(rng, words + ["unseen"], int(rng.integers(1, 9)))
            got = forward(model, tree).dist
            want = np.array(oracle_forward(model, tree))
            assert np.max(np.abs(got - want)) <= 1e-12


def test_3_metric_arithmetic():
    with criterion(3, "table metrics from confusion counts", 1):
        base = metrics(ConfusionMatrix2.from_counts(168, 110, 43, 192))
        assert base.accuracy == Decimal("70.17")
        assert base.precision[NEG] == Decimal("79.62")
        assert base.recall[NEG] == Decimal("60.43")
        # the printed non-negative cell reads 81.71; 192/235 is 81.70 under any rounding
        assert base.recall[NON] == Decimal("81.70")
        adapted = metrics(ConfusionMatrix2.from_counts(195, 83, 36, 199))
        assert adapted.accuracy == Decimal("76.80")
        assert adapted.recall[NEG] == Decimal("70.14")
        assert adapted.precision[NEG] == Decimal("84.41")


def test_4_substitution_locality(toy_source):
    with criterion(4, "substitution only touches deviated words", 10):
        entries = read_deviations(EXPECTED / "toy_deviations.tsv")
        adapted = substitute_vectors(toy_source, entries)
        deviated = {e.word for e in entries}
        pool = sorted(w for w in toy_source.vocab if w not in deviated)
        rng = np.random.default_rng(4)
        for _ in range(1000):
            tree = random_tree(rng, pool, int(rng.integers(1, 8)))
            a = forward(toy_source, tree.copy()).dist
            b = forward(adapted, tree.copy()).dist
            assert a.tobytes() == b.tobytes()
        flipping = [e for e in entries if model_word_class(toy_source, e.donor) != model_word_class(toy_source, e.word)]
        assert flipping
        for e in flipping:
            for phrase in (e.word, f"the {e.word}", f"evidence is {e.word}"):
                before = classify_phrase(toy_source, phrase).negative_mass
                after = classify_phrase(adapted, phrase).negative_mass
                assert before != after, phrase


def test_5_end_to_end_transfer(tmp_path):
    with criterion(5, "toy transfer pipeline with training", 120):
        proc = subprocess.run(
            [sys.executable, str(ROOT / "scripts" / "run_pipeline.py"), "--data", str(TOY), "--workdir", str(tmp_path)],
            capture_output=True, text=True, cwd=ROOT,
        )
        assert proc.returncode == 0, proc.stderr
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["model"]["accuracy"] > report["baseline"]["accuracy"]

        entries = read_deviations(tmp_path / "deviations.tsv")
        assert len(entries) >= 10
        phrases = [p for p, _ in read_gold_testset(TOY / "legal_testset.tsv")]
        assert report["deviated_coverage"] >= 0.45
        assert report["deviated_coverage"] == sum(
            any(t in {e.word for e in entries} for t in p.split()) for p in phrases
        ) / len(phrases)

        def examples(name):
            lines = (tmp_path / f"examples_{name}.jsonl").read_text().splitlines()
            return {r["text"]: r["two_class"] for r in map(json.loads, lines)}

        src, ad = examples("source"), examples("adapted")
        assert src["evidence is insufficient"] == "nonneg" and ad["evidence is insufficient"] == "neg"
        assert ad["not guilty"] == "nonneg"

        # every test phrase built around an "insufficient"-type adjective flips the same way
        source = load_model(tmp_path / "source_model.json")
        adapted = load_model(tmp_path / "adapted_model.json")
        jj = [e.word for e in entries if e.pos == "JJ" and e.actual_class is NEG]
        probes = [f"the {n} is {w}" for w in jj for n in ("evidence", "claim", "motion")]
        for p in probes:
            assert classify_phrase(source, p).two_class is NON, p
            assert classify_phrase(adapted, p).two_class is NEG, p


def test_6_decision_rule(toy_source):
    with criterion(6, "threshold 1.0 is argmax and lower thresholds only add negatives", 5):
        rng = np.random.default_rng(6)
        raw = rng.dirichlet(np.full(5, 0.7), size=10_000)
        for p in raw:
            assert decide_two_class(p, threshold=1.0)[0] is map_five_to_two(int(np.argmax(p)))

        phrases = [p for p, _ in read_gold_testset(TOY / "legal_testset.tsv")]
        words = sorted(toy_source.vocab)
        while len(phrases) < 500:
            phrases.append(" ".join(rng.choice(words, size=int(rng.integers(1, 6)))))
        dists = [r.five_dist for r in classify_batch(toy_source, phrases[:500])]
        prev = set()
        for t in np.linspace(1.0, 0.0, 41):
            neg = {i for i, d in enumerate(dists) if decide_two_class(d, threshold=float(t))[0] is NEG}
            assert prev <= neg
            prev = neg


EXPECTED_DONORS = {
    "JJ": ("wrong", "natural"),
    "JJR": ("worse", "natural"),
    "JJS": ("worst", "natural"),
    "NN": ("failure", "thing"),
    "NNS": ("politics", "things"),
    "RB": ("insufficiently", "naturally"),
    "RBR": ("insufficiently", "naturally"),
    "RBS": ("insufficiently", "naturally"),
    "VB": ("hate", "do"),
    "VBZ": ("hates", "does"),
    "VBP": ("hate", "do"),
    "VBD": ("hated", "did"),
    "VBN": ("bored", "given"),
    "VBG": ("ignoring", "doing"),
}


def test_7_donor_table():
    with criterion(7, "donor map for every tag and target class", 1):
        table = DonorTable.default()
        assert set(EXPECTED_DONORS) == set(DONOR_TAGS) and len(DONOR_TAGS) == 14
        assert len(table.cells) == 28
        for tag, (neg, non) in EXPECTED_DONORS.items():
            assert donor_word(table, tag, NEG) == neg
            assert donor_word(table, tag, NON) == non
        assert donor_word(table, "JJ", NEG) == "wrong"


def _check_cutoff(tf, coverage):
    sel = select_vocabulary(tf, coverage)
    ranked = tf.ranked()
    total = tf.total_tokens
    k = len(sel.words)
    assert sel.words == [w for w, _ in ranked[:k]]
    target = Fraction(str(coverage))
    assert Fraction(sum(c for _, c in ranked[:k]), total) >= target
    if k > 1:
        assert Fraction(sum(c for _, c in ranked[:k - 1]), total) < target


def test_8_vocabulary_cutoff():
    with criterion(8, "coverage cutoff is sufficient and minimal", 2):
        rng = np.random.default_rng(8)
        for _ in range(1000):
            n = int(rng.integers(1, 40))
            counts = rng.integers(1, 200, size=n)
            tf = TermFrequencyTable({f"t{i}": int(c) for i, c in enumerate(counts)})
            _check_cutoff(tf, float(rng.integers(1, 1001)) / 1000)
        fixture = TermFrequencyTable({"a": 50, "b": 30, "c": 15, "d": 4, "e": 1})
        assert select_vocabulary(fixture, 0.95).words == ["a", "b", "c"]
