"""Command-line entry point: ``lexsent <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .adapt import (
    DonorTable,
    detect_deviations,
    read_deviations,
    substitute_vectors,
    write_deviations,
    write_skipped,
)
from .annotate import gold_map, load_annotations, read_gold_testset
from .classify import ClassifyOptions, classify_batch, render_trace, to_jsonl
from .errors import LexsentError
from .evaluate import (
    Rounding,
    compare_models,
    comparison_json,
    evaluate,
    render_comparison,
    render_confusion,
)
from .model import OOVPolicy, SentimentModel, load_model, save_model
from .tagger import pos_tag, read_word_tags
from .trainer import TrainConfig, check_label_coverage, grad_check, read_treebank, train
from .trees import SentimentTree, read_tree
from .vocab import CutoffMode, count_terms, load_stoplist, read_vocab, select_vocabulary, write_vocab

log = logging.getLogger("lexsent")


class CLIError(Exception):
    pass


def _existing(path: str, what: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise CLIError(f"{what} not found: {path}")
    return p


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _classify_options(args, threshold=None) -> ClassifyOptions:
    return ClassifyOptions(
        threshold=args.threshold if threshold is None else threshold,
        mass_mode=args.mass_mode,
        input_format=getattr(args, "format", "text"),
    )


# -- subcommands ---------------------------------------------------------------

def cmd_vocab(args) -> int:
    corpus = _existing(args.corpus, "corpus")
    stoplist = load_stoplist(args.stoplist)
    tf = count_terms(corpus, stoplist)
    sel = select_vocabulary(tf, args.coverage, args.cutoff_mode)
    if args.output:
        write_vocab(sel, args.output)
    else:
        for w, c, m in zip(sel.words, sel.counts, sel.cumulative()):
            sys.stdout.write(f"{w}\t{c}\t{m:.6f}\n")
    log.info("%d of %d words, mass %.4f", len(sel.words), len(tf), sel.cumulative_mass)
    return 0


def cmd_deviations(args) -> int:
    model = load_model(_existing(args.model, "model"))
    vocab = read_vocab(_existing(args.vocab, "vocabulary"))
    gold = gold_map(load_annotations(_existing(args.annotations, "annotations")))
    if args.tags:
        tags = read_word_tags(_existing(args.tags, "tag file"))
    else:
        tags = {w: t for w, t in zip(vocab, pos_tag(vocab))} if vocab else {}
    table = DonorTable.from_override(_existing(args.donor_table, "donor table")) if args.donor_table else None
    report = detect_deviations(vocab, model, gold, tags, table)
    write_deviations(report.entries, args.output)
    if args.skipped:
        write_skipped(report.skipped, args.skipped)
    for word, tag in report.skipped:
        print(f"skipped {word!r}: no donor for tag {tag}", file=sys.stderr)
    log.info("%d deviations, %d skipped", len(report), len(report.skipped))
    return 0


def cmd_adapt(args) -> int:
    model = load_model(_existing(args.model, "model"))
    entries = read_deviations(_existing(args.deviations, "deviation list"))
    save_model(substitute_vectors(model, entries), args.output)
    return 0


def _read_phrases(path) -> list[str]:
    return [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]


def cmd_classify(args) -> int:
    model = load_model(_existing(args.model, "model"))
    phrases = list(args.phrase or [])
    if args.input:
        phrases += _read_phrases(_existing(args.input, "phrase file"))
    if not phrases:
        raise CLIError("no phrases given")
    options = _classify_options(args)
    results = classify_batch(model, phrases, options, args.threads)
    if args.trace:
        _emit("".join(f"# {r.text}\n" + render_trace(r.tree, options) for r in results), args.output)
    else:
        _emit(to_jsonl(results), args.output)
    return 0


def cmd_train_toy(args) -> int:
    trees = read_treebank(_existing(args.treebank, "treebank"))
    missing = check_label_coverage(trees)
    if missing:
        log.warning("classes never used as gold labels: %s", sorted(missing))
    config = TrainConfig(
        dim=args.dim,
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        l2=args.l2,
        batch_size=args.batch_size,
        seed=args.seed,
        init_scale=args.init_scale,
        oov_policy=args.oov_policy,
    )
    history = []
    model = train(trees, config, history)
    save_model(model, args.output)
    log.info("mean node loss %.5f -> %.5f", history[0], history[-1])
    return 0


def cmd_eval(args) -> int:
    model = load_model(_existing(args.model, "model"))
    testset = read_gold_testset(_existing(args.testset, "test set"))
    rounding = Rounding(args.rounding)
    if args.baseline:
        baseline = load_model(_existing(args.baseline, "baseline model"))
        deviated = [e.word for e in read_deviations(_existing(args.deviations, "deviation list"))] if args.deviations else []
        base_threshold = args.threshold if args.baseline_threshold is None else args.baseline_threshold
        cmp = compare_models(
            baseline,
            model,
            testset,
            deviated,
            options_a=_classify_options(args, base_threshold),
            options_b=_classify_options(args),
            rounding=rounding,
            threads=args.threads,
        )
        text = render_comparison(cmp, ("baseline", "model"))
        doc = comparison_json(cmp, ("baseline", "model"))
    else:
        ev = evaluate(model, testset, _classify_options(args), rounding, args.threads)
        text = render_confusion(ev.report, "[model]")
        doc = {"model": ev.report.to_json()}
    _emit(text, args.output)
    if args.json:
        Path(args.json).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return 0


def _random_labelled_tree(rng, n_leaves: int) -> SentimentTree:
    words = [f"w{i}" for i in range(n_leaves)]
    units = [SentimentTree.leaf(w) for w in words]
    while len(units) > 1:
        i = int(rng.integers(len(units) - 1))
        units[i:i + 2] = [SentimentTree.node(units[i], units[i + 1])]
    tree = units[0]
    for node in tree.nodes():
        node.label = int(rng.integers(5))
    return tree


def cmd_grad_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.model:
        model = load_model(_existing(args.model, "model"))
        if not args.tree:
            raise CLIError("--tree is required with --model")
    if args.tree:
        tree = read_tree(args.tree)
    else:
        tree = _random_labelled_tree(rng, args.leaves)
    if not args.model:
        model = SentimentModel.random(
            tree.tokens + ["thing"], dim=args.dim, seed=args.seed, init_scale=0.5, tensor_scale=0.5
        )
    report = grad_check(model, tree, args.epsilon, args.tolerance, args.l2)
    status = "PASS" if report.passed else "FAIL"
    print(f"{status} max_rel_error={report.max_rel_error:.3e} worst={report.worst_parameter} tolerance={report.tolerance:g}")
    return 0 if report.passed else 1


# -- parser --------------------------------------------------------------------

def _add_decision_flags(p):
    p.add_argument("--threshold", type=float, default=0.4, help="negative-score threshold (default 0.4)")
    p.add_argument("--mass-mode", choices=["combined", "negative-only"], default="combined")
    p.add_argument("--threads", type=int, default=1, help="worker threads; 1 is bit-reproducible")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lexsent", description="RNTN sentiment classifier with donor-vector domain adaptation.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("vocab", help="frequency-ranked vocabulary from a raw corpus")
    p.add_argument("corpus", help=".txt file or directory of .txt files")
    p.add_argument("--stoplist", help="stop-list file (default: $LEXSENT_STOPLIST or the bundled list)")
    p.add_argument("--coverage", type=float, default=0.95)
    p.add_argument("--cutoff-mode", choices=[m.value for m in CutoffMode], default="mass")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_vocab)

    p = sub.add_parser("deviations", help="list words whose model class disagrees with annotators")
    p.add_argument("--model", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--tags", help="token<TAB>tag sidecar; built-in tagger if omitted")
    p.add_argument("--donor-table", help="pos<TAB>target_class<TAB>donor overrides")
    p.add_argument("--skipped", help="write words with no donor row here")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_deviations)

    p = sub.add_parser("adapt", help="substitute donor vectors for deviated words")
    p.add_argument("--model", required=True)
    p.add_argument("--deviations", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_adapt)

    p = sub.add_parser("classify", help="two-class labels for phrases (JSON lines)")
    p.add_argument("--model", required=True)
    p.add_argument("--input", "-i", help="one phrase per line")
    p.add_argument("phrase", nargs="*", help="phrases given inline")
    p.add_argument("--format", choices=["text", "sexpr"], default="text")
    p.add_argument("--trace", action="store_true", help="print per-node trees instead of JSON")
    p.add_argument("-o", "--output")
    _add_decision_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("train-toy", help="train a small source model on a labelled treebank")
    p.add_argument("treebank")
    p.add_argument("-o", "--output", required=True)
    defaults = TrainConfig()
    p.add_argument("--dim", type=int, default=defaults.dim)
    p.add_argument("--epochs", type=int, default=defaults.epochs)
    p.add_argument("--learning-rate", type=float, default=defaults.learning_rate)
    p.add_argument("--l2", type=float, default=defaults.l2)
    p.add_argument("--batch-size", type=int, default=defaults.batch_size)
    p.add_argument("--init-scale", type=float, default=defaults.init_scale)
    p.add_argument("--oov-policy", choices=[o.value for o in OOVPolicy], default=defaults.oov_policy.value)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train_toy)

    p = sub.add_parser("eval", help="confusion matrix and metrics on a gold phrase set")
    p.add_argument("--model", required=True)
    p.add_argument("--baseline", help="second model to compare against (e.g. the source model)")
    p.add_argument("--testset", required=True)
    p.add_argument("--deviations", help="deviation list, for the deviated-coverage statistic")
    p.add_argument("--baseline-threshold", type=float, help="threshold for the baseline (default: --threshold)")
    p.add_argument("--format", choices=["text", "sexpr"], default="text")
    p.add_argument("--rounding", choices=[r.value for r in Rounding], default="truncate")
    p.add_argument("--json", help="also write a JSON report here")
    p.add_argument("-o", "--output")
    _add_decision_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("grad-check", help="compare analytic and finite-difference gradients")
    p.add_argument("--model")
    p.add_argument("--tree", help="labelled s-expression; random if omitted")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--leaves", type=int, default=5)
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.add_argument("--l2", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_grad_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (CLIError, LexsentError, OSError, ValueError) as exc:
        print(f"lexsent {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
