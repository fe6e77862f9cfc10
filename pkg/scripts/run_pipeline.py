#!/usr/bin/env python3
"""Run the whole transfer pipeline on the toy domain through the CLI.

    python scripts/run_pipeline.py --data fixtures/toy --workdir out/

Steps: train a source model (unless --source-model is given), build the
target vocabulary, list deviations, adapt, classify a few example phrases
with both models and write the comparison report.
"""

import argparse
import sys
from pathlib import Path

from lexsent.cli import main as lexsent

EXAMPLES = [
    "evidence is insufficient",
    "the defendant was charged",
    "the court dismissed the appeal",
    "not guilty",
]

TRAIN_FLAGS = ["--dim", "10", "--epochs", "30", "--learning-rate", "0.05", "--seed", "0"]


def run(argv):
    code = lexsent(argv)
    if code != 0:
        sys.exit(f"step failed ({code}): lexsent {' '.join(argv)}")


def pipeline(data: Path, work: Path, source_model=None, threads: int = 1) -> Path:
    work.mkdir(parents=True, exist_ok=True)
    src = work / "source_model.json"
    if source_model:
        src = Path(source_model)
    else:
        run(["train-toy", str(data / "source_treebank.txt"), "-o", str(src), *TRAIN_FLAGS])
    run(["vocab", str(data / "legal_corpus"), "-o", str(work / "vocab.tsv")])
    run([
        "deviations", "--model", str(src), "--vocab", str(work / "vocab.tsv"),
        "--annotations", str(data / "legal_annotations.tsv"), "--tags", str(data / "legal_tags.tsv"),
        "--skipped", str(work / "skipped.tsv"), "-o", str(work / "deviations.tsv"),
    ])
    run(["adapt", "--model", str(src), "--deviations", str(work / "deviations.tsv"),
         "-o", str(work / "adapted_model.json")])
    for name, model in (("source", src), ("adapted", work / "adapted_model.json")):
        run(["classify", "--model", str(model), "-o", str(work / f"examples_{name}.jsonl"), *EXAMPLES])
    run([
        "eval", "--model", str(work / "adapted_model.json"), "--baseline", str(src),
        "--testset", str(data / "legal_testset.tsv"), "--deviations", str(work / "deviations.tsv"),
        "--threads", str(threads), "-o", str(work / "report.txt"), "--json", str(work / "report.json"),
    ])
    return work / "report.txt"


def cli():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--data", default="fixtures/toy", type=Path)
    ap.add_argument("--workdir", default="pipeline_out", type=Path)
    ap.add_argument("--source-model", help="skip training and use this model")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    report = pipeline(args.data, args.workdir, args.source_model, args.threads)
    sys.stdout.write(report.read_text(encoding="utf-8"))


if __name__ == "__main__":
    cli()
