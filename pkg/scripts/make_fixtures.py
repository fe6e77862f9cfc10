#!/usr/bin/env python3
"""Regenerate the toy domain under fixtures/toy and the pipeline goldens under fixtures/expected.

The hand-written tiny fixtures (fixtures/tiny and fixtures/expected/tiny_*)
are not touched.
"""

import argparse
import shutil
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from run_pipeline import pipeline  # noqa: E402

from lexsent.toydata import write_toy_domain  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--root", default=Path(__file__).resolve().parent.parent / "fixtures", type=Path)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    toy = args.root / "toy"
    if toy.exists():
        shutil.rmtree(toy)
    write_toy_domain(toy, seed=args.seed)

    expected = args.root / "expected"
    expected.mkdir(exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        work = Path(tmp)
        pipeline(toy, work)
        shutil.copy(work / "source_model.json", toy / "source_model.json")
        for name in ("vocab.tsv", "deviations.tsv", "skipped.tsv", "report.txt", "report.json",
                     "examples_source.jsonl", "examples_adapted.jsonl"):
            shutil.copy(work / name, expected / f"toy_{name}")
    print(f"fixtures written under {args.root}")


if __name__ == "__main__":
    main()
