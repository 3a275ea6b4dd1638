#!/usr/bin/env python3
"""End-to-end demo on a synthetic corpus.

Generates a block-structured trace corpus, runs the partition pipeline on
it, and prints the human-readable report plus the artifact listing.

    python3 scripts/demo.py --classes 24 --use-cases 4 --out /tmp/demo
"""

from __future__ import annotations

import argparse
from pathlib import Path

from tracepart import synth
from tracepart.pipeline import run_partition


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--classes", type=int, default=24, help="number of classes")
    parser.add_argument("--use-cases", type=int, default=4, help="number of use cases")
    parser.add_argument("--walks", type=int, default=6, help="random walks per use case")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--n", type=int, default=None, help="target partition count")
    parser.add_argument("--sweep", action="store_true", help="emit a report per sweep size")
    parser.add_argument("--out", type=Path, default=Path("demo-out"))
    args = parser.parse_args()

    corpus_dir = args.out / "corpus"
    spec = synth.block_corpus(
        num_classes=args.classes,
        num_use_cases=args.use_cases,
        walks_per_use_case=args.walks,
        seed=args.seed,
    )
    manifest = synth.write_corpus(corpus_dir, spec)
    print(f"corpus: {sum(len(p) for p in spec.values())} paths, "
          f"{synth.distinct_path_edges(spec)} distinct edges -> {corpus_dir}")

    run_dir = args.out / "run"
    written = run_partition(manifest, run_dir, n=args.n, sweep=args.sweep)
    print(f"artifacts in {run_dir}:")
    for path in sorted(run_dir.iterdir()):
        print(f"  {path.name}")
    print()
    print((written[-1].with_suffix(".txt")).read_text(encoding="utf-8"))
    print(f"refine interactively:  tracepart serve --out {run_dir} --port 8000"
          + (f" --n {args.n}" if args.sweep else ""))


if __name__ == "__main__":
    main()
