"""Cover-identification evaluation over a corpus directory.

    python3 scripts/run_cover_eval.py corpus/ corpus/cliques.csv --measure tpsd
"""

from __future__ import annotations

import argparse
from pathlib import Path

from harmory.cli import discover_corpus
from harmory.evaluation import CliqueSet, evaluate_covers


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("corpus")
    parser.add_argument("cliques")
    parser.add_argument("--measure", default="dtw")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--json", action="store_true", help="JSON instead of table")
    args = parser.parse_args()

    corpus = discover_corpus(Path(args.corpus))
    cliques = CliqueSet.from_csv(Path(args.cliques).read_text())
    metrics = evaluate_covers(corpus, cliques, measure=args.measure,
                              workers=args.workers)
    print(metrics.to_json() if args.json else metrics.to_table(), end="")


if __name__ == "__main__":
    main()
