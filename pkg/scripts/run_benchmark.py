"""Benchmark similarity measures on the synthetic corpus or a corpus
directory and print the JSON report.

    python3 scripts/run_benchmark.py --pieces 16 --beats 256
    python3 scripts/run_benchmark.py --corpus path/to/charts
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from harmory.cli import discover_corpus
from harmory.evaluation import benchmark_measures, synthetic_corpus


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--corpus", help="chart/JAMS directory (default: synthetic)")
    parser.add_argument("--pieces", type=int, default=16)
    parser.add_argument("--beats", type=int, default=256)
    parser.add_argument("--measures", default="dtw,tpsd")
    parser.add_argument("--repetitions", type=int, default=5)
    args = parser.parse_args()

    corpus = (discover_corpus(Path(args.corpus)) if args.corpus
              else synthetic_corpus(args.pieces, args.beats))
    report = benchmark_measures(corpus, measures=tuple(args.measures.split(",")),
                                repetitions=args.repetitions)
    print(json.dumps(report, indent=2))
    for name, stats in report["measures"].items():
        per_pair = stats["median_seconds_per_pair"] * 1e3
        print(f"# {name}: {per_pair:.3f} ms/pair, "
              f"{stats['comparisons_total']} comparisons")


if __name__ == "__main__":
    main()
