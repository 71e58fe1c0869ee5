"""Write the deterministic synthetic benchmark corpus as chart files.

Optionally adds one transposed cover per piece together with a
cliques.csv mapping, which turns the corpus into a ready-made
cover-identification fixture:

    python3 scripts/make_synthetic_corpus.py out/corpus --covers
    python3 -m harmory eval-covers out/corpus out/corpus/cliques.csv
"""

from __future__ import annotations

import argparse
from pathlib import Path

from harmory.evaluation import synthetic_corpus
from harmory.timeline import Timeline, transpose, write_chart


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("out_dir")
    parser.add_argument("--pieces", type=int, default=16)
    parser.add_argument("--beats", type=int, default=256)
    parser.add_argument("--beats-per-event", type=int, default=4)
    parser.add_argument("--covers", action="store_true",
                        help="also write a transposed cover per piece and cliques.csv")
    parser.add_argument("--cover-shift", type=int, default=5,
                        help="semitone shift for covers")
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus = synthetic_corpus(args.pieces, args.beats, args.beats_per_event)
    clique_rows = []
    for index, piece in enumerate(corpus):
        (out / f"{piece.id}.chart").write_text(write_chart(piece))
        if args.covers:
            shifted = transpose(piece, args.cover_shift)
            cover = Timeline(id=f"{piece.id}-cover", events=shifted.events,
                             keys=shifted.keys, title=piece.title, artist=piece.artist)
            (out / f"{cover.id}.chart").write_text(write_chart(cover))
            clique_rows += [(piece.id, f"clique-{index:02d}"),
                            (cover.id, f"clique-{index:02d}")]
    if args.covers:
        lines = ["piece_id,clique_id"] + [f"{p},{c}" for p, c in clique_rows]
        (out / "cliques.csv").write_text("\n".join(lines) + "\n")
    print(f"wrote {args.pieces * (2 if args.covers else 1)} charts to {out}")


if __name__ == "__main__":
    main()
