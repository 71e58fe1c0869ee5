"""Command-line interface.

Exit codes: 0 on success, 2 on usage or input errors, 1 on unexpected
internal errors.  All file outputs are written atomically and are
byte-identical for identical inputs and flags (timings in ``bench``
reports excepted).  Output formats are documented in docs/formats.md.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from harmory.evaluation import (
    CliqueError,
    CliqueSet,
    benchmark_measures,
    evaluate_covers,
    synthetic_corpus,
)
from harmory.harte import HarteError, parse_chord, render_chord, bass_pitch_class, pitch_class_set
from harmory.memory import (
    EmptyCorpusError,
    EmptyQueryError,
    GraphFormatError,
    PatternQuery,
    build_memory,
    export_json,
    export_ntriples,
    graph_stats,
    import_ntriples,
    query_similar,
)
from harmory.segmentation import (
    KernelTooLargeError,
    SegmentationParams,
    boundaries_to_csv,
    build_ssm,
    novelty,
    novelty_to_csv,
    pick_boundaries,
    segment_timeline,
    ssm_to_pgm,
)
from harmory.similarity import MEASURES, corpus_similarity_matrix, matrix_to_csv
from harmory.timeline import (
    EmptyTimelineError,
    SchemaError,
    Timeline,
    encode_tps,
    estimate_key,
    load_chart,
    load_jams,
)
from harmory.tps import Key, chord_distance

USAGE_ERRORS = (HarteError, SchemaError, EmptyTimelineError, KernelTooLargeError,
                CliqueError, EmptyCorpusError, EmptyQueryError, GraphFormatError,
                FileNotFoundError, NotADirectoryError, ValueError)


def write_atomic(path: Path, data: str | bytes) -> None:
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, mode) as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def load_piece(path: Path) -> Timeline:
    name = path.name
    if name.endswith(".jams.json"):
        return load_jams(path.read_text(), fallback_id=name[:-len(".jams.json")])
    if name.endswith(".chart"):
        return load_chart(path.read_text(), piece_id=name[:-len(".chart")])
    raise SchemaError(f"{path}: expected a .jams.json or .chart file")


def discover_corpus(root: Path) -> list[Timeline]:
    """Load all *.jams.json and *.chart files under a directory, sorted
    by path; piece ids are the extension-free relative paths."""
    if not root.is_dir():
        raise NotADirectoryError(f"not a corpus directory: {root}")
    corpus = []
    paths = sorted(p for p in root.rglob("*")
                   if p.name.endswith(".jams.json") or p.name.endswith(".chart"))
    for path in paths:
        relative = path.relative_to(root).as_posix()
        stem = relative[:-len(".jams.json")] if relative.endswith(".jams.json") \
            else relative[:-len(".chart")]
        text = path.read_text()
        corpus.append(load_jams(text, fallback_id=stem) if path.name.endswith(".jams.json")
                      else load_chart(text, piece_id=stem))
    if not corpus:
        raise EmptyCorpusError(f"no .jams.json or .chart files under {root}")
    return corpus


def _seg_params(args) -> SegmentationParams:
    return SegmentationParams(kernel_size=args.kernel_size, taper=args.taper,
                              peak_lambda=args.peak_lambda, min_gap=args.min_gap,
                              min_len=args.min_len)


def _add_seg_arguments(parser) -> None:
    defaults = SegmentationParams()
    parser.add_argument("--kernel-size", type=int, default=defaults.kernel_size)
    parser.add_argument("--taper", type=float, default=defaults.taper)
    parser.add_argument("--peak-lambda", type=float, default=defaults.peak_lambda)
    parser.add_argument("--min-gap", type=int, default=defaults.min_gap)
    parser.add_argument("--min-len", type=int, default=defaults.min_len)


def _measure_params(args) -> dict:
    if args.measure == "dtw":
        return {"scale": args.scale, "band": args.band}
    if args.measure == "tpsd":
        return {"scale": args.scale}
    return {"tau": args.tau, "n_min": args.n_min, "n_max": args.n_max}


def _add_measure_arguments(parser) -> None:
    parser.add_argument("--measure", choices=sorted(MEASURES), default="dtw")
    parser.add_argument("--scale", type=float, default=5.0)
    parser.add_argument("--band", type=int, default=None,
                        help="Sakoe-Chiba band width for dtw")
    parser.add_argument("--tau", type=float, default=1.0,
                        help="lharp pattern agreement threshold")
    parser.add_argument("--n-min", type=int, default=2)
    parser.add_argument("--n-max", type=int, default=4)


def cmd_parse(args) -> int:
    chord = parse_chord(args.chord)
    if chord.is_nochord:
        payload = {"kind": "nochord"}
    else:
        payload = {
            "kind": "sounded",
            "root": str(chord.root),
            "shorthand": chord.shorthand,
            "degrees": sorted(str(d) for d in sorted(chord.degrees, key=lambda d: d.sort_key())),
            "bass": str(chord.bass) if chord.bass else None,
            "pitch_classes": sorted(pitch_class_set(chord)),
            "bass_pitch_class": bass_pitch_class(chord),
            "canonical": render_chord(chord),
        }
    print(json.dumps(payload, indent=2))
    return 0


def cmd_dist(args) -> int:
    a, b = parse_chord(args.chord_a), parse_chord(args.chord_b)
    if args.key:
        key = Key.from_string(args.key)
        note = None
    else:
        key = estimate_key([a, b])
        note = f"note: no --key given, estimated {key}"
    value = chord_distance(a, key, b, key)
    print(int(value) if value == int(value) else value)
    if note and not args.quiet:
        print(note)
    return 0


def cmd_encode(args) -> int:
    timeline = load_piece(Path(args.piece))
    series = encode_tps(timeline, args.grid)
    lines = ["value,weight"]
    lines += [f"{float(v)!r},{w.numerator if w.denominator == 1 else w}"
              for v, w in series.values]
    text = "\n".join(lines) + "\n"
    if args.out:
        write_atomic(Path(args.out), text)
    else:
        print(text, end="")
    return 0


def cmd_segment(args) -> int:
    timeline = load_piece(Path(args.piece))
    params = _seg_params(args)
    ssm = build_ssm(timeline)
    kernel_size = min(params.kernel_size, 2 * ssm.size)
    if ssm.size == 1:
        boundaries = []
        curve = None
    else:
        curve = novelty(ssm, kernel_size, params.taper)
        boundaries = pick_boundaries(curve, params.peak_lambda, params.min_gap)
    segments = segment_timeline(timeline, params)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = timeline.id.replace("/", "_")
    write_atomic(out_dir / f"{stem}.ssm.pgm", ssm_to_pgm(ssm))
    if curve is not None:
        write_atomic(out_dir / f"{stem}.novelty.csv", novelty_to_csv(curve))
    write_atomic(out_dir / f"{stem}.boundaries.csv", boundaries_to_csv(boundaries))
    payload = {
        "piece": timeline.id,
        "params": {"kernel_size": kernel_size, "taper": params.taper,
                   "peak_lambda": params.peak_lambda, "min_gap": params.min_gap,
                   "min_len": params.min_len},
        "boundaries": boundaries,
        "segments": [{"id": s.id, "start_event": s.start_event, "end_event": s.end_event,
                      "chords": " ".join(render_chord(c) for c in s.chords)}
                     for s in segments],
    }
    text = json.dumps(payload, indent=2) + "\n"
    write_atomic(out_dir / f"{stem}.segments.json", text)
    if not args.quiet:
        print(text, end="")
    return 0


def cmd_sim(args) -> int:
    a = load_piece(Path(args.piece_a))
    b = load_piece(Path(args.piece_b))
    report = MEASURES[args.measure](a, b, **_measure_params(args))
    print(report.to_json(), end="")
    return 0


def cmd_build_graph(args) -> int:
    corpus = discover_corpus(Path(args.corpus))
    graph = build_memory(corpus, _seg_params(args), theta_sim=args.theta_sim,
                         theta_merge=args.theta_merge, workers=args.workers)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_atomic(out_dir / "memory.nt", export_ntriples(graph))
    write_atomic(out_dir / "memory.json", export_json(graph))
    stats = json.dumps(graph_stats(graph), indent=2) + "\n"
    write_atomic(out_dir / "stats.json", stats)
    if not args.quiet:
        print(stats, end="")
    return 0


def cmd_query(args) -> int:
    graph = import_ntriples(Path(args.graph).read_bytes())
    chords = tuple(parse_chord(token) for token in args.progression.split())
    key = Key.from_string(args.key) if args.key else None
    results = query_similar(graph, PatternQuery(chords=chords, key=key, k=args.k))
    payload = [{"pattern": pattern_id, "score": score, "chords": chords_text}
               for pattern_id, score, chords_text in results]
    print(json.dumps(payload, indent=2))
    return 0


def cmd_eval_covers(args) -> int:
    corpus = discover_corpus(Path(args.corpus))
    cliques = CliqueSet.from_csv(Path(args.cliques).read_text())
    metrics = evaluate_covers(corpus, cliques, measure=args.measure,
                              params=_measure_params(args), workers=args.workers)
    print(metrics.to_table() if args.format == "table" else metrics.to_json(), end="")
    return 0


def cmd_bench(args) -> int:
    if args.synthetic:
        corpus = synthetic_corpus(args.synthetic_pieces, args.synthetic_beats)
    else:
        if not args.corpus:
            raise ValueError("bench needs a corpus directory or --synthetic")
        corpus = discover_corpus(Path(args.corpus))
    report = benchmark_measures(corpus, measures=tuple(args.measures.split(",")),
                                repetitions=args.repetitions)
    print(json.dumps(report, indent=2))
    return 0


def cmd_matrix(args) -> int:
    corpus = discover_corpus(Path(args.corpus))
    ids, matrix = corpus_similarity_matrix(corpus, args.measure,
                                           _measure_params(args), workers=args.workers)
    text = matrix_to_csv(ids, matrix)
    if args.out:
        write_atomic(Path(args.out), text)
    else:
        print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="harmory",
        description="Symbolic harmonic similarity and the harmonic memory graph.")
    parser.add_argument("--quiet", action="store_true", help="suppress notes and warnings")
    parser.add_argument("--out-dir", default=".", help="directory for file outputs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a chord symbol to JSON")
    p.add_argument("chord")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("dist", help="Tonal Pitch Space distance between two chords")
    p.add_argument("chord_a")
    p.add_argument("chord_b")
    p.add_argument("--key", help="governing key, e.g. C:maj (estimated when omitted)")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("encode", help="encode a piece as a TPS series CSV")
    p.add_argument("piece")
    p.add_argument("--grid", choices=("event", "beat"), default="event")
    p.add_argument("--out")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("segment", help="segment a piece; writes SSM/novelty/boundaries")
    p.add_argument("piece")
    _add_seg_arguments(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("sim", help="similarity report for two pieces")
    p.add_argument("piece_a")
    p.add_argument("piece_b")
    _add_measure_arguments(p)
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("matrix", help="pairwise similarity matrix CSV for a corpus")
    p.add_argument("corpus")
    _add_measure_arguments(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("build", help="build the harmonic memory graph from a corpus")
    p.add_argument("corpus")
    _add_seg_arguments(p)
    p.add_argument("--theta-sim", type=float, default=0.6)
    p.add_argument("--theta-merge", type=float, default=0.9)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_build_graph)

    p = sub.add_parser("query", help="query a memory graph with a chord progression")
    p.add_argument("graph", help="path to an exported .nt graph")
    p.add_argument("progression", help="space-separated chord symbols")
    p.add_argument("--key", help="query key, e.g. C:maj (estimated when omitted)")
    p.add_argument("-k", type=int, default=5)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("eval-covers", help="cover-identification metrics for a corpus")
    p.add_argument("corpus")
    p.add_argument("cliques", help="CSV with header piece_id,clique_id")
    _add_measure_arguments(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=cmd_eval_covers)

    p = sub.add_parser("bench", help="wall-clock and comparison-count benchmark")
    p.add_argument("corpus", nargs="?")
    p.add_argument("--measures", default="dtw,tpsd")
    p.add_argument("--repetitions", type=int, default=5)
    p.add_argument("--synthetic", action="store_true",
                   help="benchmark the built-in synthetic corpus")
    p.add_argument("--synthetic-pieces", type=int, default=16)
    p.add_argument("--synthetic-beats", type=int, default=256)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return int(exit_.code or 0)
    logging.basicConfig(format="%(message)s",
                        level=logging.ERROR if args.quiet else logging.WARNING)
    try:
        return args.func(args)
    except USAGE_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # pragma: no cover - defensive
        print(f"internal error: {err}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
