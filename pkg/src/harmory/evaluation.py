"""Cover-identification evaluation and measure benchmarking.

Cliques of covers come from a CSV with header ``piece_id,clique_id``.
Every piece in a clique of size two or more queries the rest of the
corpus; candidates are ranked by similarity score (ties by piece id) and
scored with mean average precision, precision at 1, and the mean rank of
the first relevant candidate.
"""

from __future__ import annotations

import csv
import io
import json
import random
import statistics
import time
from dataclasses import dataclass
from fractions import Fraction

from harmory.harte import Chord, Degree, natural_for_pitch_class
from harmory.similarity import MEASURES, corpus_similarity_matrix
from harmory.timeline import ChordEvent, KeySpan, Timeline, build_timeline, encode_tps
from harmory.tps import Key


class CliqueError(ValueError):
    """Missing or unusable clique assignments."""


@dataclass(frozen=True)
class CliqueSet:
    mapping: dict[str, str]

    @classmethod
    def from_csv(cls, text: str) -> "CliqueSet":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise CliqueError("empty clique file") from None
        if header != ["piece_id", "clique_id"]:
            raise CliqueError("clique CSV must start with header 'piece_id,clique_id'")
        mapping = {}
        for row in reader:
            if not row:
                continue
            if len(row) != 2:
                raise CliqueError(f"bad clique row: {row!r}")
            mapping[row[0]] = row[1]
        return cls(mapping)

    def clique_of(self, piece_id: str) -> str:
        if piece_id not in self.mapping:
            raise CliqueError(f"piece without clique: {piece_id}")
        return self.mapping[piece_id]

    def sizes(self) -> dict[str, int]:
        sizes: dict[str, int] = {}
        for clique in self.mapping.values():
            sizes[clique] = sizes.get(clique, 0) + 1
        return sizes


@dataclass(frozen=True)
class QueryResult:
    query_id: str
    average_precision: float
    first_relevant_rank: int
    top_hit: str
    top_relevant: bool


@dataclass(frozen=True)
class RankingMetrics:
    measure: str
    mean_average_precision: float
    precision_at_1: float
    mean_rank_first_relevant: float
    queries: tuple[QueryResult, ...]

    def to_json(self) -> str:
        payload = {
            "measure": self.measure,
            "mean_average_precision": self.mean_average_precision,
            "precision_at_1": self.precision_at_1,
            "mean_rank_first_relevant": self.mean_rank_first_relevant,
            "queries": [
                {"query_id": q.query_id, "average_precision": q.average_precision,
                 "first_relevant_rank": q.first_relevant_rank, "top_hit": q.top_hit,
                 "top_relevant": q.top_relevant}
                for q in self.queries],
        }
        return json.dumps(payload, indent=2) + "\n"

    def to_table(self) -> str:
        rows = [("query", "AP", "first-rank", "top hit")]
        rows += [(q.query_id, f"{q.average_precision:.4f}",
                  str(q.first_relevant_rank), q.top_hit) for q in self.queries]
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
                 for row in rows]
        lines.append("")
        lines.append(f"measure: {self.measure}")
        lines.append(f"MAP: {self.mean_average_precision:.4f}  "
                     f"P@1: {self.precision_at_1:.4f}  "
                     f"mean first-relevant rank: {self.mean_rank_first_relevant:.4f}")
        return "\n".join(lines) + "\n"


def evaluate_covers(corpus: list[Timeline], cliques: CliqueSet, measure: str = "dtw",
                    params: dict | None = None, workers: int = 1) -> RankingMetrics:
    """Rank every clique member's covers among all other pieces."""
    ids = [tl.id for tl in corpus]
    for piece_id in ids:
        cliques.clique_of(piece_id)
    sizes: dict[str, int] = {}
    for piece_id in ids:
        clique = cliques.clique_of(piece_id)
        sizes[clique] = sizes.get(clique, 0) + 1
    queries = [piece_id for piece_id in ids if sizes[cliques.clique_of(piece_id)] >= 2]
    if not queries:
        raise CliqueError("no clique of size >= 2 in the corpus")
    matrix_ids, matrix = corpus_similarity_matrix(corpus, measure, params, workers)
    index = {piece_id: i for i, piece_id in enumerate(matrix_ids)}
    results = []
    for query_id in sorted(queries):
        qi = index[query_id]
        candidates = sorted((c for c in ids if c != query_id),
                            key=lambda c: (-matrix[qi, index[c]], c))
        relevant = {c for c in candidates
                    if cliques.clique_of(c) == cliques.clique_of(query_id)}
        hits = 0
        precision_sum = 0.0
        first_rank = 0
        for rank, candidate in enumerate(candidates, 1):
            if candidate in relevant:
                hits += 1
                precision_sum += hits / rank
                if first_rank == 0:
                    first_rank = rank
        results.append(QueryResult(
            query_id=query_id,
            average_precision=precision_sum / len(relevant),
            first_relevant_rank=first_rank,
            top_hit=candidates[0],
            top_relevant=candidates[0] in relevant,
        ))
    return RankingMetrics(
        measure=measure,
        mean_average_precision=sum(r.average_precision for r in results) / len(results),
        precision_at_1=sum(r.top_relevant for r in results) / len(results),
        mean_rank_first_relevant=sum(r.first_relevant_rank for r in results) / len(results),
        queries=tuple(results),
    )


def comparison_counts(a: Timeline, b: Timeline, measure: str) -> int:
    """Exact number of elementary comparisons a measure performs."""
    if measure == "dtw":
        return len(a.sounded()) * len(b.sounded())
    if measure == "tpsd":
        la = len(encode_tps(a, "beat").values)
        lb = len(encode_tps(b, "beat").values)
        return la * lb
    raise ValueError(f"no comparison count model for measure {measure!r}")


def benchmark_measures(corpus: list[Timeline], measures=("dtw", "tpsd"),
                       repetitions: int = 5, params: dict | None = None) -> dict:
    """Median wall-clock per pair over >= 3 repetitions of the full
    pairwise matrix, plus exact per-pair comparison counts."""
    if repetitions < 3:
        raise ValueError(f"need at least 3 repetitions: {repetitions}")
    if len(corpus) < 2:
        raise ValueError("benchmark needs at least two pieces")
    pairs = [(i, j) for i in range(len(corpus)) for j in range(i + 1, len(corpus))]
    report: dict = {"pieces": len(corpus), "pairs": len(pairs),
                    "repetitions": repetitions, "measures": {}}
    for measure in measures:
        if measure not in MEASURES:
            raise ValueError(f"unknown measure {measure!r}")
        func = MEASURES[measure]
        kwargs = params or {}
        timings = []
        for _ in range(repetitions):
            begin = time.perf_counter()
            for i, j in pairs:
                func(corpus[i], corpus[j], **kwargs)
            timings.append(time.perf_counter() - begin)
        counts = [[corpus[i].id, corpus[j].id, comparison_counts(corpus[i], corpus[j], measure)]
                  for i, j in pairs]
        report["measures"][measure] = {
            "median_seconds_per_pair": statistics.median(timings) / len(pairs),
            "seconds_total_min": min(timings),
            "seconds_total_median": statistics.median(timings),
            "seconds_total_max": max(timings),
            "comparisons_total": sum(row[2] for row in counts),
            "comparisons_per_pair": counts,
        }
    return report


# Diatonic triads on each scale degree, used by the synthetic generator.
_TRIAD_QUALITIES = {
    "major": ("maj", "min", "min", "maj", "maj", "min", "dim"),
    "minor": ("min", "dim", "aug", "min", "maj", "maj", "dim"),
}


def diatonic_triad(key: Key, degree: int) -> Chord:
    """Triad on the given scale degree (0-based) of the key."""
    from harmory.tps import MAJOR_STEPS, MINOR_STEPS

    steps = MAJOR_STEPS if key.mode == "major" else MINOR_STEPS
    root = (key.tonic + steps[degree % 7]) % 12
    quality = _TRIAD_QUALITIES[key.mode][degree % 7]
    thirds = {"maj": (Degree(1), Degree(3), Degree(5)),
              "min": (Degree(1), Degree(3, -1), Degree(5)),
              "dim": (Degree(1), Degree(3, -1), Degree(5, -1)),
              "aug": (Degree(1), Degree(3), Degree(5, 1))}
    return Chord(root=natural_for_pitch_class(root),
                 degrees=frozenset(thirds[quality]), shorthand=quality)


def synthetic_corpus(n_pieces: int = 16, total_beats: int = 256,
                     beats_per_event: int = 4) -> list[Timeline]:
    """Deterministic random-walk progressions for benchmarking."""
    corpus = []
    n_events = total_beats // beats_per_event
    for p in range(n_pieces):
        rng = random.Random(0xA11C + p)
        key = Key(p % 12, "major" if p % 2 == 0 else "minor")
        degree = 0
        events = []
        for i in range(n_events):
            chord = diatonic_triad(key, degree)
            start = Fraction(i * beats_per_event)
            events.append(ChordEvent(start, Fraction(beats_per_event), chord))
            degree = (degree + rng.choice((1, 2, 3, 4, 5, 6))) % 7
        spans = [KeySpan(Fraction(0), Fraction(total_beats), key)]
        corpus.append(build_timeline(f"synthetic-{p:02d}", events, spans))
    return corpus
