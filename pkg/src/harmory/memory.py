"""The harmonic memory graph: recurrent patterns as first-class nodes.

Every piece is segmented; segments whose pairwise warping similarity
reaches ``theta_merge`` are merged into one pattern, represented by the
medoid segment.  Patterns whose medoids score at least ``theta_sim`` are
linked by weighted ``similarTo`` edges.  The graph serializes to
N-Triples under the ``urn:harmory:`` vocabulary and to a JSON dump, both
byte-deterministic.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from urllib.parse import quote

from harmory.harte import parse_chord, render_chord
from harmory.segmentation import Segment, SegmentationParams, segment_timeline
from harmory.similarity import _dtw, key_relative_events
from harmory.timeline import ChordEvent, KeySpan, Timeline, build_timeline, estimate_key
from harmory.tps import Key

from math import exp

BASE = "urn:harmory:"


class EmptyCorpusError(ValueError):
    """build_memory needs at least one piece."""


class EmptyQueryError(ValueError):
    """A query needs at least one sounded chord and k >= 1."""


class GraphFormatError(ValueError):
    """Unparseable N-Triples graph data."""


@dataclass(frozen=True)
class Pattern:
    """An equivalence class of segments, named by its medoid segment."""

    medoid: str
    members: tuple[str, ...]

    @property
    def id(self) -> str:
        return self.medoid


@dataclass(frozen=True)
class PieceInfo:
    id: str
    title: str | None
    artist: str | None
    segment_ids: tuple[str, ...]


@dataclass(frozen=True)
class PatternQuery:
    chords: tuple
    key: Key | None = None
    k: int = 5


@dataclass(frozen=True)
class MemoryGraph:
    pieces: dict[str, PieceInfo]
    segments: dict[str, Segment]
    patterns: dict[str, Pattern]
    similar: tuple[tuple[str, str, float], ...]
    params: dict


class UnionFind:
    def __init__(self, items):
        self.parent = {item: item for item in items}
        self.rank = {item: 0 for item in items}

    def find(self, item):
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1

    def groups(self) -> list[list]:
        out: dict = {}
        for item in self.parent:
            out.setdefault(self.find(item), []).append(item)
        return [sorted(group) for group in out.values()]


def segment_to_timeline(segment: Segment) -> Timeline:
    """View a segment as a one-beat-per-event timeline for alignment."""
    events = [ChordEvent(Fraction(i), Fraction(1), chord)
              for i, chord in enumerate(segment.chords)]
    spans = [KeySpan(Fraction(i), Fraction(1), key)
             for i, key in enumerate(segment.keys)]
    return build_timeline(segment.id, events, spans)


def _segment_score(a: Segment, b: Segment, scale: float) -> float:
    alignment = _dtw(key_relative_events(segment_to_timeline(a)),
                     key_relative_events(segment_to_timeline(b)))
    return exp(-alignment.normalized_cost / scale)


def build_memory(corpus: list[Timeline],
                 seg_params: SegmentationParams = SegmentationParams(),
                 theta_sim: float = 0.6, theta_merge: float = 0.9,
                 scale: float = 5.0, workers: int = 1) -> MemoryGraph:
    """Segment a corpus and fold similar segments into patterns.

    Requires ``0 < theta_sim <= 1`` and ``theta_merge >= theta_sim``.
    Thread-parallel pair scoring gives identical results to sequential.
    """
    if not corpus:
        raise EmptyCorpusError("corpus is empty")
    if not 0 < theta_sim <= 1:
        raise ValueError(f"theta_sim must be in (0, 1]: {theta_sim}")
    if theta_merge < theta_sim:
        raise ValueError(f"theta_merge {theta_merge} below theta_sim {theta_sim}")
    ids = [tl.id for tl in corpus]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate piece ids in corpus")
    pieces: dict[str, PieceInfo] = {}
    segments: dict[str, Segment] = {}
    for tl in sorted(corpus, key=lambda t: t.id):
        piece_segments = segment_timeline(tl, seg_params)
        pieces[tl.id] = PieceInfo(tl.id, tl.title, tl.artist,
                                  tuple(s.id for s in piece_segments))
        for segment in piece_segments:
            segments[segment.id] = segment
    ordered = sorted(segments)
    pairs = [(a, b) for i, a in enumerate(ordered) for b in ordered[i + 1:]]

    def score(pair):
        return _segment_score(segments[pair[0]], segments[pair[1]], scale)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scores = dict(zip(pairs, pool.map(score, pairs)))
    else:
        scores = {pair: score(pair) for pair in pairs}
    merged = UnionFind(ordered)
    for (a, b), value in scores.items():
        if value >= theta_merge:
            merged.union(a, b)
    patterns: dict[str, Pattern] = {}
    for group in merged.groups():
        if len(group) == 1:
            medoid = group[0]
        else:
            totals = {seg_id: sum(scores[tuple(sorted((seg_id, other)))]
                                  for other in group if other != seg_id)
                      for seg_id in group}
            best = max(totals.values())
            medoid = min(seg_id for seg_id, value in totals.items() if value == best)
        patterns[medoid] = Pattern(medoid=medoid, members=tuple(group))
    similar = []
    pattern_ids = sorted(patterns)
    for i, pa in enumerate(pattern_ids):
        for pb in pattern_ids[i + 1:]:
            value = scores[tuple(sorted((patterns[pa].medoid, patterns[pb].medoid)))]
            if value >= theta_sim:
                similar.append((pa, pb, value))
    return MemoryGraph(
        pieces=pieces,
        segments=segments,
        patterns=patterns,
        similar=tuple(similar),
        params={"theta_sim": theta_sim, "theta_merge": theta_merge, "scale": scale,
                "kernel_size": seg_params.kernel_size, "taper": seg_params.taper,
                "peak_lambda": seg_params.peak_lambda, "min_gap": seg_params.min_gap,
                "min_len": seg_params.min_len},
    )


def _uri(name: str) -> str:
    return f"<{BASE}{quote(name, safe='/_.-')}>"


def _literal(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"') \
        .replace("\n", "\\n").replace("\r", "\\r")
    return f'"{escaped}"'


def chord_sequence(segment: Segment) -> str:
    return " ".join(render_chord(chord) for chord in segment.chords)


def export_ntriples(graph: MemoryGraph) -> bytes:
    """Serialize to sorted N-Triples; byte-identical across runs."""
    lines = []
    for piece in graph.pieces.values():
        for seg_id in piece.segment_ids:
            lines.append(f"{_uri(piece.id)} <{BASE}hasSegment> {_uri(seg_id)} .")
        for a, b in zip(piece.segment_ids, piece.segment_ids[1:]):
            lines.append(f"{_uri(a)} <{BASE}nextSegment> {_uri(b)} .")
    for pattern in graph.patterns.values():
        for member in pattern.members:
            lines.append(f"{_uri(member)} <{BASE}instanceOf> {_uri(pattern.id)} .")
    for segment in graph.segments.values():
        lines.append(f"{_uri(segment.id)} <{BASE}chordSequence> "
                     f"{_literal(chord_sequence(segment))} .")
    for a, b, weight in graph.similar:
        lines.append(f"{_uri(a)} <{BASE}similarTo> {_uri(b)} .")
        lines.append(f"<{BASE}sim/{quote(a, safe='/_.-')}/{quote(b, safe='/_.-')}> "
                     f"<{BASE}weight> \"{weight:.6f}\" .")
    return ("\n".join(sorted(lines)) + "\n").encode("utf-8")


_TRIPLE = re.compile(
    r'^<([^>]*)> <([^>]*)> (?:<([^>]*)>|"((?:[^"\\]|\\.)*)") \.$')


def _unquote_literal(text: str) -> str:
    return text.replace("\\n", "\n").replace("\\r", "\r") \
        .replace('\\"', '"').replace("\\\\", "\\")


def import_ntriples(data: bytes) -> MemoryGraph:
    """Rebuild a memory graph from export_ntriples output.

    Segment keys are re-estimated from the chord sequences; the graph
    structure (nodes, edges, weights, chord content) round-trips.
    """
    from urllib.parse import unquote

    has_segment: dict[str, list[str]] = {}
    next_segment: dict[str, str] = {}
    instance_of: dict[str, str] = {}
    sequences: dict[str, str] = {}
    similar_pairs: list[tuple[str, str]] = []
    weights: dict[str, float] = {}
    for lineno, raw in enumerate(data.decode("utf-8").splitlines(), 1):
        if not raw.strip():
            continue
        match = _TRIPLE.match(raw)
        if not match or not (match.group(1).startswith(BASE)
                             and match.group(2).startswith(BASE)):
            raise GraphFormatError(f"line {lineno}: not a recognized triple")
        subject = unquote(match.group(1)[len(BASE):])
        predicate = match.group(2)[len(BASE):]
        obj_uri = match.group(3)
        obj = unquote(obj_uri[len(BASE):]) if obj_uri else _unquote_literal(match.group(4))
        if predicate == "hasSegment":
            has_segment.setdefault(subject, []).append(obj)
        elif predicate == "nextSegment":
            next_segment[subject] = obj
        elif predicate == "instanceOf":
            instance_of[subject] = obj
        elif predicate == "chordSequence":
            sequences[subject] = obj
        elif predicate == "similarTo":
            similar_pairs.append((subject, obj))
        elif predicate == "weight":
            weights[subject] = float(obj)
        else:
            raise GraphFormatError(f"line {lineno}: unknown predicate {predicate!r}")
    pieces: dict[str, PieceInfo] = {}
    segments: dict[str, Segment] = {}
    for piece_id in sorted(has_segment):
        ordered = sorted(has_segment[piece_id],
                         key=lambda seg_id: int(seg_id.rsplit("/", 1)[1]))
        pieces[piece_id] = PieceInfo(piece_id, None, None, tuple(ordered))
        cursor = 0
        for index, seg_id in enumerate(ordered):
            if seg_id not in sequences:
                raise GraphFormatError(f"segment {seg_id}: missing chordSequence")
            chords = tuple(parse_chord(token) for token in sequences[seg_id].split())
            key = estimate_key(chords)
            segments[seg_id] = Segment(
                piece_id=piece_id, index=index, start_event=cursor,
                end_event=cursor + len(chords), chords=chords,
                keys=tuple(key for _ in chords))
            cursor += len(chords)
    member_lists: dict[str, list[str]] = {}
    for member, pattern_id in instance_of.items():
        member_lists.setdefault(pattern_id, []).append(member)
    patterns = {pattern_id: Pattern(medoid=pattern_id, members=tuple(sorted(members)))
                for pattern_id, members in member_lists.items()}
    similar = []
    for a, b in sorted(similar_pairs):
        sim_node = f"sim/{a}/{b}"
        if sim_node not in weights:
            raise GraphFormatError(f"similarTo {a} {b}: missing weight")
        similar.append((a, b, weights[sim_node]))
    return MemoryGraph(pieces=pieces, segments=segments, patterns=patterns,
                       similar=tuple(similar), params={})


def export_json(graph: MemoryGraph) -> str:
    """JSON dump with nodes and edges arrays in stable order."""
    nodes = []
    for piece_id in sorted(graph.pieces):
        piece = graph.pieces[piece_id]
        nodes.append({"id": piece_id, "type": "piece",
                      "title": piece.title, "artist": piece.artist})
    for seg_id in sorted(graph.segments):
        nodes.append({"id": seg_id, "type": "segment",
                      "chords": chord_sequence(graph.segments[seg_id])})
    for pattern_id in sorted(graph.patterns):
        nodes.append({"id": pattern_id, "type": "pattern",
                      "members": list(graph.patterns[pattern_id].members)})
    edges = []
    for piece_id in sorted(graph.pieces):
        piece = graph.pieces[piece_id]
        for seg_id in piece.segment_ids:
            edges.append({"source": piece_id, "type": "hasSegment", "target": seg_id})
        for a, b in zip(piece.segment_ids, piece.segment_ids[1:]):
            edges.append({"source": a, "type": "nextSegment", "target": b})
    for pattern_id in sorted(graph.patterns):
        for member in graph.patterns[pattern_id].members:
            edges.append({"source": member, "type": "instanceOf", "target": pattern_id})
    for a, b, weight in graph.similar:
        edges.append({"source": a, "type": "similarTo", "target": b,
                      "weight": round(weight, 6)})
    edges.sort(key=lambda e: (e["source"], e["type"], e["target"]))
    return json.dumps({"nodes": nodes, "edges": edges}, indent=2) + "\n"


def query_similar(graph: MemoryGraph, query: PatternQuery,
                  scale: float = 5.0) -> list[tuple[str, float, str]]:
    """Rank pattern medoids by warping similarity to a chord progression.

    Returns up to k (pattern id, score, chord sequence) rows; ties are
    broken by pattern id.
    """
    chords = [c for c in query.chords if not c.is_nochord]
    if not chords or query.k < 1:
        raise EmptyQueryError("need at least one sounded chord and k >= 1")
    key = query.key or estimate_key(chords)
    events = [ChordEvent(Fraction(i), Fraction(1), chord)
              for i, chord in enumerate(chords)]
    spans = [KeySpan(Fraction(0), Fraction(len(chords)), key)]
    probe = key_relative_events(build_timeline("query", events, spans))
    ranked = []
    for pattern_id in sorted(graph.patterns):
        medoid = graph.segments[graph.patterns[pattern_id].medoid]
        alignment = _dtw(probe, key_relative_events(segment_to_timeline(medoid)))
        ranked.append((pattern_id, exp(-alignment.normalized_cost / scale),
                       chord_sequence(medoid)))
    ranked.sort(key=lambda row: (-row[1], row[0]))
    return ranked[:query.k]


def graph_stats(graph: MemoryGraph) -> dict:
    """Node/edge counts, similarTo component sizes, degree histogram."""
    next_edges = sum(max(len(p.segment_ids) - 1, 0) for p in graph.pieces.values())
    components = UnionFind(sorted(graph.patterns))
    degrees = {pattern_id: 0 for pattern_id in graph.patterns}
    for a, b, _ in graph.similar:
        components.union(a, b)
        degrees[a] += 1
        degrees[b] += 1
    sizes = sorted((len(g) for g in components.groups()), reverse=True)
    histogram: dict[int, int] = {}
    for degree in degrees.values():
        histogram[degree] = histogram.get(degree, 0) + 1
    return {
        "nodes": {"pieces": len(graph.pieces), "segments": len(graph.segments),
                  "patterns": len(graph.patterns)},
        "edges": {"hasSegment": len(graph.segments), "nextSegment": next_edges,
                  "instanceOf": len(graph.segments), "similarTo": len(graph.similar)},
        "similar_components": {"count": len(sizes), "sizes": sizes},
        "degree_histogram": {str(k): histogram[k] for k in sorted(histogram)},
    }
