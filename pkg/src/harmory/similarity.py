"""Harmonic similarity measures between chord timelines.

Three measures share the [0, 1] score convention (1 means identical):

* ``dtw``   dynamic time warping over the event grid, cell cost = Tonal
  Pitch Space distance, score = exp(-normalized_cost / scale);
* ``tpsd``  the classic beat-grid profile distance: minimum over cyclic
  shifts of the mean absolute difference of key-relative values;
* ``lharp`` shared recurrent-pattern coverage, scored by the harmonic
  mean of the two pieces' covered fractions.

Events are compared key-relatively: each chord is transposed so that its
governing key tonic is C before costing, which makes every measure
invariant under transposition of either piece.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import exp, inf

from harmory.harte import Chord, transpose_chord
from harmory.timeline import EmptyTimelineError, Timeline, encode_tps
from harmory.tps import Key, chord_distance, fifths_distance, key_relative_value

DEFAULT_SCALE = 5.0

Event = tuple[Chord, Key]


@dataclass(frozen=True)
class Alignment:
    """A monotone warping path with its summed and per-step cell cost."""

    path: tuple[tuple[int, int], ...]
    cost: float
    normalized_cost: float


@dataclass(frozen=True)
class LocalRegion:
    """A pair of covered intervals (half-open event ranges) with the
    cell costs along their alignment path."""

    interval_a: tuple[int, int]
    interval_b: tuple[int, int]
    step_costs: tuple[float, ...]


@dataclass(frozen=True)
class SimilarityReport:
    measure: str
    score: float
    raw: float
    params: dict
    local_regions: tuple[LocalRegion, ...] = ()

    def to_json(self) -> str:
        payload = {
            "measure": self.measure,
            "score": self.score,
            "raw": self.raw,
            "params": self.params,
            "local_regions": [
                {"interval_a": list(r.interval_a), "interval_b": list(r.interval_b),
                 "step_costs": list(r.step_costs)}
                for r in self.local_regions],
        }
        return json.dumps(payload, indent=2) + "\n"


@dataclass(frozen=True)
class PatternOccurrence:
    """A recurrent n-gram: its invariant encoding and start positions."""

    key: tuple
    positions: tuple[int, ...]
    length: int


def key_relative_events(timeline: Timeline) -> tuple[Event, ...]:
    """Sounded events transposed so each governing key tonic is C."""
    out = []
    for _, e in timeline.sounded():
        key = timeline.key_at(e.start)
        out.append((transpose_chord(e.chord, -key.tonic), Key(0, key.mode)))
    return tuple(out)


def _cell(a: Event, b: Event) -> float:
    return chord_distance(a[0], a[1], b[0], b[1])


def _codes(events: tuple[Event, ...]) -> tuple[list[int], list[Event]]:
    vocab: dict[Event, int] = {}
    codes = [vocab.setdefault(event, len(vocab)) for event in events]
    return codes, list(vocab)


def _dtw(ea: tuple[Event, ...], eb: tuple[Event, ...],
         band: int | None = None) -> Alignment:
    n, m = len(ea), len(eb)
    width = None if band is None else max(band, abs(n - m))
    # Chord vocabularies are small, so cost distinct event pairs once and
    # fill the n*m grid by table lookup.
    codes_a, vocab_a = _codes(ea)
    codes_b, vocab_b = _codes(eb)
    table = [[_cell(x, y) for y in vocab_b] for x in vocab_a]
    acc = [[inf] * m for _ in range(n)]
    for i in range(n):
        row = acc[i]
        above = acc[i - 1] if i else None
        costs = table[codes_a[i]]
        for j in range(m):
            if width is not None and abs(i - j) > width:
                continue
            c = costs[codes_b[j]]
            if i == 0 and j == 0:
                row[j] = c
                continue
            best = inf
            if i and j and above[j - 1] < best:
                best = above[j - 1]
            if i and above[j] < best:
                best = above[j]
            if j and row[j - 1] < best:
                best = row[j - 1]
            row[j] = c + best
    # Backtrack, preferring the diagonal step, then advancing i.
    path = [(n - 1, m - 1)]
    i, j = n - 1, m - 1
    while (i, j) != (0, 0):
        if i and j and acc[i - 1][j - 1] <= min(acc[i - 1][j], acc[i][j - 1]):
            i, j = i - 1, j - 1
        elif i and (not j or acc[i - 1][j] <= acc[i][j - 1]):
            i = i - 1
        else:
            j = j - 1
        path.append((i, j))
    path.reverse()
    total = acc[n - 1][m - 1]
    return Alignment(path=tuple(path), cost=total, normalized_cost=total / len(path))


def dtw_align(a: Timeline, b: Timeline, band: int | None = None) -> Alignment:
    ea, eb = key_relative_events(a), key_relative_events(b)
    if not ea or not eb:
        raise EmptyTimelineError("both timelines need sounded events")
    return _dtw(ea, eb, band)


def dtw_similarity(a: Timeline, b: Timeline, scale: float = DEFAULT_SCALE,
                   band: int | None = None) -> SimilarityReport:
    alignment = dtw_align(a, b, band)
    return SimilarityReport(
        measure="dtw",
        score=exp(-alignment.normalized_cost / scale),
        raw=alignment.normalized_cost,
        params={"scale": scale, "band": band},
    )


def tpsd(a: Timeline, b: Timeline, scale: float = DEFAULT_SCALE) -> SimilarityReport:
    """Beat-grid profile distance, minimized over cyclic shifts of the
    shorter series (which is repeated to the longer length)."""
    va = [v for v, _ in encode_tps(a, "beat").values]
    vb = [v for v, _ in encode_tps(b, "beat").values]
    short, long_ = (va, vb) if len(va) <= len(vb) else (vb, va)
    length_short, length_long = len(short), len(long_)
    best = inf
    for shift in range(length_short):
        total = 0.0
        for t in range(length_long):
            total += abs(long_[t] - short[(t + shift) % length_short])
        if total < best:
            best = total
    raw = best / length_long
    return SimilarityReport(measure="tpsd", score=exp(-raw / scale), raw=raw,
                            params={"scale": scale})


def _pattern_windows(events: tuple[Event, ...], n: int):
    """Yield (position, encoding) for every length-n window.

    The encoding pairs each event's key-relative value with the
    circle-of-fifths step to the next event inside the window; the last
    step is 0.  It is invariant under transposition of the piece.
    """
    values = [key_relative_value(chord, key) for chord, key in events]
    roots = [chord.root.pitch_class for chord, _ in events]
    for start in range(len(events) - n + 1):
        encoded = tuple(
            (values[start + k],
             fifths_distance(roots[start + k], roots[start + k + 1]) if k < n - 1 else 0)
            for k in range(n))
        yield start, encoded


def extract_recurrent_patterns(timeline: Timeline, n_min: int = 2,
                               n_max: int = 4) -> list[PatternOccurrence]:
    """Hash every n-gram window, n_min <= n <= n_max, and keep encodings
    occurring at two or more (possibly overlapping) positions."""
    if n_min < 2 or n_max < n_min:
        raise ValueError(f"need 2 <= n_min <= n_max, got {n_min}..{n_max}")
    events = key_relative_events(timeline)
    found: dict[tuple, list[int]] = {}
    for n in range(n_min, min(n_max, len(events)) + 1):
        for start, encoded in _pattern_windows(events, n):
            found.setdefault((n, encoded), []).append(start)
    return [PatternOccurrence(key=encoded, positions=tuple(positions), length=n)
            for (n, encoded), positions in sorted(found.items())
            if len(positions) >= 2]


def _coverage(patterns, agreeing, total: int) -> tuple[Fraction, set[int]]:
    covered: set[int] = set()
    for pattern in patterns:
        if pattern in agreeing:
            for position in pattern.positions:
                covered.update(range(position, position + pattern.length))
    return Fraction(len(covered), total), covered


def _intervals(indices: set[int]) -> list[tuple[int, int]]:
    runs = []
    for i in sorted(indices):
        if runs and runs[-1][1] == i:
            runs[-1][1] = i + 1
        else:
            runs.append([i, i + 1])
    return [tuple(run) for run in runs]


def lharp(a: Timeline, b: Timeline, tau: float = 1.0, n_min: int = 2,
          n_max: int = 4) -> SimilarityReport:
    """Pattern-coverage similarity.

    Patterns of the two pieces agree when the warping cost between their
    chord sequences stays within ``tau`` per step.  The score is the
    harmonic mean of the fractions of each piece covered by agreeing
    patterns, computed exactly.
    """
    ea, eb = key_relative_events(a), key_relative_events(b)
    if not ea or not eb:
        raise EmptyTimelineError("both timelines need sounded events")
    patterns_a = extract_recurrent_patterns(a, n_min, n_max)
    patterns_b = extract_recurrent_patterns(b, n_min, n_max)
    agree_a, agree_b = set(), set()
    pair_alignments = {}
    for p in patterns_a:
        slice_a = ea[p.positions[0]:p.positions[0] + p.length]
        for q in patterns_b:
            slice_b = eb[q.positions[0]:q.positions[0] + q.length]
            alignment = _dtw(slice_a, slice_b)
            if alignment.normalized_cost <= tau:
                agree_a.add(p)
                agree_b.add(q)
                pair_alignments[(p, q)] = alignment
    coverage_a, covered_a = _coverage(patterns_a, agree_a, len(ea))
    coverage_b, covered_b = _coverage(patterns_b, agree_b, len(eb))
    if coverage_a == coverage_b:
        raw = coverage_a
    elif coverage_a == 0 or coverage_b == 0:
        raw = Fraction(0)
    else:
        raw = 2 * coverage_a * coverage_b / (coverage_a + coverage_b)
    regions = []
    runs_a, runs_b = _intervals(covered_a), _intervals(covered_b)
    for run_a in runs_a:
        for run_b in runs_b:
            if any(run_a[0] <= p.positions[0] and p.positions[0] + p.length <= run_a[1]
                   and run_b[0] <= q.positions[0] and q.positions[0] + q.length <= run_b[1]
                   for (p, q) in pair_alignments):
                alignment = _dtw(ea[run_a[0]:run_a[1]], eb[run_b[0]:run_b[1]])
                steps = tuple(_cell(ea[run_a[0] + i], eb[run_b[0] + j])
                              for i, j in alignment.path)
                regions.append(LocalRegion(run_a, run_b, steps))
    return SimilarityReport(
        measure="lharp",
        score=float(raw),
        raw=float(raw),
        params={"tau": tau, "n_min": n_min, "n_max": n_max},
        local_regions=tuple(regions),
    )


MEASURES = {
    "dtw": dtw_similarity,
    "tpsd": tpsd,
    "lharp": lharp,
}


def corpus_similarity_matrix(corpus: list[Timeline], measure: str = "dtw",
                             params: dict | None = None, workers: int = 1):
    """Score every unordered pair; returns (ids, matrix) with unit
    diagonal.  Pair evaluation may run on threads; results are placed by
    index so the matrix is identical to the sequential one."""
    import numpy as np

    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}")
    ids = [tl.id for tl in corpus]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate piece ids in corpus")
    func = MEASURES[measure]
    kwargs = params or {}
    n = len(corpus)
    matrix = np.eye(n)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def score(pair):
        i, j = pair
        try:
            return func(corpus[i], corpus[j], **kwargs).score
        except Exception as err:
            raise RuntimeError(f"{ids[i]} vs {ids[j]}: {err}") from err

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(score, pairs))
    else:
        results = [score(pair) for pair in pairs]
    for (i, j), value in zip(pairs, results):
        matrix[i, j] = matrix[j, i] = value
    return ids, matrix


def matrix_to_csv(ids: list[str], matrix) -> str:
    lines = ["id," + ",".join(ids)]
    for piece_id, row in zip(ids, matrix):
        lines.append(piece_id + "," + ",".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"
