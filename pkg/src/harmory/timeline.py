"""Chord timelines: ingestion, key handling, and Tonal Pitch Space encoding.

Two input formats are supported.  The JSON annotation format::

    {
      "file_metadata": {"title": ..., "artist": ..., "identifiers": {"id": ...}},
      "annotations": [
        {"namespace": "chord_harte",
         "data": [{"time": 0, "duration": 4, "value": "C:maj", "confidence": 1}]},
        {"namespace": "key_mode",
         "data": [{"time": 0, "duration": 8, "value": "C:maj"}]}
      ]
    }

and the plain chart format: ``#`` comment lines, of which ``# title:``,
``# artist:`` and ``# key: <Natural>:<maj|min>`` are recognized headers,
followed by one ``<start> <duration> <chord>`` event per line.  Times are
beats, written as decimals or rationals like ``7/2``.
"""

from __future__ import annotations

import json
import logging
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

from harmory.harte import Chord, HarteError, parse_chord, pitch_class_set, render_chord, transpose_chord
from harmory.tps import Key, key_relative_value

log = logging.getLogger(__name__)


class SchemaError(ValueError):
    """Structurally invalid timeline input."""


class EmptyTimelineError(ValueError):
    """A timeline without sounded events was passed to an analysis step."""


@dataclass(frozen=True)
class ChordEvent:
    start: Fraction
    duration: Fraction
    chord: Chord


@dataclass(frozen=True)
class KeySpan:
    start: Fraction
    duration: Fraction
    key: Key


@dataclass(frozen=True)
class Timeline:
    """A piece: ordered, non-overlapping chord events plus tiling key spans."""

    id: str
    events: tuple[ChordEvent, ...]
    keys: tuple[KeySpan, ...]
    title: str | None = None
    artist: str | None = None

    @property
    def end(self) -> Fraction:
        last = self.events[-1]
        return last.start + last.duration

    def key_at(self, position: Fraction) -> Key:
        starts = [span.start for span in self.keys]
        idx = max(bisect_right(starts, position) - 1, 0)
        return self.keys[idx].key

    def sounded(self) -> list[tuple[int, ChordEvent]]:
        return [(i, e) for i, e in enumerate(self.events) if not e.chord.is_nochord]


@dataclass(frozen=True)
class TpsSeries:
    """Tonal Pitch Space values with weights, per event or per beat."""

    values: tuple[tuple[float, Fraction], ...]
    grid: str


def build_timeline(piece_id: str, events, keys=(), title=None, artist=None) -> Timeline:
    """Validate and normalize raw events/keys into a Timeline.

    Events are sorted; overlaps and non-positive durations are rejected.
    Key spans are normalized to tile the whole piece; when none are given
    a single span with the estimated key is used.
    """
    events = tuple(sorted(events, key=lambda e: e.start))
    if not events:
        raise SchemaError(f"{piece_id}: no chord events")
    for event in events:
        if event.duration <= 0:
            raise SchemaError(f"{piece_id}: non-positive duration at beat {event.start}")
    for prev, cur in zip(events, events[1:]):
        if prev.start + prev.duration > cur.start:
            raise SchemaError(f"{piece_id}: overlapping events at beat {cur.start}")
    end = events[-1].start + events[-1].duration
    spans = sorted(keys, key=lambda s: s.start)
    if not spans:
        sounding = [e.chord for e in events if not e.chord.is_nochord]
        if not sounding:
            raise SchemaError(f"{piece_id}: only no-chord events")
        spans = [KeySpan(events[0].start, end - events[0].start, estimate_key(sounding))]
    normalized = []
    for i, span in enumerate(spans):
        start = min(span.start, events[0].start) if i == 0 else span.start
        stop = spans[i + 1].start if i + 1 < len(spans) else max(end, span.start + span.duration)
        if stop > start:
            normalized.append(KeySpan(start, stop - start, span.key))
    return Timeline(id=piece_id, events=events, keys=tuple(normalized),
                    title=title, artist=artist)


def estimate_key(chords) -> Key:
    """Key whose diatonic set covers the most chord pitch classes.

    Ties prefer the lowest tonic pitch class, then major mode.
    """
    pcs = set()
    for chord in chords:
        if not chord.is_nochord:
            pcs |= pitch_class_set(chord)
    if not pcs:
        raise EmptyTimelineError("cannot estimate a key without sounded chords")
    candidates = [Key(tonic, mode) for tonic in range(12) for mode in ("major", "minor")]
    return max(candidates,
               key=lambda k: (len(pcs & k.diatonic()), -k.tonic, k.mode == "major"))


def _to_fraction(value, context: str) -> Fraction:
    try:
        if isinstance(value, float):
            return Fraction(str(value))
        return Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError) as err:
        raise SchemaError(f"{context}: bad time value {value!r}") from err


def load_jams(data: str | bytes, fallback_id: str | None = None) -> Timeline:
    """Load the JSON annotation subset documented in the module docstring.

    Unknown annotation namespaces are skipped with a warning.
    """
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as err:
        raise SchemaError(f"not valid JSON: {err}") from err
    if not isinstance(obj, dict) or "annotations" not in obj:
        raise SchemaError("missing 'annotations'")
    meta = obj.get("file_metadata") or {}
    piece_id = (meta.get("identifiers") or {}).get("id") or fallback_id
    if not piece_id:
        raise SchemaError("missing piece id (file_metadata.identifiers.id)")
    events: list[ChordEvent] = []
    keys: list[KeySpan] = []
    for annotation in obj["annotations"]:
        namespace = annotation.get("namespace")
        if namespace is None:
            raise SchemaError(f"{piece_id}: annotation without namespace")
        if namespace not in ("chord_harte", "key_mode"):
            log.warning("%s: skipping unknown namespace %r", piece_id, namespace)
            continue
        for index, obs in enumerate(annotation.get("data", [])):
            if not isinstance(obs, dict) or "time" not in obs or "duration" not in obs \
                    or "value" not in obs:
                raise SchemaError(f"{piece_id}: {namespace} observation {index} "
                                  "lacks time/duration/value")
            start = _to_fraction(obs["time"], f"{piece_id}: observation {index}")
            duration = _to_fraction(obs["duration"], f"{piece_id}: observation {index}")
            if namespace == "chord_harte":
                try:
                    chord = parse_chord(obs["value"])
                except HarteError as err:
                    raise SchemaError(
                        f"{piece_id}: chord observation at event index {index}: {err}"
                    ) from err
                events.append(ChordEvent(start, duration, chord))
            else:
                try:
                    key = Key.from_string(obs["value"])
                except (ValueError, HarteError) as err:
                    raise SchemaError(
                        f"{piece_id}: key observation at event index {index}: {err}"
                    ) from err
                keys.append(KeySpan(start, duration, key))
    if not events:
        raise SchemaError(f"{piece_id}: no chord_harte events")
    return build_timeline(piece_id, events, keys,
                          title=meta.get("title"), artist=meta.get("artist"))


def load_chart(text: str, piece_id: str | None = None) -> Timeline:
    """Load the plain chart format; see the module docstring."""
    title = artist = None
    key: Key | None = None
    events: list[ChordEvent] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            content = line[1:].strip()
            for header in ("title", "artist", "key"):
                prefix = header + ":"
                if content.startswith(prefix):
                    value = content[len(prefix):].strip()
                    if header == "title":
                        title = value
                    elif header == "artist":
                        artist = value
                    else:
                        if key is not None:
                            raise SchemaError(f"line {lineno}: duplicate key header")
                        try:
                            key = Key.from_string(value)
                        except (ValueError, HarteError) as err:
                            raise SchemaError(f"line {lineno}: {err}") from err
                    break
            continue
        fields = line.split()
        if len(fields) != 3:
            raise SchemaError(f"line {lineno}: expected '<start> <duration> <chord>'")
        start = _to_fraction(fields[0], f"line {lineno}")
        duration = _to_fraction(fields[1], f"line {lineno}")
        try:
            chord = parse_chord(fields[2])
        except HarteError as err:
            raise SchemaError(f"line {lineno}: {err}") from err
        events.append(ChordEvent(start, duration, chord))
    if not events:
        raise SchemaError("chart has no event lines")
    piece_id = piece_id or title or "chart"
    spans = []
    if key is not None:
        first = min(e.start for e in events)
        end = max(e.start + e.duration for e in events)
        spans = [KeySpan(first, end - first, key)]
    return build_timeline(piece_id, events, spans, title=title, artist=artist)


def _format_beats(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def write_chart(timeline: Timeline) -> str:
    """Inverse of :func:`load_chart` for single-key timelines."""
    if len(timeline.keys) != 1:
        raise ValueError("chart format holds exactly one key span")
    lines = []
    if timeline.title:
        lines.append(f"# title: {timeline.title}")
    if timeline.artist:
        lines.append(f"# artist: {timeline.artist}")
    lines.append(f"# key: {timeline.keys[0].key}")
    for event in timeline.events:
        lines.append(f"{_format_beats(event.start)} {_format_beats(event.duration)} "
                     f"{render_chord(event.chord)}")
    return "\n".join(lines) + "\n"


def encode_tps(timeline: Timeline, grid: str = "event") -> TpsSeries:
    """Encode a timeline as key-relative Tonal Pitch Space values.

    Event grid: one (value, duration) entry per sounded event; no-chords
    are dropped.  Beat grid: one entry of weight 1 per whole beat; during
    no-chords the previous value holds, and beats before the first sounded
    event hold the first sounded value.
    """
    if grid not in ("event", "beat"):
        raise ValueError(f"grid must be 'event' or 'beat': {grid!r}")
    sounded = timeline.sounded()
    if not sounded:
        raise EmptyTimelineError(f"{timeline.id}: no sounded events")
    if grid == "event":
        values = tuple(
            (key_relative_value(e.chord, timeline.key_at(e.start)), e.duration)
            for _, e in sounded)
        return TpsSeries(values, "event")
    start = timeline.events[0].start
    beats = int(timeline.end - start)  # floor of the total span
    event_values: list[float | None] = [None] * len(timeline.events)
    for i, e in sounded:
        event_values[i] = key_relative_value(e.chord, timeline.key_at(e.start))
    first_value = next(v for v in event_values if v is not None)
    starts = [e.start for e in timeline.events]
    values = []
    held = first_value
    for j in range(beats):
        position = start + j
        idx = bisect_right(starts, position) - 1
        if idx >= 0 and event_values[idx] is not None:
            held = event_values[idx]
        values.append((held, Fraction(1)))
    if not values:
        raise EmptyTimelineError(f"{timeline.id}: shorter than one beat")
    return TpsSeries(tuple(values), "beat")


def transpose(timeline: Timeline, semitones: int) -> Timeline:
    """Shift all chord roots and key tonics; structure is unchanged."""
    if semitones % 12 == 0:
        return timeline
    events = tuple(
        ChordEvent(e.start, e.duration, transpose_chord(e.chord, semitones))
        for e in timeline.events)
    keys = tuple(
        KeySpan(s.start, s.duration, s.key.transpose(semitones)) for s in timeline.keys)
    return Timeline(id=timeline.id, events=events, keys=keys,
                    title=timeline.title, artist=timeline.artist)
