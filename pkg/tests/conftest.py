"""Shared builders and hypothesis strategies."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import strategies as st

from harmory.harte import Chord, Degree, NO_CHORD, Natural, parse_chord
from harmory.timeline import ChordEvent, KeySpan, Timeline, build_timeline
from harmory.tps import Key


def make_timeline(chords, key="C:maj", piece_id="piece", beat=1):
    """Timeline from chord symbols, one event per `beat` beats."""
    events = tuple(ChordEvent(Fraction(i * beat), Fraction(beat), parse_chord(c))
                   for i, c in enumerate(chords))
    span = KeySpan(Fraction(0), Fraction(len(chords) * beat), Key.from_string(key))
    return build_timeline(piece_id, events, (span,))


naturals = st.builds(
    Natural,
    letter=st.sampled_from("ABCDEFG"),
    modifiers=st.sampled_from(["", "b", "#", "bb", "##"]),
)

degrees = st.builds(
    Degree,
    interval=st.integers(1, 13),
    alteration=st.integers(-2, 2),
)


@st.composite
def chords(draw):
    """Sounded chords; the bass, when present, is one of the degrees so
    that render/parse is an exact round trip."""
    root = draw(naturals)
    pool = draw(st.lists(degrees, min_size=1, max_size=7,
                         unique_by=lambda d: d.interval))
    degree_set = frozenset(pool)
    bass = draw(st.sampled_from([None] + pool))
    return Chord(root=root, degrees=degree_set, bass=bass)


@st.composite
def chord_symbols(draw):
    """Syntactically valid chord strings, including N."""
    if draw(st.booleans()) and draw(st.integers(0, 9)) == 0:
        return "N"
    from harmory.harte import render_chord

    return render_chord(draw(chords()))


@pytest.fixture
def simple_timeline():
    return make_timeline(["C:maj", "G:maj", "A:min", "F:maj"])
