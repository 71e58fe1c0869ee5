"""Tonal Pitch Space distances.

The reference oracle below recomputes the directed distance from the
written definition (set differences per level) with code that shares
nothing with the implementation; golden values were hand-derived from
the level tables.
"""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harmory.harte import NO_CHORD, NoChordError, parse_chord, pitch_class_set, transpose_chord
from harmory.tps import (
    Key,
    basic_space,
    chord_distance,
    fifths_distance,
    key_relative_value,
)
from tests.conftest import chords

MAJOR = Key.from_string("C:maj")


def oracle_fifths(x: int, y: int) -> int:
    best = 99
    for direction in (7, 5):
        pc, steps = x % 12, 0
        while pc != y % 12:
            pc = (pc + direction) % 12
            steps += 1
        best = min(best, steps)
    return best


def oracle_levels(chord, key):
    root = chord.root.pitch_class
    fifth = (root + 7) % 12
    for degree in chord.degrees:
        if degree.interval == 5 and degree.alteration:
            fifth = (root + degree.semitones) % 12
    a = {root}
    b = a | {fifth}
    c = b | set(pitch_class_set(chord))
    d = c | set(key.diatonic())
    return [a, b, c, d]


def oracle_directed(x, kx, y, ky) -> float:
    i = oracle_fifths(kx.tonic, ky.tonic)
    j = oracle_fifths(x.root.pitch_class, y.root.pitch_class)
    k = sum(len(dst - src) for src, dst in zip(oracle_levels(x, kx),
                                               oracle_levels(y, ky)))
    return i + j + k


def oracle_distance(x, kx, y, ky) -> float:
    return (oracle_directed(x, kx, y, ky) + oracle_directed(y, ky, x, kx)) / 2


def test_major_diatonic():
    assert sorted(Key(0, "major").diatonic()) == [0, 2, 4, 5, 7, 9, 11]
    assert sorted(Key(7, "major").diatonic()) == [0, 2, 4, 6, 7, 9, 11]


def test_harmonic_minor_diatonic():
    # A harmonic minor: A B C D E F G#
    assert sorted(Key(9, "minor").diatonic()) == [0, 2, 4, 5, 8, 9, 11]
    assert sorted(Key(0, "minor").diatonic()) == [0, 2, 3, 5, 7, 8, 11]


def test_key_from_string():
    assert Key.from_string("C:maj") == Key(0, "major")
    assert Key.from_string("Eb:min") == Key(3, "minor")
    assert Key.from_string("F#:maj") == Key(6, "major")
    # tonics are pitch classes; rendering uses canonical flat spelling
    assert str(Key.from_string("F#:maj")) == "Gb:maj"
    assert str(Key(3, "minor")) == "Eb:min"


def test_basic_space_tonic():
    space = basic_space(parse_chord("C:maj"), MAJOR)
    assert space.levels[0] == frozenset({0})
    assert space.levels[1] == frozenset({0, 7})
    assert space.levels[2] == frozenset({0, 4, 7})
    assert space.levels[3] == frozenset({0, 2, 4, 5, 7, 9, 11})
    assert space.levels[4] == frozenset(range(12))


def test_basic_space_dominant():
    space = basic_space(parse_chord("G:maj"), MAJOR)
    assert space.levels[0] == frozenset({7})
    assert space.levels[1] == frozenset({7, 2})
    assert space.levels[2] == frozenset({7, 11, 2})
    assert space.levels[3] == frozenset({0, 2, 4, 5, 7, 9, 11})


def test_basic_space_altered_fifth():
    space = basic_space(parse_chord("C:aug"), MAJOR)
    assert space.levels[1] == frozenset({0, 8})
    space = basic_space(parse_chord("C:dim"), MAJOR)
    assert space.levels[1] == frozenset({0, 6})


def test_basic_space_rejects_nochord():
    with pytest.raises(NoChordError):
        basic_space(NO_CHORD, MAJOR)
    with pytest.raises(NoChordError):
        chord_distance(NO_CHORD, MAJOR, parse_chord("C:maj"), MAJOR)


def test_fifths_distance_examples():
    assert fifths_distance(0, 0) == 0
    assert fifths_distance(0, 7) == 1
    assert fifths_distance(0, 9) == 3


def test_fifths_distance_brute_force():
    for x, y in itertools.product(range(12), repeat=2):
        assert fifths_distance(x, y) == oracle_fifths(x, y)
        assert fifths_distance(x, y) == fifths_distance(y, x)
        assert 0 <= fifths_distance(x, y) <= 6


def test_hand_oracle_values():
    tonic = parse_chord("C:maj")
    assert chord_distance(tonic, MAJOR, tonic, MAJOR) == 0.0
    assert chord_distance(tonic, MAJOR, parse_chord("G:maj"), MAJOR) == 5.0
    assert chord_distance(tonic, MAJOR, parse_chord("A:min"), MAJOR) == 7.0
    assert chord_distance(tonic, MAJOR, parse_chord("F:maj"), MAJOR) == 5.0


def test_key_relative_value_examples():
    assert key_relative_value(parse_chord("C:maj"), MAJOR) == 0.0
    assert key_relative_value(parse_chord("G:maj"), MAJOR) == 5.0
    assert key_relative_value(parse_chord("A:min"), MAJOR) == 7.0
    minor = Key.from_string("A:min")
    assert key_relative_value(parse_chord("A:min"), minor) == 0.0


def test_matches_reference_oracle_on_triads():
    symbols = ["C:maj", "C:min", "D:min7", "Eb:7", "F#:dim", "G:7",
               "A:min", "Bb:maj7", "B:hdim7", "C:aug", "E:sus4", "Ab:13"]
    keys = [Key.from_string(k) for k in ("C:maj", "A:min", "Eb:maj", "F#:min")]
    for sa, sb in itertools.product(symbols, repeat=2):
        for ka, kb in itertools.product(keys, repeat=2):
            a, b = parse_chord(sa), parse_chord(sb)
            assert chord_distance(a, ka, b, kb) == oracle_distance(a, ka, b, kb)


@given(chords(), chords(),
       st.integers(0, 11), st.sampled_from(["major", "minor"]),
       st.integers(0, 11), st.sampled_from(["major", "minor"]))
@settings(max_examples=200)
def test_symmetry_and_bounds(a, b, ta, ma, tb, mb):
    ka, kb = Key(ta, ma), Key(tb, mb)
    d = chord_distance(a, ka, b, kb)
    assert d == chord_distance(b, kb, a, ka)
    assert 0 <= d <= 60
    assert d == oracle_distance(a, ka, b, kb)


@given(chords(), chords(), st.integers(0, 11), st.integers(1, 11))
@settings(max_examples=200)
def test_transposition_invariance(a, b, tonic, shift):
    ka, kb = Key(tonic, "major"), Key((tonic + 5) % 12, "minor")
    base = chord_distance(a, ka, b, kb)
    moved = chord_distance(transpose_chord(a, shift), ka.transpose(shift),
                           transpose_chord(b, shift), kb.transpose(shift))
    assert moved == base


def test_zero_iff_identical_space():
    a = parse_chord("C:maj")
    assert chord_distance(a, MAJOR, parse_chord("C:(3,5)"), MAJOR) == 0.0
    assert chord_distance(a, MAJOR, a, Key(0, "minor")) > 0
    assert chord_distance(a, MAJOR, parse_chord("C:min"), MAJOR) > 0


def test_weight_nesting():
    space = basic_space(parse_chord("C:maj"), MAJOR)
    for small, big in zip(space.levels, space.levels[1:]):
        assert small <= big
    assert space.weight(0) == 5
    assert space.weight(7) == 4
    assert space.weight(4) == 3
    assert space.weight(2) == 2
    assert space.weight(1) == 1
    assert all(space.weight(pc) in range(6) for pc in range(12))
