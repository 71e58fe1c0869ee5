"""Harmonic structure segmentation via self-similarity and novelty.

The self-similarity matrix holds ``1 - distance/max_distance`` over the
sounded events of a piece.  A checkerboard kernel slid along the diagonal
yields a novelty curve whose peaks become segment boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from harmory.harte import Chord
from harmory.timeline import EmptyTimelineError, Timeline
from harmory.tps import Key, chord_distance


class KernelTooLargeError(ValueError):
    """Kernel size exceeds twice the matrix dimension."""


@dataclass(frozen=True)
class SegmentationParams:
    """Tuning knobs; the defaults are sensible for event-level charts."""

    kernel_size: int = 8
    taper: float = 1.0
    peak_lambda: float = 0.5
    min_gap: int = 2
    min_len: int = 2


@dataclass(frozen=True)
class SSM:
    """Self-similarity over sounded events, values in [0, 1].

    ``event_indices[i]`` maps row i back to the original event position.
    """

    matrix: np.ndarray
    event_indices: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.event_indices)


@dataclass(frozen=True)
class NoveltyCurve:
    values: np.ndarray
    kernel_size: int
    taper: float


@dataclass(frozen=True)
class Segment:
    """A contiguous run of sounded events, half-open over sounded indices."""

    piece_id: str
    index: int
    start_event: int
    end_event: int
    chords: tuple[Chord, ...]
    keys: tuple[Key, ...]

    @property
    def id(self) -> str:
        return f"{self.piece_id}/seg/{self.index}"

    def __len__(self) -> int:
        return self.end_event - self.start_event

    def events(self) -> tuple[tuple[Chord, Key], ...]:
        return tuple(zip(self.chords, self.keys))


def build_ssm(timeline: Timeline) -> SSM:
    """Pairwise chord similarity under each event's governing key."""
    sounded = timeline.sounded()
    if not sounded:
        raise EmptyTimelineError(f"{timeline.id}: no sounded events")
    pairs = [(e.chord, timeline.key_at(e.start)) for _, e in sounded]
    n = len(pairs)
    distances = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            distances[i, j] = distances[j, i] = chord_distance(
                pairs[i][0], pairs[i][1], pairs[j][0], pairs[j][1])
    largest = distances.max()
    if largest == 0:
        largest = 1.0
    return SSM(matrix=1.0 - distances / largest,
               event_indices=tuple(i for i, _ in sounded))


def checkerboard_kernel(kernel_size: int, taper: float) -> np.ndarray:
    """Sign-checkered Gaussian kernel centered between two cells."""
    half = kernel_size // 2
    offsets = np.arange(-half, half) + 0.5
    u, v = np.meshgrid(offsets, offsets, indexing="ij")
    return np.sign(u) * np.sign(v) * np.exp(-taper * (u**2 + v**2) / half**2)


def novelty(ssm: SSM, kernel_size: int = 8, taper: float = 1.0) -> NoveltyCurve:
    """Checkerboard novelty along the diagonal, one value per boundary
    position i (the gap before event i); edges are zero-padded and
    negative responses are clamped to zero."""
    n = ssm.size
    if kernel_size < 2 or kernel_size % 2:
        raise ValueError(f"kernel_size must be even and >= 2: {kernel_size}")
    if taper <= 0:
        raise ValueError(f"taper must be positive: {taper}")
    if kernel_size > 2 * n:
        raise KernelTooLargeError(f"kernel {kernel_size} exceeds 2n = {2 * n}")
    half = kernel_size // 2
    kernel = checkerboard_kernel(kernel_size, taper)
    padded = np.zeros((n + 2 * half, n + 2 * half))
    padded[half:half + n, half:half + n] = ssm.matrix
    values = np.empty(n)
    for i in range(n):
        window = padded[i:i + kernel_size, i:i + kernel_size]
        values[i] = np.sum(kernel * window)
    np.clip(values, 0.0, None, out=values)
    return NoveltyCurve(values=values, kernel_size=kernel_size, taper=taper)


def pick_boundaries(curve: NoveltyCurve, peak_lambda: float = 0.5,
                    min_gap: int = 2) -> list[int]:
    """Strict local maxima at least ``mean + peak_lambda * std`` high,
    greedily thinned to ``min_gap``; ties keep the lower index.  The
    trivial boundaries 0 and n are never returned."""
    v = curve.values
    n = len(v)
    threshold = v.mean() + peak_lambda * v.std()
    candidates = [i for i in range(1, n - 1)
                  if v[i - 1] < v[i] > v[i + 1] and v[i] >= threshold]
    kept: list[int] = []
    for i in sorted(candidates, key=lambda i: (-v[i], i)):
        if all(abs(i - j) >= min_gap for j in kept):
            kept.append(i)
    return sorted(kept)


def segment_timeline(timeline: Timeline,
                     params: SegmentationParams = SegmentationParams()) -> list[Segment]:
    """Split a piece into segments of sounded events.

    The kernel is clamped to twice the number of sounded events so short
    pieces stay segmentable.  Segments shorter than ``min_len`` merge into
    the preceding segment (the first merges forward); a single-event piece
    is returned whole.
    """
    ssm = build_ssm(timeline)
    n = ssm.size
    if n == 1:
        boundaries: list[int] = []
    else:
        kernel_size = min(params.kernel_size, 2 * n)
        curve = novelty(ssm, kernel_size, params.taper)
        boundaries = pick_boundaries(curve, params.peak_lambda, params.min_gap)
    cuts = [0, *boundaries, n]
    spans = [(a, b) for a, b in zip(cuts, cuts[1:])]
    changed = True
    while changed and len(spans) > 1:
        changed = False
        for i, (a, b) in enumerate(spans):
            if b - a < params.min_len:
                if i == 0:
                    spans[0] = (a, spans[1][1])
                    del spans[1]
                else:
                    spans[i - 1] = (spans[i - 1][0], b)
                    del spans[i]
                changed = True
                break
    sounded = timeline.sounded()
    chords = [e.chord for _, e in sounded]
    keys = [timeline.key_at(e.start) for _, e in sounded]
    return [Segment(piece_id=timeline.id, index=k, start_event=a, end_event=b,
                    chords=tuple(chords[a:b]), keys=tuple(keys[a:b]))
            for k, (a, b) in enumerate(spans)]


def ssm_to_pgm(ssm: SSM) -> str:
    """ASCII PGM (P2), maxval 255, cell value rounded half-up."""
    n = ssm.size
    rows = np.floor(255.0 * ssm.matrix + 0.5).astype(int)
    lines = ["P2", f"{n} {n}", "255"]
    lines += [" ".join(str(x) for x in row) for row in rows]
    return "\n".join(lines) + "\n"


def novelty_to_csv(curve: NoveltyCurve) -> str:
    lines = ["index,value"]
    lines += [f"{i},{float(x)!r}" for i, x in enumerate(curve.values)]
    return "\n".join(lines) + "\n"


def boundaries_to_csv(boundaries: list[int]) -> str:
    return "\n".join(["boundary_index", *map(str, boundaries)]) + "\n"
