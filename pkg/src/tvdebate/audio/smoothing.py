"""Majority-vote smoothing of per-second labels and time-fraction metrics."""
from __future__ import annotations

import math
from typing import Iterable, Sequence

from ..model import TranscriptSegment


class ZeroDurationError(ValueError):
    pass


def vote_labels(labels: Sequence[int], window: int = 5, min_votes: int = 3) -> list[int]:
    """Relabel each second by a vote over the centered window.

    Near the edges the window is truncated to ``s`` seconds and the vote
    requirement shrinks proportionally to ``ceil(min_votes * s / window)``.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be a positive odd integer")
    if not 1 <= min_votes <= window:
        raise ValueError("min_votes must be in [1, window]")
    n = len(labels)
    half = window // 2
    prefix = [0]
    for v in labels:
        prefix.append(prefix[-1] + (1 if v else 0))
    out = []
    for i in range(n):
        lo, hi = max(0, i - half), min(n, i + half + 1)
        size = hi - lo
        need = min_votes if size == window else math.ceil(min_votes * size / window)
        out.append(1 if prefix[hi] - prefix[lo] >= need else 0)
    return out


def runs(labels: Sequence[int], step_s: float = 1.0) -> list[tuple[float, float]]:
    """Maximal runs of positive labels as (start_s, end_s)."""
    segs = []
    start = None
    for i, v in enumerate(labels):
        if v and start is None:
            start = i
        elif not v and start is not None:
            segs.append((start * step_s, i * step_s))
            start = None
    if start is not None:
        segs.append((start * step_s, len(labels) * step_s))
    return segs


def smooth_segments(per_second_labels: Sequence[int], window: int = 5, min_votes: int = 3) -> list[tuple[float, float]]:
    return runs(vote_labels(per_second_labels, window, min_votes))


def shouting_fraction(segments: Iterable[tuple[float, float]], duration_s: float) -> float:
    if not duration_s > 0:
        raise ZeroDurationError("zero-duration")
    return math.fsum(end - start for start, end in segments) / duration_s


def overlap_fraction(segments: Iterable[TranscriptSegment]) -> float:
    """Overlapped speech time over total speech time (0.0 without speech).

    Sums are exactly rounded so the result does not depend on segment order.
    """
    segs = list(segments)
    total = math.fsum(s.duration_s for s in segs)
    if total <= 0:
        return 0.0
    return math.fsum(s.duration_s for s in segs if s.overlapped) / total
