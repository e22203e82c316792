"""Shared domain types for the debate analytics engine.

Every type here is an immutable value object. Validation helpers return
structured errors instead of raising so that a corpus can be checked in
one pass.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Optional, Sequence

CategoryId = str

MIN_DURATION_S = 600.0
MAX_DURATION_S = 14400.0
FRAME_INTERVAL_S = 3.0


class Gender(str, enum.Enum):
    MALE = "male"
    FEMALE = "female"


@dataclass(frozen=True)
class VideoRecord:
    video_id: str
    title: str
    description: str
    tags: tuple[str, ...]
    duration_s: float
    published_at: datetime
    major_category: Optional[CategoryId] = None
    minor_categories: frozenset[CategoryId] = frozenset()


@dataclass(frozen=True)
class TranscriptSegment:
    video_id: str
    start_s: float
    end_s: float
    speaker: str
    text: str
    overlapped: bool = False

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class FaceObservation:
    video_id: str
    t_s: float
    x: float
    y: float
    w: float
    h: float
    gender: Gender
    confidence: float

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class PanelistCluster:
    cluster_id: str
    canonical_name: str
    variants: frozenset[str]
    occupation: Optional[str] = None
    affiliation: Optional[str] = None
    low_confidence: bool = False


@dataclass(frozen=True)
class VideoAnalysis:
    video_id: str
    overlap_fraction: float
    toxic_utterance_fraction: float
    has_toxic_speech: bool
    shouting_fraction: float
    shouting_segments: tuple[tuple[float, float], ...]
    male_face_seconds: float
    female_face_seconds: float
    panelists: frozenset[str] = frozenset()


@dataclass(frozen=True)
class ValidationError:
    field: str
    video_id: str
    reason: str


@dataclass(frozen=True)
class AdmissionBounds:
    """Inclusive duration window a video must fall in to be analysed."""

    min_duration_s: float = MIN_DURATION_S
    max_duration_s: float = MAX_DURATION_S


def validate_video(
    record: VideoRecord, segments: Sequence[TranscriptSegment]
) -> list[ValidationError]:
    """Check every invariant of a video and its transcript.

    The result is sorted, so it does not depend on the order in which the
    segments are passed.
    """
    vid = record.video_id
    errors: list[ValidationError] = []
    if not vid:
        errors.append(ValidationError("video_id", vid, "empty video id"))
    if not record.duration_s > 0:
        errors.append(ValidationError("duration_s", vid, "nonpositive duration"))
    if record.major_category is not None and record.major_category in record.minor_categories:
        errors.append(
            ValidationError("minor_categories", vid, "major category repeated among minors")
        )
    for seg in segments:
        where = f"segment {seg.start_s!r}-{seg.end_s!r}"
        if seg.video_id != vid:
            errors.append(ValidationError("video_id", vid, f"{where} belongs to {seg.video_id!r}"))
        if seg.start_s < 0:
            errors.append(ValidationError("start_s", vid, f"{where} negative start"))
        if not seg.start_s < seg.end_s:
            errors.append(ValidationError("end_s", vid, f"{where} inverted span"))
        if record.duration_s > 0 and seg.end_s > record.duration_s:
            errors.append(ValidationError("end_s", vid, f"{where} past video end"))
        if not seg.text and not seg.overlapped:
            errors.append(ValidationError("text", vid, f"{where} empty text"))
    return sorted(set(errors), key=lambda e: (e.field, e.reason))


def validate_faces(
    observations: Iterable[FaceObservation], frame_interval_s: float = FRAME_INTERVAL_S
) -> list[ValidationError]:
    errors = []
    for obs in observations:
        where = f"face at t={obs.t_s!r}"
        if not (obs.w > 0 and obs.h > 0):
            errors.append(ValidationError("w", obs.video_id, f"{where} empty box"))
        if not 0 <= obs.confidence <= 1:
            errors.append(ValidationError("confidence", obs.video_id, f"{where} out of range"))
        ratio = obs.t_s / frame_interval_s
        if abs(ratio - round(ratio)) > 1e-6:
            errors.append(ValidationError("t_s", obs.video_id, f"{where} off the sampling grid"))
    return sorted(set(errors), key=lambda e: (e.video_id, e.field, e.reason))


def admit_for_analysis(record: VideoRecord, bounds: AdmissionBounds = AdmissionBounds()) -> bool:
    return bounds.min_duration_s <= record.duration_s <= bounds.max_duration_s


def check_analysis(analysis: VideoAnalysis, duration_s: float) -> list[str]:
    """Return the violated VideoAnalysis invariants (empty when consistent)."""
    problems = []
    for name in ("overlap_fraction", "toxic_utterance_fraction", "shouting_fraction"):
        value = getattr(analysis, name)
        if not 0.0 <= value <= 1.0:
            problems.append(f"{name} outside [0, 1]")
    if analysis.has_toxic_speech != (analysis.toxic_utterance_fraction > 0):
        problems.append("has_toxic_speech disagrees with toxic fraction")
    prev_end = 0.0
    for start, end in analysis.shouting_segments:
        if start < prev_end or end <= start or end > duration_s:
            problems.append(f"shouting segment ({start}, {end}) misplaced")
        prev_end = end
    return problems


@dataclass(frozen=True)
class Span:
    """A labelled time span, as read from an RTTM file."""

    video_id: str
    start_s: float
    dur_s: float
    label: str

    @property
    def end_s(self) -> float:
        return self.start_s + self.dur_s


__all__ = [
    "AdmissionBounds",
    "CategoryId",
    "FaceObservation",
    "Gender",
    "PanelistCluster",
    "Span",
    "TranscriptSegment",
    "ValidationError",
    "VideoAnalysis",
    "VideoRecord",
    "admit_for_analysis",
    "check_analysis",
    "validate_faces",
    "validate_video",
]
