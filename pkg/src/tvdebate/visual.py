"""Gender representation metrics from sampled face detections."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .model import FRAME_INTERVAL_S, FaceObservation, Gender, VideoRecord


@dataclass(frozen=True)
class FaceFilter:
    min_confidence: float = 0.90
    min_area_px: float = 1600.0

    def __post_init__(self):
        if self.min_confidence < 0 or self.min_area_px < 0:
            raise ValueError("face filter thresholds must be nonnegative")


def filter_faces(observations: Iterable[FaceObservation], flt: FaceFilter = FaceFilter()) -> list[FaceObservation]:
    return [o for o in observations if o.confidence >= flt.min_confidence and o.w * o.h >= flt.min_area_px]


@dataclass(frozen=True)
class ScreenTime:
    male_face_seconds: float
    female_face_seconds: float

    @property
    def female_share(self) -> Optional[float]:
        total = self.male_face_seconds + self.female_face_seconds
        return self.female_face_seconds / total if total > 0 else None


def screen_time(observations: Iterable[FaceObservation], frame_interval_s: float = FRAME_INTERVAL_S) -> ScreenTime:
    male = female = 0
    for o in observations:
        if o.gender is Gender.MALE:
            male += 1
        else:
            female += 1
    return ScreenTime(male * frame_interval_s, female * frame_interval_s)


def face_area_stats(observations: Iterable[FaceObservation]) -> dict[Gender, float]:
    """Mean face box area per gender (genders without faces are absent)."""
    areas: dict[Gender, list[float]] = defaultdict(list)
    for o in observations:
        areas[o.gender].append(o.area)
    return {g: math.fsum(v) / len(v) for g, v in areas.items()}


def sampled_frames(duration_s: float, frame_interval_s: float = FRAME_INTERVAL_S) -> int:
    """Frames sampled at t = 0, interval, 2*interval, ... strictly before the end."""
    return int(math.ceil(duration_s / frame_interval_s))


def monthly_gender_series(observations: Iterable[FaceObservation], metadata: Mapping[str, VideoRecord],
                          frame_interval_s: float = FRAME_INTERVAL_S,
                          frames: Optional[Mapping[str, int]] = None) -> dict[str, tuple[float, float]]:
    """Per ``YYYY-MM``: (male, female) faces per sampled frame, pooled over videos.

    ``frames`` overrides the per-video sampled-frame count, which otherwise
    follows from the video duration.
    """
    obs_by_video: dict[str, list[int]] = defaultdict(lambda: [0, 0])
    for o in observations:
        obs_by_video[o.video_id][0 if o.gender is Gender.MALE else 1] += 1
    totals: dict[str, list[int]] = defaultdict(lambda: [0, 0, 0])
    for vid, rec in metadata.items():
        month = rec.published_at.strftime("%Y-%m")
        n = frames[vid] if frames is not None else sampled_frames(rec.duration_s, frame_interval_s)
        male, female = obs_by_video.get(vid, (0, 0))
        t = totals[month]
        t[0] += male
        t[1] += female
        t[2] += n
    return {m: (t[0] / t[2], t[1] / t[2]) for m, t in sorted(totals.items()) if t[2] > 0}
