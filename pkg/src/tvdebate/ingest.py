"""Parsers and writers for the canonical per-video artifact files.

Layout of a corpus directory::

    <root>/<video_id>/metadata.json
                      transcript.jsonl
                      diarization.rttm
                      overlap.rttm
                      faces.csv
                      ocr.jsonl
                      names.jsonl
                      audio.wav

All parsers take raw bytes and either return typed values or raise
:class:`IngestError`; no other exception escapes them.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import unicodedata
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .model import FaceObservation, Gender, Span, TranscriptSegment, VideoRecord

log = logging.getLogger(__name__)

ARTIFACTS = {
    "metadata": "metadata.json",
    "transcript": "transcript.jsonl",
    "diarization": "diarization.rttm",
    "overlap": "overlap.rttm",
    "faces": "faces.csv",
    "ocr": "ocr.jsonl",
    "names": "names.jsonl",
    "audio": "audio.wav",
}

FACE_HEADER = ["video_id", "t_s", "x", "y", "w", "h", "gender", "confidence"]

GENDER_TOKENS = {
    "male": Gender.MALE,
    "m": Gender.MALE,
    "man": Gender.MALE,
    "female": Gender.FEMALE,
    "f": Gender.FEMALE,
    "woman": Gender.FEMALE,
}

RTTM_TYPES = ("SPEAKER", "OVERLAP")

OVERLAP_MIN_INTERSECTION_S = 0.5


class IngestError(ValueError):
    """A structured parse failure.

    ``kind`` is one of: malformed-json, missing-field, type-mismatch,
    malformed-line, inverted-span, malformed-rttm, wrong-type-field,
    malformed-row, unknown-gender, missing-artifact.
    """

    def __init__(self, kind: str, detail: str = "", *, line_no: Optional[int] = None,
                 field: Optional[str] = None):
        self.kind = kind
        self.line_no = line_no
        self.field = field
        where = f" (line {line_no})" if line_no is not None else ""
        what = f" [{field}]" if field else ""
        super().__init__(f"{kind}{what}{where}: {detail}" if detail else f"{kind}{what}{where}")


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def _decode(data: bytes, kind: str) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise IngestError(kind, f"not UTF-8: {exc}") from None


def _number(value, name: str, line_no: Optional[int] = None, kind: str = "type-mismatch") -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise IngestError(kind, f"expected a number, got {value!r}", line_no=line_no, field=name)
    try:
        out = float(value)
    except OverflowError:
        out = math.inf
    if not math.isfinite(out):
        raise IngestError(kind, f"non-finite {value!r}", line_no=line_no, field=name)
    return out


def _text(value, name: str, line_no: Optional[int] = None, kind: str = "type-mismatch") -> str:
    if not isinstance(value, str):
        raise IngestError(kind, f"expected text, got {value!r}", line_no=line_no, field=name)
    return nfc(value)


def parse_timestamp(value: str) -> datetime:
    if value.endswith("Z"):
        value = value[:-1] + "+00:00"
    stamp = datetime.fromisoformat(value)
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp.astimezone(timezone.utc)


def format_timestamp(stamp: datetime) -> str:
    return stamp.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ").replace(".000000Z", "Z")


# -- metadata ---------------------------------------------------------------

METADATA_FIELDS = ("id", "title", "description", "tags", "duration_s", "published_at")


def parse_metadata(data: bytes) -> VideoRecord:
    try:
        doc = json.loads(_decode(data, "malformed-json"))
    except json.JSONDecodeError as exc:
        raise IngestError("malformed-json", str(exc)) from None
    if not isinstance(doc, dict):
        raise IngestError("malformed-json", "top level must be an object")
    for name in METADATA_FIELDS:
        if name not in doc:
            raise IngestError("missing-field", field=name)
    tags = doc["tags"]
    if not isinstance(tags, list):
        raise IngestError("type-mismatch", "expected a list", field="tags")
    published = _text(doc["published_at"], "published_at")
    try:
        published_at = parse_timestamp(published)
    except ValueError:
        raise IngestError("type-mismatch", f"bad timestamp {published!r}", field="published_at") from None
    return VideoRecord(
        video_id=_text(doc["id"], "id"),
        title=_text(doc["title"], "title"),
        description=_text(doc["description"], "description"),
        tags=tuple(_text(t, "tags") for t in tags),
        duration_s=_number(doc["duration_s"], "duration_s"),
        published_at=published_at,
    )


def dump_metadata(record: VideoRecord) -> bytes:
    doc = {
        "id": record.video_id,
        "title": record.title,
        "description": record.description,
        "tags": list(record.tags),
        "duration_s": record.duration_s,
        "published_at": format_timestamp(record.published_at),
    }
    return (json.dumps(doc, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


# -- JSON lines helpers -------------------------------------------------------


def _json_lines(data: bytes, kind: str) -> Iterable[tuple[int, dict]]:
    text = _decode(data, kind)
    # splitlines() would also break on U+0085/U+2028 inside JSON strings
    for line_no, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(kind, str(exc), line_no=line_no) from None
        if not isinstance(obj, dict):
            raise IngestError(kind, "line is not an object", line_no=line_no)
        yield line_no, obj


def _require(obj: dict, names: Sequence[str], line_no: int, kind: str) -> None:
    for name in names:
        if name not in obj:
            raise IngestError(kind, "missing field", line_no=line_no, field=name)


def _dump_lines(rows: Iterable[dict]) -> bytes:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows).encode("utf-8")


# -- transcript ---------------------------------------------------------------


def parse_transcript(data: bytes) -> list[TranscriptSegment]:
    segments = []
    for line_no, obj in _json_lines(data, "malformed-line"):
        _require(obj, ("video_id", "start_s", "end_s", "speaker", "text"), line_no, "malformed-line")
        start = _number(obj["start_s"], "start_s", line_no, "malformed-line")
        end = _number(obj["end_s"], "end_s", line_no, "malformed-line")
        if end < start:
            raise IngestError("inverted-span", f"{start} > {end}", line_no=line_no)
        segments.append(
            TranscriptSegment(
                video_id=_text(obj["video_id"], "video_id", line_no, "malformed-line"),
                start_s=start,
                end_s=end,
                speaker=_text(obj["speaker"], "speaker", line_no, "malformed-line"),
                text=_text(obj["text"], "text", line_no, "malformed-line"),
            )
        )
    segments.sort(key=lambda s: s.start_s)
    return segments


def dump_transcript(segments: Iterable[TranscriptSegment]) -> bytes:
    return _dump_lines(
        {"video_id": s.video_id, "start_s": s.start_s, "end_s": s.end_s,
         "speaker": s.speaker, "text": s.text}
        for s in segments
    )


# -- RTTM -----------------------------------------------------------------------


def parse_rttm(data: bytes, expected_label_class: str = "SPEAKER") -> list[Span]:
    """Read a 10-field RTTM file.

    Lines starting with ``;;`` are comments. Spans whose duration is not
    positive are dropped with a warning.
    """
    if expected_label_class not in RTTM_TYPES:
        raise ValueError(f"expected_label_class must be one of {RTTM_TYPES}")
    spans = []
    text = _decode(data, "malformed-rttm")
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(";;"):
            continue
        parts = stripped.split()
        if len(parts) != 10:
            raise IngestError("malformed-rttm", f"expected 10 fields, got {len(parts)}", line_no=line_no)
        if parts[0] != expected_label_class:
            raise IngestError("wrong-type-field", f"{parts[0]!r} != {expected_label_class!r}",
                              line_no=line_no)
        try:
            tbeg, tdur = float(parts[3]), float(parts[4])
        except ValueError:
            raise IngestError("malformed-rttm", "non-numeric onset/duration", line_no=line_no) from None
        if not (math.isfinite(tbeg) and math.isfinite(tdur)):
            raise IngestError("malformed-rttm", "non-finite onset/duration", line_no=line_no)
        if tdur <= 0:
            log.warning("rttm line %d: dropping span with duration %s", line_no, tdur)
            continue
        spans.append(Span(nfc(parts[1]), tbeg, tdur, nfc(parts[7])))
    return spans


def dump_rttm(spans: Iterable[Span], label_class: str = "SPEAKER") -> bytes:
    return "".join(
        f"{label_class} {s.video_id} 1 {s.start_s!r} {s.dur_s!r} <NA> <NA> {s.label} <NA> <NA>\n"
        for s in spans
    ).encode("utf-8")


def mark_overlap(
    segments: Sequence[TranscriptSegment],
    overlap_spans: Sequence[Span],
    min_intersection_s: float = OVERLAP_MIN_INTERSECTION_S,
) -> list[TranscriptSegment]:
    """Flag segments whose span intersects some overlap span by more than the threshold."""
    out = []
    for seg in segments:
        hit = any(
            min(seg.end_s, span.end_s) - max(seg.start_s, span.start_s) > min_intersection_s
            for span in overlap_spans
        )
        out.append(TranscriptSegment(seg.video_id, seg.start_s, seg.end_s, seg.speaker, seg.text, hit))
    return out


# -- faces ------------------------------------------------------------------------


def parse_gender(token: str, line_no: Optional[int] = None) -> Gender:
    try:
        return GENDER_TOKENS[token.strip().lower()]
    except KeyError:
        raise IngestError("unknown-gender", repr(token), line_no=line_no) from None


def parse_faces(data: bytes) -> list[FaceObservation]:
    text = _decode(data, "malformed-row")
    reader = csv.reader(io.StringIO(text, newline=""))
    rows = []
    header_seen = False
    line_no = 0
    while True:
        try:
            row = next(reader)
        except StopIteration:
            break
        except csv.Error as exc:
            raise IngestError("malformed-row", str(exc), line_no=reader.line_num) from None
        line_no = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if not header_seen:
            if [c.strip() for c in row] != FACE_HEADER:
                raise IngestError("malformed-row", f"bad header {row!r}", line_no=line_no)
            header_seen = True
            continue
        if len(row) != len(FACE_HEADER):
            raise IngestError("malformed-row", f"expected {len(FACE_HEADER)} columns", line_no=line_no)
        gender = parse_gender(row[6], line_no)
        try:
            t_s, x, y, w, h, conf = (float(row[i]) for i in (1, 2, 3, 4, 5, 7))
        except ValueError:
            raise IngestError("malformed-row", "non-numeric column", line_no=line_no) from None
        if not all(math.isfinite(v) for v in (t_s, x, y, w, h, conf)):
            raise IngestError("malformed-row", "non-finite column", line_no=line_no)
        rows.append(FaceObservation(nfc(row[0].strip()), t_s, x, y, w, h, gender, conf))
    return rows


def dump_faces(observations: Iterable[FaceObservation]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FACE_HEADER)
    for o in observations:
        writer.writerow([o.video_id, repr(o.t_s), repr(o.x), repr(o.y), repr(o.w), repr(o.h),
                         o.gender.value, repr(o.confidence)])
    return buf.getvalue().encode("utf-8")


# -- OCR and name candidates -----------------------------------------------------


@dataclass(frozen=True)
class OcrRow:
    video_id: str
    t_s: float
    text: str


@dataclass(frozen=True)
class NameCandidates:
    video_id: str
    candidates: tuple[str, ...]


def parse_ocr(data: bytes) -> list[OcrRow]:
    rows = []
    for line_no, obj in _json_lines(data, "malformed-row"):
        _require(obj, ("video_id", "t_s", "text"), line_no, "malformed-row")
        rows.append(OcrRow(
            _text(obj["video_id"], "video_id", line_no, "malformed-row"),
            _number(obj["t_s"], "t_s", line_no, "malformed-row"),
            _text(obj["text"], "text", line_no, "malformed-row"),
        ))
    return rows


def dump_ocr(rows: Iterable[OcrRow]) -> bytes:
    return _dump_lines({"video_id": r.video_id, "t_s": r.t_s, "text": r.text} for r in rows)


def parse_name_candidates(data: bytes) -> list[NameCandidates]:
    rows = []
    for line_no, obj in _json_lines(data, "malformed-row"):
        _require(obj, ("video_id", "candidates"), line_no, "malformed-row")
        cands = obj["candidates"]
        if not isinstance(cands, list):
            raise IngestError("malformed-row", "candidates must be a list", line_no=line_no,
                              field="candidates")
        rows.append(NameCandidates(
            _text(obj["video_id"], "video_id", line_no, "malformed-row"),
            tuple(_text(c, "candidates", line_no, "malformed-row") for c in cands),
        ))
    return rows


def dump_name_candidates(rows: Iterable[NameCandidates]) -> bytes:
    return _dump_lines({"video_id": r.video_id, "candidates": list(r.candidates)} for r in rows)


# -- corpus manifest ----------------------------------------------------------------


@dataclass
class CorpusManifest:
    """Where each video's artifacts live.

    Only ``metadata`` is mandatory for a video; the other artifacts are
    optional and the corresponding metric is skipped when absent.
    """

    root: Path
    videos: dict[str, dict[str, Path]] = field(default_factory=dict)

    @classmethod
    def from_directory(cls, root: Path | str) -> "CorpusManifest":
        root = Path(root)
        if not root.is_dir():
            raise IngestError("missing-artifact", f"corpus root {root} is not a directory")
        videos = {}
        for sub in sorted(p for p in root.iterdir() if p.is_dir()):
            if not (sub / ARTIFACTS["metadata"]).is_file():
                continue
            videos[sub.name] = {
                key: sub / name for key, name in ARTIFACTS.items() if (sub / name).is_file()
            }
        return cls(root, videos)

    @classmethod
    def from_json(cls, path: Path | str) -> "CorpusManifest":
        """Load ``{"root": ..., "videos": {id: {artifact: relative path}}}``."""
        path = Path(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise IngestError("malformed-json", f"{path}: {exc}") from None
        root = (path.parent / doc.get("root", ".")).resolve()
        videos = {
            vid: {key: root / rel for key, rel in arts.items()}
            for vid, arts in sorted(doc.get("videos", {}).items())
        }
        manifest = cls(root, videos)
        manifest.check()
        return manifest

    def check(self) -> None:
        for vid, arts in self.videos.items():
            if "metadata" not in arts:
                raise IngestError("missing-artifact", f"{vid} has no metadata", field="metadata")
            for key, p in arts.items():
                if key not in ARTIFACTS:
                    raise IngestError("missing-artifact", f"{vid}: unknown artifact {key!r}")
                if not p.is_file():
                    raise IngestError("missing-artifact", f"{vid}: {p} does not exist", field=key)

    def path(self, video_id: str, artifact: str) -> Optional[Path]:
        return self.videos.get(video_id, {}).get(artifact)

    def read(self, video_id: str, artifact: str) -> Optional[bytes]:
        p = self.path(video_id, artifact)
        return None if p is None else p.read_bytes()
