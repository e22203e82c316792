"""Corpus-wide analysis run: config, per-video fan-out and a resumable result store."""
from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional, Sequence

from . import __version__
from .audio import MfccConfig, ShoutModel, audio_blocks, read_wav, shouting_fraction, smooth_segments
from .audio.smoothing import overlap_fraction
from .bias import BiasCorpusConfig, PartyTable, build_corpus, extract_hashtags
from .categorize import PriorityLadder, TagMap, categorize, load_suggestions
from .container import atomic_write
from .entity import (
    DEFAULT_FUZZY_THRESHOLD,
    attach_roster,
    cluster_names,
    dump_clusters,
    load_roster,
    name_index,
    normalize_candidates,
)
from .ingest import (
    CorpusManifest,
    IngestError,
    mark_overlap,
    parse_faces,
    parse_metadata,
    parse_name_candidates,
    parse_ocr,
    parse_rttm,
    parse_transcript,
)
from .model import (
    AdmissionBounds,
    FRAME_INTERVAL_S,
    Gender,
    VideoAnalysis,
    admit_for_analysis,
    check_analysis,
    validate_faces,
    validate_video,
)
from .network import shouters_per_video
from .toxicity import LexiconScorer, RemoteScorer, video_toxicity
from .visual import FaceFilter, filter_faces, sampled_frames, screen_time

log = logging.getLogger(__name__)

RECORDS_DIR = "videos"
MANIFEST_FILE = "manifest.jsonl"
CONFIG_FILE = "config.json"
CLUSTERS_FILE = "clusters.jsonl"


class ConfigError(ValueError):
    """Invalid configuration or unusable corpus (CLI exit code 2)."""


# -- configuration --------------------------------------------------------------------

_ENV_REF = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}")

PATH_KEYS = {
    ("corpus_root",), ("corpus_manifest",), ("output_dir",), ("shout_model",), ("roster",),
    ("tagmap",), ("priority",), ("suggestions",), ("party_table",),
    ("toxicity", "lexicon"), ("toxicity", "cache"),
    ("bias", "keywords"), ("bias", "model"), ("bias", "stopwords"),
}

DEFAULTS: dict[str, Any] = {
    "corpus_manifest": None,
    "jobs": 1,
    "seed": 0,
    "admission": {"min_duration_s": 600.0, "max_duration_s": 14400.0},
    "mfcc": {},
    "smoothing": {"window": 5, "min_votes": 3},
    "face_filter": {"min_confidence": 0.90, "min_area_px": 1600.0},
    "frame_interval_s": FRAME_INTERVAL_S,
    "overlap_min_intersection_s": 0.5,
    "entity": {"fuzzy_threshold": DEFAULT_FUZZY_THRESHOLD, "use_phonetic": True},
    "roster": None,
    "tagmap": None,
    "priority": None,
    "suggestions": None,
    "party_table": None,
    "toxicity": {"mode": "lexicon", "lexicon": None, "threshold": 0.5},
    "bias": {"keywords": None, "model": None, "stopwords": None, "min_freq": 50, "ig_steps": 256},
    "triads": {"min_freq": 50, "per_combination": False},
}


def interpolate_env(value, environ=None):
    """Replace ``${VAR}`` references in every string of a JSON value."""
    environ = os.environ if environ is None else environ
    if isinstance(value, str):
        def sub(m):
            if m.group(1) not in environ:
                raise ConfigError(f"config-invalid: environment variable {m.group(1)} is not set")
            return environ[m.group(1)]
        return _ENV_REF.sub(sub, value)
    if isinstance(value, list):
        return [interpolate_env(v, environ) for v in value]
    if isinstance(value, dict):
        return {k: interpolate_env(v, environ) for k, v in value.items()}
    return value


def _merge(defaults: dict, given: dict) -> dict:
    out = dict(defaults)
    for k, v in given.items():
        out[k] = _merge(defaults[k], v) if isinstance(defaults.get(k), dict) and isinstance(v, dict) else v
    return out


def _get(d: dict, key: tuple):
    for k in key[:-1]:
        d = d.get(k) or {}
    return d.get(key[-1])


def _set(d: dict, key: tuple, value) -> None:
    for k in key[:-1]:
        d = d.setdefault(k, {})
    d[key[-1]] = value


@dataclass
class PipelineConfig:
    raw: dict
    base_dir: Path = field(default_factory=Path.cwd)

    @classmethod
    def from_dict(cls, doc: dict, base_dir: Path | str = ".", environ=None) -> "PipelineConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config-invalid: top level must be an object")
        unknown = set(doc) - set(DEFAULTS) - {"corpus_root", "output_dir", "shout_model"}
        if unknown:
            raise ConfigError(f"config-invalid: unknown keys {sorted(unknown)}")
        merged = _merge(DEFAULTS, interpolate_env(doc, environ))
        base = Path(base_dir).resolve()
        for key in PATH_KEYS:
            value = _get(merged, key)
            if value is not None:
                _set(merged, key, str((base / value).resolve()))
        cfg = cls(merged, base)
        cfg.check()
        return cfg

    @classmethod
    def load(cls, path: Path | str, environ=None) -> "PipelineConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config-invalid: {exc}") from None
        return cls.from_dict(doc, path.parent, environ)

    def check(self) -> None:
        r = self.raw
        for key in ("corpus_root", "output_dir", "shout_model"):
            if not r.get(key):
                raise ConfigError(f"config-invalid: {key} is required")
        if int(r["jobs"]) < 1:
            raise ConfigError("config-invalid: jobs must be >= 1")
        for key in PATH_KEYS - {("output_dir",), ("toxicity", "cache")}:
            value = _get(r, key)
            if value is not None and not Path(value).exists():
                raise ConfigError(f"config-invalid: {'.'.join(key)} -> {value} does not exist")
        mode = r["toxicity"].get("mode")
        if mode == "lexicon" and not r["toxicity"].get("lexicon"):
            raise ConfigError("config-invalid: lexicon toxicity mode needs toxicity.lexicon")
        if mode == "remote" and not r["toxicity"].get("endpoint"):
            raise ConfigError("config-invalid: remote toxicity mode needs toxicity.endpoint")
        if mode not in ("lexicon", "remote"):
            raise ConfigError(f"config-invalid: unknown toxicity mode {mode!r}")

    def __getitem__(self, key):
        return self.raw[key]

    @property
    def output_dir(self) -> Path:
        return Path(self.raw["output_dir"])

    def config_hash(self) -> str:
        """Digest of every setting that changes results, plus referenced file contents.

        ``jobs``, the output location and secrets are left out.
        """
        doc = json.loads(json.dumps(self.raw))
        doc.pop("jobs", None)
        doc.pop("output_dir", None)
        doc["toxicity"].pop("api_key", None)
        h = hashlib.sha256(json.dumps(doc, sort_keys=True).encode("utf-8"))
        for key in sorted(PATH_KEYS):
            if key in {("corpus_root",), ("output_dir",), ("corpus_manifest",), ("toxicity", "cache")}:
                continue
            value = _get(self.raw, key)
            if value is not None and Path(value).is_file():
                h.update(hashlib.sha256(Path(value).read_bytes()).digest())
        return h.hexdigest()

    def public(self) -> dict:
        doc = json.loads(json.dumps(self.raw))
        doc["toxicity"].pop("api_key", None)
        return doc


# -- shared, read-only resources --------------------------------------------------------


@dataclass
class Resources:
    manifest: CorpusManifest
    ladder: PriorityLadder
    tagmap: TagMap
    suggestions: dict
    shout_model: ShoutModel
    mfcc: MfccConfig
    scorer: Any
    bias_cfg: BiasCorpusConfig
    parties: PartyTable
    face_filter: FaceFilter
    bounds: AdmissionBounds
    names: dict = field(default_factory=dict)       # normalized name -> cluster id
    clusters: dict = field(default_factory=dict)    # cluster id -> PanelistCluster


def load_resources(cfg: PipelineConfig) -> Resources:
    r = cfg.raw
    try:
        manifest = (CorpusManifest.from_json(r["corpus_manifest"]) if r["corpus_manifest"]
                    else CorpusManifest.from_directory(r["corpus_root"]))
    except IngestError as exc:
        raise ConfigError(f"corpus unusable: {exc}") from None
    ladder = PriorityLadder.load(r["priority"])
    tagmap = TagMap.load(r["tagmap"])
    tagmap.check(ladder)
    tox = r["toxicity"]
    if tox["mode"] == "lexicon":
        scorer = LexiconScorer.from_file(tox["lexicon"])
    else:
        scorer = RemoteScorer(tox["endpoint"], cache_path=tox.get("cache"), api_key=tox.get("api_key"),
                              max_in_flight=int(tox.get("max_in_flight", 4)))
    try:
        shout = ShoutModel.load(r["shout_model"])
    except (OSError, ValueError) as exc:
        raise ConfigError(f"config-invalid: shout model unreadable: {exc}") from None
    return Resources(
        manifest=manifest,
        ladder=ladder,
        tagmap=tagmap,
        suggestions=load_suggestions(r["suggestions"]) if r["suggestions"] else {},
        shout_model=shout,
        mfcc=MfccConfig(**r["mfcc"]),
        scorer=scorer,
        bias_cfg=BiasCorpusConfig.load(r["bias"]["keywords"]),
        parties=PartyTable.load(r["party_table"]),
        face_filter=FaceFilter(**r["face_filter"]),
        bounds=AdmissionBounds(**r["admission"]),
    )


# -- per-video work -----------------------------------------------------------------------


def analyze_video(video_id: str, cfg: PipelineConfig, res: Resources) -> dict:
    """Compute the stored record of one admitted video (raises on failure)."""
    r = cfg.raw
    m = res.manifest
    record = parse_metadata(m.read(video_id, "metadata"))
    record = categorize(record, res.tagmap, res.ladder, res.suggestions.get(video_id, ()))
    out: dict[str, Any] = {
        "video_id": video_id,
        "published_at": record.published_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
        "duration_s": record.duration_s,
        "major_category": record.major_category,
        "minor_categories": sorted(record.minor_categories),
    }

    segments = None
    if m.path(video_id, "transcript"):
        segments = parse_transcript(m.read(video_id, "transcript"))
        spans = parse_rttm(m.read(video_id, "overlap"), "OVERLAP") if m.path(video_id, "overlap") else []
        segments = mark_overlap(segments, spans, r["overlap_min_intersection_s"])
        problems = validate_video(record, segments)
        if problems:
            raise ValueError("; ".join(f"{e.field}: {e.reason}" for e in problems))
        out["overlap_fraction"] = overlap_fraction(segments)
        frac, flag = video_toxicity(segments, res.scorer, r["toxicity"]["threshold"])
        out["toxic_utterance_fraction"] = frac
        out["has_toxic_speech"] = flag
        out["utterances"] = sum(1 for s in segments if s.text.strip())
        out["bias_sentences"] = [list(row) for row in build_corpus(segments, res.bias_cfg)]
    else:
        out.update(overlap_fraction=None, toxic_utterance_fraction=None, has_toxic_speech=None,
                   utterances=None, bias_sentences=[])

    if m.path(video_id, "audio"):
        samples = read_wav(m.path(video_id, "audio"), res.mfcc.sample_rate_hz)
        blocks = audio_blocks(samples, video_id, res.mfcc)
        labels = (res.shout_model.predict_proba(blocks) >= 0.5).astype(int).tolist() if len(blocks) else []
        sm = r["smoothing"]
        segs = [(s, min(e, record.duration_s)) for s, e in smooth_segments(labels, sm["window"], sm["min_votes"])
                if s < record.duration_s]
        out["shout_labels"] = labels
        out["shouting_segments"] = [list(s) for s in segs]
        out["shouting_fraction"] = shouting_fraction(segs, record.duration_s)
        out["shouters"] = shouters_per_video(segs, segments) if segments is not None else None
    else:
        out.update(shout_labels=None, shouting_segments=None, shouting_fraction=None, shouters=None)

    if m.path(video_id, "faces"):
        faces = parse_faces(m.read(video_id, "faces"))
        problems = validate_faces(faces, r["frame_interval_s"])
        if problems:
            raise ValueError("; ".join(f"{e.field}: {e.reason}" for e in problems))
        kept = filter_faces(faces, res.face_filter)
        st = screen_time(kept, r["frame_interval_s"])
        out["faces"] = {
            "sampled_frames": sampled_frames(record.duration_s, r["frame_interval_s"]),
            "male_observations": sum(1 for f in kept if f.gender is Gender.MALE),
            "female_observations": sum(1 for f in kept if f.gender is Gender.FEMALE),
            "male_areas": [f.area for f in kept if f.gender is Gender.MALE],
            "female_areas": [f.area for f in kept if f.gender is Gender.FEMALE],
        }
        out["male_face_seconds"] = st.male_face_seconds
        out["female_face_seconds"] = st.female_face_seconds
    else:
        out.update(faces=None, male_face_seconds=None, female_face_seconds=None)

    panel = []
    if m.path(video_id, "names"):
        for row in normalize_candidates((c.video_id, c.candidates) for c in parse_name_candidates(m.read(video_id, "names"))):
            panel.extend(res.names[n] for n in row[1] if n in res.names)
    panel = sorted(set(panel))
    out["panelists"] = [{"cluster_id": cid, "affiliation": res.clusters[cid].affiliation} for cid in panel]

    out["hashtags"] = (extract_hashtags(parse_ocr(m.read(video_id, "ocr"))).get(video_id, [])
                       if m.path(video_id, "ocr") else [])

    if None not in (out["overlap_fraction"], out["shouting_fraction"], out["male_face_seconds"]):
        analysis = VideoAnalysis(
            video_id, out["overlap_fraction"], out["toxic_utterance_fraction"], out["has_toxic_speech"],
            out["shouting_fraction"], tuple(map(tuple, out["shouting_segments"])),
            out["male_face_seconds"], out["female_face_seconds"], frozenset(panel),
        )
        problems = check_analysis(analysis, record.duration_s)
        if problems:
            raise ValueError("; ".join(problems))
    return out


# -- result store ---------------------------------------------------------------------------


class ResultStore:
    def __init__(self, root: Path | str):
        self.root = Path(root)

    @property
    def records_dir(self) -> Path:
        return self.root / RECORDS_DIR

    def record_path(self, video_id: str) -> Path:
        return self.records_dir / f"{video_id}.json"

    def read(self, video_id: str) -> Optional[dict]:
        p = self.record_path(video_id)
        if not p.is_file():
            return None
        try:
            return json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            return None

    def write(self, record: dict) -> None:
        data = json.dumps(record, sort_keys=True, indent=1, ensure_ascii=False) + "\n"
        atomic_write(self.record_path(record["video_id"]), data.encode("utf-8"))

    def records(self) -> list[dict]:
        if not self.records_dir.is_dir():
            return []
        out = []
        for p in sorted(self.records_dir.glob("*.json")):
            rec = json.loads(p.read_text(encoding="utf-8"))
            out.append(rec)
        return out

    def append_manifest(self, entry: dict) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        with open(self.root / MANIFEST_FILE, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")

    def config(self) -> dict:
        return json.loads((self.root / CONFIG_FILE).read_text(encoding="utf-8"))

    def clusters_blob(self) -> bytes:
        p = self.root / CLUSTERS_FILE
        return p.read_bytes() if p.is_file() else b""


@dataclass
class RunSummary:
    completed: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)
    failed: list[str] = field(default_factory=list)
    rejected: list[str] = field(default_factory=list)


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def resolve_panelists(cfg: PipelineConfig, res: Resources, video_ids: Sequence[str]) -> list:
    """Corpus-level name clustering (sequential by design), then roster join."""
    candidates = []
    for vid in video_ids:
        blob = res.manifest.read(vid, "names")
        if blob is None:
            continue
        try:
            rows = parse_name_candidates(blob)
        except IngestError as exc:
            log.warning("video=%s stage=names outcome=skipped error=%s", vid, exc)
            continue
        candidates.extend(normalize_candidates((r.video_id, r.candidates) for r in rows))
    ent = cfg["entity"]
    clusters = cluster_names(candidates, int(ent["fuzzy_threshold"]), bool(ent["use_phonetic"]))
    if cfg["roster"]:
        clusters, unmatched = attach_roster(clusters, load_roster(cfg["roster"]))
        for row in unmatched:
            log.warning("roster row %r matched no cluster", row.canonical_name)
    res.names = name_index(clusters)
    res.clusters = {c.cluster_id: c for c in clusters}
    return clusters


def analyze(cfg: PipelineConfig, videos: Optional[Sequence[str]] = None,
            jobs: Optional[int] = None) -> RunSummary:
    res = load_resources(cfg)
    ids = sorted(res.manifest.videos)
    if videos:
        missing = sorted(set(videos) - set(ids))
        if missing:
            raise ConfigError(f"unknown videos requested: {missing}")
        ids = sorted(set(videos))
    if not ids:
        raise ConfigError("corpus-empty")
    store = ResultStore(cfg.output_dir)
    store.root.mkdir(parents=True, exist_ok=True)
    atomic_write(store.root / CONFIG_FILE,
                 (json.dumps(cfg.public(), sort_keys=True, indent=1) + "\n").encode("utf-8"))
    chash = cfg.config_hash()
    started = _now()
    summary = RunSummary()

    admitted = []
    for vid in ids:
        try:
            rec = parse_metadata(res.manifest.read(vid, "metadata"))
        except IngestError as exc:
            log.error("video=%s stage=metadata outcome=failed error=%s", vid, exc)
            store.write({"video_id": vid, "status": "failed", "config_hash": chash, "error": str(exc)})
            summary.failed.append(vid)
            continue
        if admit_for_analysis(rec, res.bounds):
            admitted.append(vid)
        else:
            summary.rejected.append(vid)
            log.info("video=%s stage=admission outcome=rejected duration=%s", vid, rec.duration_s)

    clusters = resolve_panelists(cfg, res, admitted)
    atomic_write(store.root / CLUSTERS_FILE, dump_clusters(clusters))

    todo = []
    for vid in admitted:
        prev = store.read(vid)
        if prev and prev.get("status") == "ok" and prev.get("config_hash") == chash:
            summary.skipped.append(vid)
        else:
            todo.append(vid)

    def work(vid: str) -> tuple[str, bool]:
        t0 = time.perf_counter()
        try:
            rec = analyze_video(vid, cfg, res)
            rec.update(status="ok", config_hash=chash)
            ok = True
        except Exception as exc:  # isolate per-video failures
            rec = {"video_id": vid, "status": "failed", "config_hash": chash,
                   "error": f"{type(exc).__name__}: {exc}"}
            ok = False
        store.write(rec)
        log.info("video=%s stage=analyze outcome=%s seconds=%.3f%s", vid, "ok" if ok else "failed",
                 time.perf_counter() - t0, "" if ok else f" error={rec['error']}")
        return vid, ok

    workers = int(jobs or cfg["jobs"])
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for vid, ok in pool.map(work, todo):
            (summary.completed if ok else summary.failed).append(vid)

    store.append_manifest({
        "event": "analyze", "tool_version": __version__, "config_hash": chash,
        "started_at": started, "finished_at": _now(),
        "completed": summary.completed, "skipped": summary.skipped,
        "failed": summary.failed, "rejected": summary.rejected,
    })
    return summary


def validate_corpus(cfg: PipelineConfig) -> dict[str, list[str]]:
    """Parse every artifact of every video without computing metrics."""
    res = load_resources(cfg)
    problems: dict[str, list[str]] = {}
    parsers = {
        "metadata": parse_metadata,
        "transcript": parse_transcript,
        "diarization": lambda b: parse_rttm(b, "SPEAKER"),
        "overlap": lambda b: parse_rttm(b, "OVERLAP"),
        "faces": parse_faces,
        "ocr": parse_ocr,
        "names": parse_name_candidates,
    }
    for vid in sorted(res.manifest.videos):
        errs = []
        for artifact, parse in parsers.items():
            blob = res.manifest.read(vid, artifact)
            if blob is None:
                continue
            try:
                parse(blob)
            except IngestError as exc:
                errs.append(f"{artifact}: {exc}")
        if res.manifest.path(vid, "audio"):
            try:
                read_wav(res.manifest.path(vid, "audio"))
            except ValueError as exc:
                errs.append(f"audio: {exc}")
        if errs:
            problems[vid] = errs
    return problems


__all__ = [
    "ConfigError", "PipelineConfig", "ResultStore", "RunSummary", "analyze", "analyze_video",
    "interpolate_env", "load_resources", "validate_corpus",
]
