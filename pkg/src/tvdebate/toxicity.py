"""Utterance toxicity scoring: score containers, scorers and per-video rollup."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
import re
import threading
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable, Mapping, Optional, Protocol

import requests

from .model import TranscriptSegment

log = logging.getLogger(__name__)

ATTRIBUTES = ("toxicity", "severe_toxicity", "profanity", "insult", "threat", "identity_attack")
DEFAULT_THRESHOLD = 0.5
API_KEY_ENV = "TOXICITY_API_KEY"


class ScoringUnavailable(RuntimeError):
    pass


@dataclass(frozen=True)
class ToxicityScores:
    toxicity: float = 0.0
    severe_toxicity: float = 0.0
    profanity: float = 0.0
    insult: float = 0.0
    threat: float = 0.0
    identity_attack: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and 0.0 <= v <= 1.0):
                raise ValueError(f"{f.name} must be a probability, got {v!r}")

    @classmethod
    def from_mapping(cls, data: Mapping[str, float]) -> "ToxicityScores":
        missing = [a for a in ATTRIBUTES if a not in data]
        if missing:
            raise ValueError(f"scores missing attributes {missing}")
        return cls(**{a: float(data[a]) for a in ATTRIBUTES})

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def is_foul(scores: ToxicityScores, threshold: float = DEFAULT_THRESHOLD) -> bool:
    """True when any attribute is strictly above ``threshold``."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0, 1]")
    return any(getattr(scores, a) > threshold for a in ATTRIBUTES)


class ToxicityClient(Protocol):
    def score(self, text: str) -> ToxicityScores: ...


def parse_lexicon(text: str) -> dict[str, tuple[str, float]]:
    """Read a ``term,attribute,weight`` CSV."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != ["term", "attribute", "weight"]:
        raise ValueError(f"lexicon header must be term,attribute,weight; got {reader.fieldnames}")
    out = {}
    for row in reader:
        attr, weight = row["attribute"].strip(), float(row["weight"])
        if attr not in ATTRIBUTES or not 0.0 <= weight <= 1.0:
            raise ValueError(f"bad lexicon row {row}")
        out[row["term"].strip().lower()] = (attr, weight)
    return out


def lexicon_score(text: str, lexicon: Mapping[str, tuple[str, float]]) -> ToxicityScores:
    """Noisy-OR of matched term weights per attribute.

    Every occurrence of a term counts as one factor.
    """
    lowered = text.lower()
    keep = {a: 1.0 for a in ATTRIBUTES}
    for term, (attr, weight) in lexicon.items():
        hits = len(re.findall(r"\b" + re.escape(term) + r"\b", lowered))
        if hits:
            keep[attr] *= (1.0 - weight) ** hits
    return ToxicityScores(**{a: 1.0 - keep[a] for a in ATTRIBUTES})


class LexiconScorer:
    def __init__(self, lexicon: Mapping[str, tuple[str, float]]):
        self.lexicon = dict(lexicon)

    @classmethod
    def from_file(cls, path: Path | str) -> "LexiconScorer":
        return cls(parse_lexicon(Path(path).read_text(encoding="utf-8")))

    def score(self, text: str) -> ToxicityScores:
        return lexicon_score(text, self.lexicon)


def text_key(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class RemoteScorer:
    """HTTP scoring client with retries, a JSONL cache and an in-flight cap.

    The service receives ``POST {"text": ...}`` and answers with the six
    attribute probabilities. Cached responses are returned verbatim.
    """

    def __init__(self, endpoint: str, cache_path: Optional[Path | str] = None, api_key: Optional[str] = None,
                 retries: int = 3, backoff_s: float = 1.0, timeout_s: float = 30.0, max_in_flight: int = 4,
                 session: Optional[requests.Session] = None):
        self.endpoint = endpoint
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.retries = retries
        self.backoff_s = backoff_s
        self.timeout_s = timeout_s
        self.session = session or requests.Session()
        self._slots = threading.BoundedSemaphore(max_in_flight)
        self._lock = threading.Lock()
        self.cache_path = Path(cache_path) if cache_path else None
        self._cache: dict[str, dict] = {}
        if self.cache_path and self.cache_path.exists():
            for line in self.cache_path.read_text(encoding="utf-8").split("\n"):
                try:
                    row = json.loads(line)
                except json.JSONDecodeError:
                    continue  # torn last line after a crash
                self._cache[row["key"]] = row["scores"]

    def _request(self, text: str) -> dict:
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        last = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff_s * 2 ** (attempt - 1))
            try:
                with self._slots:
                    resp = self.session.post(self.endpoint, json={"text": text}, headers=headers,
                                             timeout=self.timeout_s)
                if resp.status_code == 200:
                    return resp.json()
                last = f"HTTP {resp.status_code}"
                if 400 <= resp.status_code < 500 and resp.status_code != 429:
                    break
            except (requests.RequestException, ValueError) as exc:
                last = str(exc)
            log.warning("scoring attempt %d failed: %s", attempt + 1, last)
        raise ScoringUnavailable(f"scoring-unavailable: {last}")

    def score(self, text: str) -> ToxicityScores:
        key = text_key(text)
        with self._lock:
            cached = self._cache.get(key)
        if cached is None:
            cached = self._request(text)
            scores = ToxicityScores.from_mapping(cached)
            with self._lock:
                if key not in self._cache:
                    self._cache[key] = cached
                    if self.cache_path:
                        self.cache_path.parent.mkdir(parents=True, exist_ok=True)
                        with open(self.cache_path, "a", encoding="utf-8") as fh:
                            fh.write(json.dumps({"key": key, "scores": cached}, sort_keys=True) + "\n")
            return scores
        return ToxicityScores.from_mapping(cached)


def video_toxicity(segments: Iterable[TranscriptSegment], client: ToxicityClient,
                   threshold: float = DEFAULT_THRESHOLD) -> tuple[float, bool]:
    """Fraction of utterances flagged foul, and whether any were.

    Utterances are segments with non-blank text. Any scoring failure
    propagates, so a partial result is never returned.
    """
    texts = [s.text for s in segments if s.text.strip()]
    if not texts:
        return 0.0, False
    foul = sum(1 for t in texts if is_foul(client.score(t), threshold))
    frac = foul / len(texts)
    return frac, frac > 0


__all__ = [
    "API_KEY_ENV", "ATTRIBUTES", "DEFAULT_THRESHOLD", "LexiconScorer", "RemoteScorer",
    "ScoringUnavailable", "ToxicityClient", "ToxicityScores", "is_foul", "lexicon_score",
    "parse_lexicon", "text_key", "video_toxicity",
]
