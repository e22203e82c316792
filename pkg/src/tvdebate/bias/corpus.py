"""Masked sentence corpus about the ruling party versus the opposition."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from ..model import TranscriptSegment

PER = "<PER>"
PARTY = "<PARTY>"
BJP = "BJP"
OPP = "OPP"
LABELS = (OPP, BJP)  # index = classifier target

_APOSTROPHES = str.maketrans({"’": "'", "‘": "'", "ʼ": "'"})
_WORD = re.compile(r"\w+")
_NEG_TOKEN = re.compile(r"[\w']+")
_TOKEN = re.compile(r"<per>|<party>|\w+")


@dataclass(frozen=True)
class BiasCorpusConfig:
    bjp_keywords: frozenset[str]
    opposition_keywords: frozenset[str]
    party_keywords: frozenset[str]
    negation_keywords: tuple[str, ...]
    person_mask: str = PER
    party_mask: str = PARTY

    def __post_init__(self):
        if self.bjp_keywords & self.opposition_keywords:
            raise ValueError("keyword sets overlap")
        if not self.party_keywords <= (self.bjp_keywords | self.opposition_keywords):
            raise ValueError("party keywords must belong to one side")

    @classmethod
    def from_json(cls, text: str) -> "BiasCorpusConfig":
        d = json.loads(text)
        return cls(
            frozenset(w.lower() for w in d["bjp"]),
            frozenset(w.lower() for w in d["opposition"]),
            frozenset(w.lower() for w in d["party"]),
            tuple(w.lower() for w in d["negation"]),
        )

    @classmethod
    def load(cls, path: Optional[Path | str] = None) -> "BiasCorpusConfig":
        if path is None:
            return cls.from_json(resources.files("tvdebate.data").joinpath("keywords.json").read_text("utf-8"))
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def negation_sequences(self) -> list[tuple[str, ...]]:
        return [tuple(_NEG_TOKEN.findall(n.translate(_APOSTROPHES))) for n in self.negation_keywords]


def split_sentences(text: str) -> list[str]:
    return [s.strip() for s in re.split(r"[.!?]+", text) if s.strip()]


def _contains_seq(tokens: list[str], seq: tuple[str, ...]) -> bool:
    k = len(seq)
    return any(tuple(tokens[i:i + k]) == seq for i in range(len(tokens) - k + 1))


def has_negation(sentence: str, cfg: BiasCorpusConfig) -> bool:
    tokens = _NEG_TOKEN.findall(sentence.lower().translate(_APOSTROPHES))
    return any(_contains_seq(tokens, seq) for seq in cfg.negation_sequences())


def sentence_side(sentence: str, cfg: BiasCorpusConfig) -> Optional[str]:
    words = set(_WORD.findall(sentence.lower()))
    bjp = bool(words & cfg.bjp_keywords)
    opp = bool(words & cfg.opposition_keywords)
    if bjp == opp:
        return None
    return BJP if bjp else OPP


def mask_sentence(sentence: str, cfg: BiasCorpusConfig) -> str:
    def repl(m: re.Match) -> str:
        w = m.group(0)
        if w in cfg.party_keywords:
            return cfg.party_mask
        if w in cfg.bjp_keywords or w in cfg.opposition_keywords:
            return cfg.person_mask
        return w

    return _WORD.sub(repl, sentence.lower())


def build_corpus(segments: Iterable[TranscriptSegment] | Iterable[str], cfg: BiasCorpusConfig) -> list[tuple[str, str]]:
    """(masked sentence, label) pairs from transcript text.

    Sentences naming both sides, neither side, or containing a negation
    are skipped. Negation is checked before masking.
    """
    out = []
    for item in segments:
        text = item if isinstance(item, str) else item.text
        for sentence in split_sentences(text):
            side = sentence_side(sentence, cfg)
            if side is None or has_negation(sentence, cfg):
                continue
            out.append((mask_sentence(sentence, cfg), side))
    return out


def tokenize(text: str) -> list[str]:
    """Lowercase word tokens, keeping the two mask tokens whole."""
    return [{"<per>": PER, "<party>": PARTY}.get(t, t) for t in _TOKEN.findall(text.lower())]


def dump_corpus(rows: Iterable[tuple[str, str]]) -> bytes:
    return "".join(json.dumps({"text": t, "label": lab}, ensure_ascii=False) + "\n" for t, lab in rows).encode("utf-8")


def load_corpus(data: bytes) -> list[tuple[str, str]]:
    rows = []
    for line in data.decode("utf-8").split("\n"):
        if line.strip():
            d = json.loads(line)
            if d["label"] not in LABELS:
                raise ValueError(f"unknown label {d['label']!r}")
            rows.append((d["text"], d["label"]))
    return rows
