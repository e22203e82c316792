"""Resolve noisy panelist name candidates into stable identities."""
from __future__ import annotations

import csv
import io
import json
import re
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

from ..model import PanelistCluster
from .fuzzy import levenshtein, partial_ratio, partial_token_sort_ratio
from .metaphone import metaphone_word, phonetic_key

HONORIFICS = frozenset(
    {"mr", "mrs", "ms", "dr", "prof", "general", "major", "col", "shri", "sahab", "ji"}
)
OCCUPATIONS = frozenset({
    "tv related", "academics", "accountant", "activist", "advocate", "analyst", "author",
    "civil servant", "consultant", "doctor", "film related", "journalist", "politician",
    "religious leader", "social leader", "spokesperson",
})
DEFAULT_FUZZY_THRESHOLD = 85


class EmptyNameError(ValueError):
    """Raised when nothing is left of a name after normalization."""


def normalize_name(raw: str, honorifics: frozenset[str] = HONORIFICS) -> str:
    """Lowercase, turn hyphens into spaces, drop punctuation and honorifics.

    Honorific tokens are removed from both ends of the name, so a trailing
    ``sahab`` goes as well as a leading ``major general``.
    """
    text = raw.lower().replace("-", " ")
    text = re.sub(r"[^\w\s]|_", "", text)
    tokens = text.split()
    while tokens and tokens[0] in honorifics:
        tokens.pop(0)
    while tokens and tokens[-1] in honorifics:
        tokens.pop()
    if not tokens:
        raise EmptyNameError(f"empty-after-normalization: {raw!r}")
    return " ".join(tokens)


@dataclass(frozen=True)
class NameKey:
    raw: str
    normalized: str
    phonetic: str

    @classmethod
    def of(cls, raw: str) -> "NameKey":
        norm = normalize_name(raw)
        return cls(raw, norm, phonetic_key(norm))


def name_frequencies(candidates: Iterable[tuple[str, Sequence[str]]]) -> Counter:
    """Number of videos mentioning each name (repeats within a video count once)."""
    freq: Counter = Counter()
    for _video, names in candidates:
        freq.update(set(names))
    return freq


def normalize_candidates(
    candidates: Iterable[tuple[str, Sequence[str]]]
) -> list[tuple[str, list[str]]]:
    """Normalize raw candidate lists, silently dropping names that vanish."""
    out = []
    for video, names in candidates:
        kept = []
        for raw in names:
            try:
                kept.append(normalize_name(raw))
            except EmptyNameError:
                continue
        out.append((video, kept))
    return out


def cluster_names(
    candidates: Iterable[tuple[str, Sequence[str]]],
    fuzzy_threshold: int = DEFAULT_FUZZY_THRESHOLD,
    use_phonetic: bool = True,
) -> list[PanelistCluster]:
    """Greedy single-pass clustering of normalized names.

    Names are visited by descending video frequency, then alphabetically.
    Each joins the first cluster whose founding name it fuzzy-matches (or
    shares a phonetic key with); otherwise it founds a new cluster. Because
    of the visiting order the founder is also the cluster's most frequent
    variant, which makes it the canonical name.
    """
    if not 0 <= fuzzy_threshold <= 100:
        raise ValueError("fuzzy_threshold must be in [0, 100]")
    freq = name_frequencies(candidates)
    order = sorted(freq, key=lambda n: (-freq[n], n))
    founders: list[tuple[str, str]] = []
    members: list[list[str]] = []
    for name in order:
        key = phonetic_key(name) if use_phonetic else None
        for idx, (founder, founder_key) in enumerate(founders):
            if partial_token_sort_ratio(name, founder) >= fuzzy_threshold or (
                use_phonetic and key and key == founder_key
            ):
                members[idx].append(name)
                break
        else:
            founders.append((name, key or ""))
            members.append([name])
    return [
        PanelistCluster(
            cluster_id=f"p{idx:04d}",
            canonical_name=founder,
            variants=frozenset(names),
            low_confidence=sum(freq[n] for n in names) <= 1,
        )
        for idx, ((founder, _), names) in enumerate(zip(founders, members))
    ]


def name_index(clusters: Iterable[PanelistCluster]) -> dict[str, str]:
    """Map every normalized variant to its cluster id."""
    return {v: c.cluster_id for c in clusters for v in c.variants}


@dataclass(frozen=True)
class RosterRow:
    canonical_name: str
    occupation: Optional[str]
    affiliation: Optional[str]


def _blank_to_none(value: Optional[str]) -> Optional[str]:
    if value is None:
        return None
    value = value.strip()
    return None if value == "" or value.lower() == "none" else value


def parse_roster(text: str) -> list[RosterRow]:
    """Parse ``roster.csv`` (``canonical_name,occupation,affiliation``)."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != ["canonical_name", "occupation", "affiliation"]:
        raise ValueError(f"roster header must be canonical_name,occupation,affiliation; got {reader.fieldnames}")
    return [
        RosterRow(normalize_name(r["canonical_name"]), _blank_to_none(r["occupation"]),
                  _blank_to_none(r["affiliation"]))
        for r in reader
    ]


def attach_roster(
    clusters: Sequence[PanelistCluster], roster: Iterable[RosterRow]
) -> tuple[list[PanelistCluster], list[RosterRow]]:
    """Join roster rows onto clusters by exact canonical name.

    Returns the updated clusters and the roster rows that matched nothing.
    """
    by_name = {r.canonical_name: r for r in roster}
    out = []
    used = set()
    for c in clusters:
        row = by_name.get(c.canonical_name)
        if row is None:
            out.append(c)
            continue
        used.add(row.canonical_name)
        out.append(replace(c, occupation=row.occupation, affiliation=row.affiliation))
    unmatched = [r for name, r in by_name.items() if name not in used]
    return out, unmatched


def dump_clusters(clusters: Iterable[PanelistCluster]) -> bytes:
    lines = []
    for c in clusters:
        lines.append(json.dumps({
            "cluster_id": c.cluster_id,
            "canonical_name": c.canonical_name,
            "variants": sorted(c.variants),
            "occupation": c.occupation,
            "affiliation": c.affiliation,
            "low_confidence": c.low_confidence,
        }, ensure_ascii=False))
    return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""


def load_clusters(data: bytes) -> list[PanelistCluster]:
    out = []
    for line in data.decode("utf-8").split("\n"):
        if line.strip():
            d = json.loads(line)
            out.append(PanelistCluster(d["cluster_id"], d["canonical_name"], frozenset(d["variants"]),
                                       d.get("occupation"), d.get("affiliation"),
                                       d.get("low_confidence", False)))
    return out


def load_roster(path: Path | str) -> list[RosterRow]:
    return parse_roster(Path(path).read_text(encoding="utf-8"))


__all__ = [
    "DEFAULT_FUZZY_THRESHOLD",
    "EmptyNameError",
    "HONORIFICS",
    "NameKey",
    "RosterRow",
    "attach_roster",
    "cluster_names",
    "dump_clusters",
    "levenshtein",
    "load_clusters",
    "load_roster",
    "metaphone_word",
    "name_frequencies",
    "name_index",
    "normalize_candidates",
    "normalize_name",
    "parse_roster",
    "partial_ratio",
    "partial_token_sort_ratio",
    "phonetic_key",
]
