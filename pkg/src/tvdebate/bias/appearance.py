"""On-screen hashtags and panel composition by party side."""
from __future__ import annotations

import csv
import io
import re
from collections import defaultdict
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional

HASHTAG = re.compile(r"#[A-Za-z0-9_]+")

SIDE_BJP = "BJP"
SIDE_OPP = "OPPOSITION"
SIDE_OTHER = "OTHER"


def hashtags_in(text: str, seen: Optional[set] = None) -> list[str]:
    seen = set() if seen is None else seen
    out = []
    for tag in HASHTAG.findall(text):
        if tag.lower() not in seen:
            seen.add(tag.lower())
            out.append(tag)
    return out


def extract_hashtags(rows: Iterable) -> dict[str, list[str]]:
    """Hashtags per video, case-insensitively unique, first casing kept.

    ``rows`` are OCR rows with ``video_id``, ``t_s`` and ``text``; they are
    visited in time order.
    """
    seen: dict[str, set] = defaultdict(set)
    out: dict[str, list[str]] = {}
    for row in sorted(rows, key=lambda r: (r.video_id, r.t_s)):
        out.setdefault(row.video_id, []).extend(hashtags_in(row.text, seen[row.video_id]))
    return out


@dataclass(frozen=True)
class PartyTable:
    entries: Mapping[str, tuple[str, str]]  # lowercase affiliation -> (party, side)

    def party(self, affiliation: Optional[str]) -> Optional[str]:
        if not affiliation:
            return None
        hit = self.entries.get(affiliation.strip().lower())
        return hit[0] if hit else None

    def side(self, affiliation: Optional[str]) -> str:
        if not affiliation:
            return SIDE_OTHER
        hit = self.entries.get(affiliation.strip().lower())
        return hit[1] if hit else SIDE_OTHER

    @classmethod
    def parse(cls, text: str) -> "PartyTable":
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames != ["affiliation", "party", "side"]:
            raise ValueError(f"party table header must be affiliation,party,side; got {reader.fieldnames}")
        entries = {}
        for row in reader:
            side = row["side"].strip().upper()
            if side not in (SIDE_BJP, SIDE_OPP, SIDE_OTHER):
                raise ValueError(f"bad side {side!r}")
            entries[row["affiliation"].strip().lower()] = (row["party"].strip(), side)
        return cls(entries)

    @classmethod
    def load(cls, path: Optional[Path | str] = None) -> "PartyTable":
        if path is None:
            return cls.parse(resources.files("tvdebate.data").joinpath("party_table.csv").read_text("utf-8"))
        return cls.parse(Path(path).read_text(encoding="utf-8"))


def appearance_bias(video_panelists: Mapping[str, Iterable[tuple[str, Optional[str]]]],
                    video_category: Mapping[str, str], parties: PartyTable) -> dict[str, tuple[float, float]]:
    """Per category, the BJP and opposition shares of panelist appearances.

    ``video_panelists`` maps a video to ``(cluster_id, affiliation)`` pairs.
    A panelist counts once per video. Categories without any BJP or
    opposition appearance are left out.
    """
    counts: dict[str, list[int]] = defaultdict(lambda: [0, 0])
    for video, panel in video_panelists.items():
        cat = video_category.get(video)
        if cat is None:
            continue
        for _cid, affiliation in dict(panel).items():
            side = parties.side(affiliation)
            if side == SIDE_BJP:
                counts[cat][0] += 1
            elif side == SIDE_OPP:
                counts[cat][1] += 1
    return {
        cat: (b / (b + o), o / (b + o))
        for cat, (b, o) in sorted(counts.items())
        if b + o > 0
    }
