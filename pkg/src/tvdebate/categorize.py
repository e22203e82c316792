"""Tag-based topic assignment with a priority ladder for the major label."""
from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional

from .model import CategoryId, VideoRecord

FALLBACK_CATEGORY = "Miscellaneous"


class CategoryError(ValueError):
    pass


def normalize_tag(tag: str) -> str:
    return re.sub(r"\s+", " ", tag.strip().lower())


@dataclass(frozen=True)
class PriorityLadder:
    """Categories ordered from highest to lowest priority."""

    order: tuple[CategoryId, ...]

    def __post_init__(self):
        if len(set(self.order)) != len(self.order):
            raise CategoryError("priority ladder contains duplicates")
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(self.order)})

    def rank(self, category: CategoryId) -> int:
        try:
            return self._index[category]
        except KeyError:
            raise CategoryError(f"unknown-category: {category!r}") from None

    def __contains__(self, category: object) -> bool:
        return category in self.order

    @classmethod
    def parse(cls, text: str) -> "PriorityLadder":
        return cls(tuple(line.strip() for line in text.splitlines() if line.strip()))

    @classmethod
    def load(cls, path: Optional[Path | str] = None) -> "PriorityLadder":
        if path is None:
            return cls.parse(resources.files("tvdebate.data").joinpath("priority.txt").read_text("utf-8"))
        return cls.parse(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class TagMap:
    mapping: Mapping[str, CategoryId]

    def check(self, ladder: PriorityLadder) -> None:
        missing = sorted({c for c in self.mapping.values() if c not in ladder})
        if missing:
            raise CategoryError(f"tag map targets categories outside the ladder: {missing}")

    @classmethod
    def parse(cls, text: str) -> "TagMap":
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames != ["tag", "category"]:
            raise CategoryError(f"tag map header must be tag,category, got {reader.fieldnames}")
        return cls({normalize_tag(row["tag"]): row["category"].strip() for row in reader})

    @classmethod
    def load(cls, path: Optional[Path | str] = None) -> "TagMap":
        if path is None:
            return cls.parse(resources.files("tvdebate.data").joinpath("tagmap.csv").read_text("utf-8"))
        return cls.parse(Path(path).read_text(encoding="utf-8"))


def load_suggestions(path: Path | str) -> dict[str, set[CategoryId]]:
    """Read ``suggestions.jsonl`` rows of ``{video_id, categories}``."""
    out: dict[str, set[CategoryId]] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            row = json.loads(line)
            out.setdefault(row["video_id"], set()).update(row["categories"])
    return out


def categories_for(
    record: VideoRecord,
    tagmap: TagMap,
    external_suggestions: Iterable[CategoryId] = (),
    ladder: Optional[PriorityLadder] = None,
) -> set[CategoryId]:
    """Union of tag-mapped categories and externally suggested ones.

    Suggestions are validated against ``ladder`` when one is given.
    """
    found = {tagmap.mapping[t] for t in map(normalize_tag, record.tags) if t in tagmap.mapping}
    suggested = set(external_suggestions)
    if ladder is not None:
        for name in sorted(suggested):
            ladder.rank(name)
    return found | suggested


def assign_major_minor(
    categories: Iterable[CategoryId], ladder: PriorityLadder
) -> tuple[CategoryId, frozenset[CategoryId]]:
    cats = set(categories)
    if not cats:
        raise CategoryError("empty-category-set")
    major = min(cats, key=ladder.rank)
    return major, frozenset(cats - {major})


def categorize(
    record: VideoRecord,
    tagmap: TagMap,
    ladder: PriorityLadder,
    external_suggestions: Iterable[CategoryId] = (),
    fallback: Optional[CategoryId] = FALLBACK_CATEGORY,
) -> VideoRecord:
    """Return ``record`` with its major and minor categories filled in.

    A video with no category at all gets ``fallback`` as its major label;
    pass ``fallback=None`` to raise instead.
    """
    cats = categories_for(record, tagmap, external_suggestions, ladder)
    if not cats:
        if fallback is None:
            raise CategoryError(f"empty-category-set for {record.video_id}")
        cats = {fallback}
    major, minors = assign_major_minor(cats, ladder)
    return replace(record, major_category=major, minor_categories=minors)
