"""Corpus-level report tables built from a result store."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .bias import PartyTable, TextClassifier, appearance_bias, attribute_corpus, load_stopwords, rank_tokens
from .container import atomic_write
from .entity import load_clusters
from .network import build_graph, louvain, triad_incivility
from .stats import TWO, StatsError, category_vs_rest

log = logging.getLogger(__name__)

CATEGORY_HEADER = ["category", "mean_M", "mean_rest", "t_stat", "p_value", "tail"]
METRICS = {
    "overlap": "overlap_fraction",
    "toxicity": "toxic_utterance_fraction",
    "shouting": "shouting_fraction",
}


class EmptyStoreError(ValueError):
    pass


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_bytes(header: Sequence[str], rows: Iterable[Sequence]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue().encode("utf-8")


def _mean(values: Sequence[float]) -> Optional[float]:
    return math.fsum(values) / len(values) if values else None


def category_table(records: Sequence[dict], field: str, tail: str = TWO) -> list[list]:
    values = {r["video_id"]: r[field] for r in records if r.get(field) is not None}
    assign = {r["video_id"]: r["major_category"] for r in records}
    rows = []
    for cat in sorted({assign[v] for v in values}):
        inside = [values[v] for v in sorted(values) if assign[v] == cat]
        rest = [values[v] for v in sorted(values) if assign[v] != cat]
        t_stat = p_value = None
        try:
            res = category_vs_rest(values, assign, cat, tail)
            t_stat, p_value = res.t_stat, res.p_value
        except StatsError as exc:
            log.warning("category %s %s: t-test omitted (%s)", cat, field, exc)
        rows.append([cat, _mean(inside), _mean(rest), t_stat, p_value, tail])
    return rows


def category_summary(records: Sequence[dict]) -> list[list]:
    by_cat: dict[str, list[dict]] = defaultdict(list)
    for r in records:
        by_cat[r["major_category"]].append(r)
    rows = []
    for cat, recs in sorted(by_cat.items()):
        flagged = [r["has_toxic_speech"] for r in recs if r.get("has_toxic_speech") is not None]
        rows.append([
            cat, len(recs),
            _mean([r["overlap_fraction"] for r in recs if r.get("overlap_fraction") is not None]),
            _mean([r["toxic_utterance_fraction"] for r in recs if r.get("toxic_utterance_fraction") is not None]),
            (sum(flagged) / len(flagged)) if flagged else None,
            _mean([r["shouting_fraction"] for r in recs if r.get("shouting_fraction") is not None]),
        ])
    return rows


def gender_tables(records: Sequence[dict]) -> tuple[list, list, list]:
    monthly: dict[str, list[int]] = defaultdict(lambda: [0, 0, 0])
    by_cat: dict[str, list[float]] = defaultdict(lambda: [0.0, 0.0])
    areas: dict[str, list[float]] = {"male": [], "female": []}
    for r in records:
        faces = r.get("faces")
        if faces is None:
            continue
        m = monthly[r["published_at"][:7]]
        m[0] += faces["male_observations"]
        m[1] += faces["female_observations"]
        m[2] += faces["sampled_frames"]
        c = by_cat[r["major_category"]]
        c[0] += r["male_face_seconds"]
        c[1] += r["female_face_seconds"]
        areas["male"].extend(faces["male_areas"])
        areas["female"].extend(faces["female_areas"])
    monthly_rows = [[k, v[0] / v[2], v[1] / v[2]] for k, v in sorted(monthly.items()) if v[2] > 0]
    cat_rows = [[k, v[0], v[1], (v[1] / (v[0] + v[1])) if v[0] + v[1] > 0 else None]
                for k, v in sorted(by_cat.items())]
    area_rows = [[g, _mean(a), len(a)] for g, a in sorted(areas.items()) if a]
    return monthly_rows, cat_rows, area_rows


def report(store_dir: Path | str, out_dir: Path | str) -> dict[str, bytes]:
    """Write every report table into ``out_dir`` and return them by file name."""
    from .pipeline import ResultStore  # avoid an import cycle at module load

    store = ResultStore(store_dir)
    records = [r for r in store.records() if r.get("status") == "ok"]
    if not records:
        raise EmptyStoreError("empty-store: no completed video records")
    cfg = store.config()
    files: dict[str, bytes] = {}

    files["videos.csv"] = csv_bytes(
        ["video_id", "major_category", "overlap_fraction", "toxic_utterance_fraction", "has_toxic_speech",
         "shouting_fraction", "male_face_seconds", "female_face_seconds", "panelists"],
        [[r["video_id"], r["major_category"], r["overlap_fraction"], r["toxic_utterance_fraction"],
          r["has_toxic_speech"], r["shouting_fraction"], r["male_face_seconds"], r["female_face_seconds"],
          len(r["panelists"])] for r in records],
    )
    for name, field in METRICS.items():
        files[f"{name}_by_category.csv"] = csv_bytes(CATEGORY_HEADER, category_table(records, field))
    files["category_summary.csv"] = csv_bytes(
        ["category", "videos", "mean_overlap", "mean_toxic_fraction", "toxic_video_fraction", "mean_shouting"],
        category_summary(records),
    )

    monthly, by_cat, areas = gender_tables(records)
    files["gender_monthly.csv"] = csv_bytes(["month", "male_per_frame", "female_per_frame"], monthly)
    files["gender_by_category.csv"] = csv_bytes(
        ["category", "male_face_seconds", "female_face_seconds", "female_share"], by_cat)
    files["face_area_by_gender.csv"] = csv_bytes(["gender", "mean_area_px", "faces"], areas)

    parties = PartyTable.load(cfg.get("party_table"))
    panels = {r["video_id"]: [(p["cluster_id"], p["affiliation"]) for p in r["panelists"]] for r in records}
    majors = {r["video_id"]: r["major_category"] for r in records}
    files["appearance_bias.csv"] = csv_bytes(
        ["category", "bjp_fraction", "opposition_fraction"],
        [[c, b, o] for c, (b, o) in appearance_bias(panels, majors, parties).items()],
    )

    files["hashtags.csv"] = csv_bytes(["video_id", "hashtag"],
                                      [[r["video_id"], h] for r in records for h in r["hashtags"]])
    files["shouters.csv"] = csv_bytes(["video_id", "shouters"],
                                      [[r["video_id"], r["shouters"]] for r in records if r.get("shouters") is not None])

    civil = {r["video_id"]: r["overlap_fraction"] + r["toxic_utterance_fraction"]
             for r in records if r.get("overlap_fraction") is not None}
    tri = cfg.get("triads", {})
    triads = triad_incivility({v: [a for _, a in p] for v, p in panels.items()}, civil, parties,
                              int(tri.get("min_freq", 50)), bool(tri.get("per_combination", False)))
    files["triads.csv"] = csv_bytes(
        ["triad", "mean_incivility", "frequency", "t_stat", "p_value"],
        [[t.name, t.mean_incivility, t.frequency, t.test.t_stat if t.test else None,
          t.test.p_value if t.test else None] for t in triads],
    )

    graph = build_graph({v: [c for c, _ in p] for v, p in panels.items()})
    files["graph_edges.csv"] = csv_bytes(["u", "v", "weight"], graph.edges())
    if graph.weights:
        result = louvain(graph, int(cfg.get("seed", 0)))
        partition = {"modularity": result.modularity, "communities": result.partition}
    else:
        log.warning("co-appearance graph has no edges; partition omitted")
        partition = {"modularity": None, "communities": {}}
    clusters = {c.cluster_id: c for c in load_clusters(store.clusters_blob())}
    partition["names"] = {cid: clusters[cid].canonical_name for cid in sorted(partition["communities"])
                          if cid in clusters}
    files["partition.json"] = (json.dumps(partition, sort_keys=True, indent=1) + "\n").encode("utf-8")

    bias = cfg.get("bias", {})
    if bias.get("model"):
        model = TextClassifier.load(bias["model"])
        corpus = [(t, lab) for r in records for t, lab in r["bias_sentences"]]
        table = rank_tokens(attribute_corpus(model, corpus, int(bias.get("ig_steps", 256))),
                            load_stopwords(bias.get("stopwords")), int(bias.get("min_freq", 50)))
        files["attributions.csv"] = csv_bytes(
            ["label", "token", "score", "frequency"],
            [[label, row.token, row.score, row.frequency] for label in sorted(table) for row in table[label]],
        )

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, data in files.items():
        atomic_write(out / name, data)
    return files
