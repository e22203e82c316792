"""Panelist co-appearance graph, Louvain communities and party-triad incivility."""
from __future__ import annotations

import itertools
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .bias.appearance import SIDE_BJP, SIDE_OPP, PartyTable
from .model import TranscriptSegment
from .stats import ONE_GREATER, StatsError, TTestResult, welch_t

SHOUT_MIN_INTERSECTION_S = 0.5


class GraphError(ValueError):
    pass


@dataclass
class CoocGraph:
    nodes: set[str] = field(default_factory=set)
    weights: dict[tuple[str, str], int] = field(default_factory=dict)  # keys have u < v

    def weight(self, u: str, v: str) -> int:
        return self.weights.get((u, v) if u < v else (v, u), 0)

    def edges(self) -> list[tuple[str, str, int]]:
        return [(u, v, w) for (u, v), w in sorted(self.weights.items())]

    def merge(self, other: "CoocGraph") -> "CoocGraph":
        out = CoocGraph(self.nodes | other.nodes, dict(self.weights))
        for k, w in other.weights.items():
            out.weights[k] = out.weights.get(k, 0) + w
        return out


def build_graph(video_panelists: Mapping[str, Iterable[str]]) -> CoocGraph:
    g = CoocGraph()
    for panel in video_panelists.values():
        members = sorted(set(panel))
        g.nodes.update(members)
        for u, v in itertools.combinations(members, 2):
            g.weights[(u, v)] = g.weights.get((u, v), 0) + 1
    return g


def _adjacency(graph: CoocGraph) -> dict[str, dict[str, float]]:
    adj: dict[str, dict[str, float]] = {n: {} for n in sorted(graph.nodes)}
    for (u, v), w in graph.weights.items():
        adj[u][v] = adj[u].get(v, 0.0) + w
        adj[v][u] = adj[v].get(u, 0.0) + w
    return adj


def modularity(adj: Mapping[str, Mapping[str, float]], community: Mapping[str, object]) -> float:
    """Weighted modularity; ``adj`` is symmetric and a diagonal entry holds A_ii."""
    two_m = math.fsum(w for nbrs in adj.values() for w in nbrs.values())
    if two_m == 0:
        raise GraphError("empty-graph")
    inside: dict[object, list[float]] = defaultdict(list)
    total: dict[object, list[float]] = defaultdict(list)
    for u, nbrs in adj.items():
        cu = community[u]
        for v, w in nbrs.items():
            total[cu].append(w)
            if community[v] == cu:
                inside[cu].append(w)
    return math.fsum(math.fsum(inside[c]) / two_m - (math.fsum(total[c]) / two_m) ** 2 for c in total)


@dataclass
class LouvainResult:
    partition: dict[str, int]
    modularity: float
    history: list[float]


def _one_level(adj, rng: random.Random, history: list, tol: float = 1e-12) -> dict[str, str]:
    comm = {u: u for u in adj}
    degree = {u: math.fsum(adj[u].values()) for u in adj}
    two_m = math.fsum(degree.values())
    tot = dict(degree)
    order = sorted(adj)
    rng.shuffle(order)
    improved = True
    while improved:
        improved = False
        for u in order:
            cu = comm[u]
            links: dict[str, float] = defaultdict(float)
            for v, w in adj[u].items():
                if v != u:
                    links[comm[v]] += w
            tot[cu] -= degree[u]
            ku = degree[u]
            best, best_gain = cu, links.get(cu, 0.0) - tot[cu] * ku / two_m
            for c in sorted(links):
                gain = links[c] - tot[c] * ku / two_m
                if gain > best_gain + tol:
                    best, best_gain = c, gain
            tot[best] += ku
            if best != cu:
                comm[u] = best
                improved = True
        history.append(modularity(adj, comm))
    return comm


def _aggregate(adj, comm) -> dict[str, dict[str, float]]:
    new: dict[str, dict[str, float]] = {c: {} for c in set(comm.values())}
    for u, nbrs in adj.items():
        for v, w in nbrs.items():
            cu, cv = comm[u], comm[v]
            new[cu][cv] = new[cu].get(cv, 0.0) + w
    return new


def louvain(graph: CoocGraph, seed: int = 0) -> LouvainResult:
    """Two-phase Louvain modularity maximization.

    Communities are numbered by their smallest member node.
    """
    adj = _adjacency(graph)
    if not graph.weights:
        raise GraphError("empty-graph")
    rng = random.Random(seed)
    history = [modularity(adj, {u: u for u in adj})]
    membership = {u: u for u in adj}
    level = adj
    while True:
        comm = _one_level(level, rng, history)
        if all(comm[u] == u for u in comm):
            break
        membership = {u: comm[membership[u]] for u in membership}
        level = _aggregate(level, comm)
    groups: dict[str, list[str]] = defaultdict(list)
    for u, c in membership.items():
        groups[c].append(u)
    ordered = sorted((sorted(m) for m in groups.values()), key=lambda m: m[0])
    partition = {u: i for i, members in enumerate(ordered) for u in members}
    return LouvainResult(partition, modularity(adj, partition), history)


def incivility(overlap_fraction: float, toxic_utterance_fraction: float) -> float:
    return overlap_fraction + toxic_utterance_fraction


@dataclass(frozen=True)
class TriadRow:
    triad: tuple[str, str, str]
    mean_incivility: float
    frequency: int
    test: Optional[TTestResult]

    @property
    def name(self) -> str:
        return "-".join(self.triad)


def video_triads(affiliations: Sequence[Optional[str]], parties: PartyTable,
                 per_combination: bool = False) -> list[tuple[str, str, str]]:
    """Mixed BJP/opposition triads among one video's panelists."""
    members = [(parties.party(a), parties.side(a)) for a in affiliations]
    members = [m for m in members if m[1] in (SIDE_BJP, SIDE_OPP)]
    found = []
    for combo in itertools.combinations(members, 3):
        n_bjp = sum(1 for _, side in combo if side == SIDE_BJP)
        if n_bjp in (1, 2):
            found.append(tuple(sorted(p for p, _ in combo)))
    if per_combination:
        return sorted(found)
    return sorted(set(found))


def triad_incivility(video_affiliations: Mapping[str, Sequence[Optional[str]]],
                     video_incivility: Mapping[str, float], parties: PartyTable,
                     min_freq: int = 50, per_combination: bool = False) -> list[TriadRow]:
    """Triads seen at least ``min_freq`` times, with one-tailed Welch tests.

    Each triad's videos are compared against every video with an
    incivility value.
    """
    counts: dict[tuple, int] = defaultdict(int)
    videos: dict[tuple, set] = defaultdict(set)
    for vid in sorted(video_affiliations):
        if vid not in video_incivility:
            continue
        for triad in video_triads(video_affiliations[vid], parties, per_combination):
            counts[triad] += 1
            videos[triad].add(vid)
    everyone = [video_incivility[v] for v in sorted(video_incivility)]
    rows = []
    for triad in sorted(counts):
        if counts[triad] < min_freq:
            continue
        values = [video_incivility[v] for v in sorted(videos[triad])]
        try:
            test = welch_t(values, everyone, ONE_GREATER)
        except StatsError:
            test = None
        rows.append(TriadRow(triad, math.fsum(values) / len(values), counts[triad], test))
    rows.sort(key=lambda r: (-r.mean_incivility, r.triad))
    return rows


def shouters_per_video(shouting_segments: Iterable[tuple[float, float]], segments: Iterable[TranscriptSegment],
                       min_intersection_s: float = SHOUT_MIN_INTERSECTION_S) -> int:
    shouts = list(shouting_segments)
    speakers = set()
    for seg in segments:
        for start, end in shouts:
            if min(seg.end_s, end) - max(seg.start_s, start) > min_intersection_s:
                speakers.add(seg.speaker)
                break
    return len(speakers)
