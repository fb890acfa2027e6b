"""Evolving concept co-occurrence graph: cumulative annual snapshots.

Two concepts are connected at year t when some paper published in year <= t
(within the configured range) contains both. Edges accumulate and never
disappear, so edges(t-1) is always a subset of edges(t).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

from .corpus import CorpusIndex, CorpusStore
from .errors import CorpusFormatError, UnknownConceptError, YearRangeError


class ConceptPair(NamedTuple):
    """Canonical unordered pair of distinct concept ids (lo < hi)."""

    lo: str
    hi: str

    @classmethod
    def of(cls, a: str, b: str) -> "ConceptPair":
        if a == b:
            raise ValueError(f"self-pair {a!r}")
        return cls(a, b) if a < b else cls(b, a)


@dataclass(frozen=True)
class Snapshot:
    year: int
    edges: frozenset[ConceptPair]


class EvolvingGraph:
    """Immutable sequence of cumulative snapshots for years t_start..t_end."""

    def __init__(self, concepts: Iterable[str], t_start: int, t_end: int,
                 snapshots: Iterable[Snapshot]):
        if t_start > t_end:
            raise YearRangeError(f"empty year range [{t_start}, {t_end}]")
        self.concepts: frozenset[str] = frozenset(concepts)
        self.t_start = t_start
        self.t_end = t_end
        self._snapshots: dict[int, Snapshot] = {s.year: s for s in snapshots}
        expected = list(range(t_start, t_end + 1))
        if sorted(self._snapshots) != expected:
            raise YearRangeError("snapshots must cover every year of the range exactly once")
        previous: frozenset[ConceptPair] = frozenset()
        for year in expected:
            edges = self._snapshots[year].edges
            if not previous <= edges:
                raise ValueError(f"edges disappeared between {year - 1} and {year}")
            for pair in edges - previous:
                if pair.lo not in self.concepts or pair.hi not in self.concepts:
                    raise UnknownConceptError(f"edge endpoint outside concept set: {pair}")
            previous = edges
        # Adjacency per snapshot, built once; the graph is immutable afterwards.
        self._adjacency: dict[int, dict[str, frozenset[str]]] = {}
        for year in expected:
            neighbors: dict[str, set[str]] = {}
            for lo, hi in self._snapshots[year].edges:
                neighbors.setdefault(lo, set()).add(hi)
                neighbors.setdefault(hi, set()).add(lo)
            self._adjacency[year] = {c: frozenset(ns) for c, ns in neighbors.items()}

    @classmethod
    def from_first_seen(cls, concepts: Iterable[str], t_start: int, t_end: int,
                        first_seen: Mapping[ConceptPair, int]) -> "EvolvingGraph":
        """Build cumulative snapshots from each edge's first co-occurrence year."""
        snapshots = []
        for year in range(t_start, t_end + 1):
            edges = frozenset(pair for pair, y in first_seen.items() if y <= year)
            snapshots.append(Snapshot(year=year, edges=edges))
        return cls(concepts, t_start, t_end, snapshots)

    def years(self) -> range:
        return range(self.t_start, self.t_end + 1)

    def _check_year(self, t: int) -> None:
        if not self.t_start <= t <= self.t_end:
            raise YearRangeError(f"year {t} outside [{self.t_start}, {self.t_end}]")

    def edges(self, t: int) -> frozenset[ConceptPair]:
        self._check_year(t)
        return self._snapshots[t].edges

    def has_edge(self, u: str, v: str, t: int) -> bool:
        return ConceptPair.of(u, v) in self.edges(t)

    def neighbors(self, c: str, t: int) -> frozenset[str]:
        self._check_year(t)
        if c not in self.concepts:
            raise UnknownConceptError(f"unknown concept {c!r}")
        return self._adjacency[t].get(c, frozenset())

    @property
    def num_concepts(self) -> int:
        return len(self.concepts)


def build_evolving_graph(index: CorpusIndex, corpus: CorpusStore,
                         t_start: int, t_end: int) -> EvolvingGraph:
    """Cumulative co-occurrence graph over papers with t_start <= year <= t_end.

    Papers outside the range are ignored. Nodes are all concepts mentioned by
    at least one in-range paper; papers with a single concept contribute the
    node but no edge.
    """
    if t_start > t_end:
        raise YearRangeError(f"empty year range [{t_start}, {t_end}]")
    concepts: set[str] = set()
    first_seen: dict[ConceptPair, int] = {}
    for paper in corpus:
        if not t_start <= paper.year <= t_end:
            continue
        found = index.concepts_of(paper.id)
        concepts.update(found)
        for i in range(len(found)):
            for j in range(i + 1, len(found)):
                pair = ConceptPair.of(found[i], found[j])
                prev = first_seen.get(pair)
                if prev is None or paper.year < prev:
                    first_seen[pair] = paper.year
    return EvolvingGraph.from_first_seen(concepts, t_start, t_end, first_seen)


def new_edges(g: EvolvingGraph, t: int) -> frozenset[ConceptPair]:
    """Edges present at t but absent at t-1 (equivalently absent from all prior years)."""
    if not g.t_start < t <= g.t_end:
        raise YearRangeError(f"year {t} has no predecessor snapshot in [{g.t_start}, {g.t_end}]")
    return g.edges(t) - g.edges(t - 1)


def k_hop_neighborhood(g: EvolvingGraph, t: int, c: str, k: int) -> set[str]:
    """Concepts within shortest-path distance k of c in snapshot t, excluding c."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if c not in g.concepts:
        raise UnknownConceptError(f"unknown concept {c!r}")
    g.edges(t)  # validates the year
    reached: set[str] = {c}
    frontier = deque([(c, 0)])
    while frontier:
        node, dist = frontier.popleft()
        if dist == k:
            continue
        for nb in g.neighbors(node, t):
            if nb not in reached:
                reached.add(nb)
                frontier.append((nb, dist + 1))
    reached.discard(c)
    return reached


def graph_to_payload(g: EvolvingGraph) -> dict:
    return {
        "t_start": g.t_start,
        "t_end": g.t_end,
        "concepts": sorted(g.concepts),
        "snapshots": [
            {"year": t, "edges": [[p.lo, p.hi] for p in sorted(g.edges(t))]}
            for t in g.years()
        ],
    }


def export_graph_json(g: EvolvingGraph) -> str:
    """Bit-exact JSON export: canonical (lo, hi) edges, lexicographically sorted."""
    return json.dumps(graph_to_payload(g), indent=2) + "\n"


def write_graph_json(g: EvolvingGraph, path: str | Path) -> None:
    Path(path).write_text(export_graph_json(g), encoding="utf-8")


def load_graph_json(path: str | Path) -> EvolvingGraph:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"invalid graph JSON: {exc.msg}", path=str(path)) from exc
    try:
        snapshots = [
            Snapshot(year=s["year"], edges=frozenset(ConceptPair.of(a, b) for a, b in s["edges"]))
            for s in payload["snapshots"]
        ]
        return EvolvingGraph(payload["concepts"], payload["t_start"], payload["t_end"], snapshots)
    except (KeyError, TypeError, ValueError) as exc:
        raise CorpusFormatError(f"invalid graph JSON structure: {exc}", path=str(path)) from exc
