"""Pluggable link-prediction scoring and snapshot prediction.

A scorer turns serialized prompt sequences into (related, unrelated) logit
pairs. Built-ins: a lookup stub, a deterministic common-neighbor heuristic,
a seeded random baseline, and clients for the remote wire protocol
(JSON over HTTP, or line-delimited JSON over a subprocess's stdio).

Wire protocol: request {"sequences": [str, ...]} -> response
{"logits": [[related, unrelated], ...]} of equal length.
"""

from __future__ import annotations

import json
import math
import random
import subprocess
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import requests

from .errors import (
    ScorerProtocolError,
    ScorerTransportError,
    UnknownConceptError,
    YearRangeError,
)
from .graph import ConceptPair, EvolvingGraph, k_hop_neighborhood
from .sampler import LinkSample, PromptWord, parse_sample, serialize_sample

SCORER_URL_ENV = "CONCEPT_FORGE_SCORER_URL"
DEFAULT_BATCH_SIZE = 64


class PairLogits(tuple):
    """(related, unrelated) logit pair; score is their difference."""

    __slots__ = ()

    def __new__(cls, related: float, unrelated: float):
        return super().__new__(cls, (float(related), float(unrelated)))

    @property
    def related(self) -> float:
        return self[0]

    @property
    def unrelated(self) -> float:
        return self[1]

    @property
    def score(self) -> float:
        return self[0] - self[1]


class Predictor(Protocol):
    def score_sequences(self, sequences: Sequence[str]) -> list[PairLogits]: ...


class StubScorer:
    """Lookup-table scorer keyed by (c_u, c_v, t); both pair orientations hit."""

    def __init__(self, table: dict[tuple[str, str, int], tuple[float, float]],
                 default: tuple[float, float] = (-1.0, 1.0)):
        self.table = dict(table)
        self.default = default

    def score_sequences(self, sequences: Sequence[str]) -> list[PairLogits]:
        out = []
        for text in sequences:
            c_u, c_v, t, _prompt = parse_sample(text)
            logits = self.table.get((c_u, c_v, t)) or self.table.get((c_v, c_u, t)) or self.default
            out.append(PairLogits(*logits))
        return out


def heuristic_score(g: EvolvingGraph, t: int, pair: ConceptPair) -> PairLogits:
    """related = log(1 + common neighbors) + jaccard of neighbor sets; unrelated = 0."""
    if pair.lo not in g.concepts or pair.hi not in g.concepts:
        raise UnknownConceptError(f"unknown concept in pair {pair}")
    nu = g.neighbors(pair.lo, t)
    nv = g.neighbors(pair.hi, t)
    common = len(nu & nv)
    union = len(nu | nv)
    jaccard = common / union if union else 0.0
    return PairLogits(math.log1p(common) + jaccard, 0.0)


class HeuristicScorer:
    """Graph-feature scorer.

    A sequence asking about year t is scored on snapshot t-1 (clamped into
    the graph's range): predicting year t must not see year t's edges.
    """

    def __init__(self, graph: EvolvingGraph):
        self.graph = graph

    def score_sequences(self, sequences: Sequence[str]) -> list[PairLogits]:
        out = []
        for text in sequences:
            c_u, c_v, t, _prompt = parse_sample(text)
            feature_year = min(max(t - 1, self.graph.t_start), self.graph.t_end)
            out.append(heuristic_score(self.graph, feature_year, ConceptPair.of(c_u, c_v)))
        return out


class RandomScorer:
    """Seeded coin-flip baseline: related wins with probability p_related."""

    def __init__(self, seed: int, p_related: float = 0.5):
        self._rng = random.Random(seed)
        self.p_related = p_related

    def score_sequences(self, sequences: Sequence[str]) -> list[PairLogits]:
        return [PairLogits(1.0, 0.0) if self._rng.random() < self.p_related else PairLogits(0.0, 1.0)
                for _ in sequences]


def _validate_logits(raw, expected_len: int) -> list[PairLogits]:
    if not isinstance(raw, list) or len(raw) != expected_len:
        raise ScorerProtocolError(
            f"expected {expected_len} logit pairs, got {len(raw) if isinstance(raw, list) else type(raw).__name__}"
        )
    out = []
    for entry in raw:
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise ScorerProtocolError(f"logit entry must be a [related, unrelated] pair, got {entry!r}")
        related, unrelated = entry
        if not all(isinstance(x, (int, float)) and math.isfinite(x) for x in (related, unrelated)):
            raise ScorerProtocolError(f"non-finite logits: {entry!r}")
        out.append(PairLogits(related, unrelated))
    return out


class RemoteScorer:
    """HTTP client for the wire protocol with bounded retries."""

    def __init__(self, endpoint: str, timeout: float = 30.0, max_retries: int = 3,
                 session: requests.Session | None = None):
        self.endpoint = endpoint
        self.timeout = timeout
        self.max_retries = max_retries
        self._session = session or requests.Session()

    def score_sequences(self, sequences: Sequence[str]) -> list[PairLogits]:
        payload = {"sequences": list(sequences)}
        last_error: Exception | None = None
        for attempt in range(1, self.max_retries + 1):
            try:
                resp = self._session.post(self.endpoint, json=payload, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
                time.sleep(min(0.1 * attempt, 1.0))
                continue
            if resp.status_code >= 500:
                last_error = ScorerTransportError(f"server error {resp.status_code}", attempts=attempt)
                time.sleep(min(0.1 * attempt, 1.0))
                continue
            if resp.status_code != 200:
                raise ScorerProtocolError(f"unexpected status {resp.status_code}: {resp.text[:200]}")
            try:
                body = resp.json()
            except ValueError as exc:
                raise ScorerProtocolError(f"response is not JSON: {exc}") from exc
            if not isinstance(body, dict) or "logits" not in body:
                raise ScorerProtocolError("response missing 'logits'")
            return _validate_logits(body["logits"], len(sequences))
        raise ScorerTransportError(f"scorer unreachable at {self.endpoint}: {last_error}",
                                   attempts=self.max_retries)


class StdioScorer:
    """Wire protocol over a subprocess: one JSON request/response per line."""

    def __init__(self, command: Sequence[str]):
        self.command = list(command)
        self._proc: subprocess.Popen | None = None

    def _process(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True,
            )
        return self._proc

    def score_sequences(self, sequences: Sequence[str]) -> list[PairLogits]:
        proc = self._process()
        try:
            proc.stdin.write(json.dumps({"sequences": list(sequences)}) + "\n")
            proc.stdin.flush()
            line = proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise ScorerTransportError(f"stdio scorer pipe failed: {exc}", attempts=1) from exc
        if not line:
            raise ScorerTransportError("stdio scorer closed its output", attempts=1)
        try:
            body = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ScorerProtocolError(f"stdio response is not JSON: {exc}") from exc
        if not isinstance(body, dict) or "logits" not in body:
            raise ScorerProtocolError("stdio response missing 'logits'")
        return _validate_logits(body["logits"], len(sequences))

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=10)
        self._proc = None

    def __enter__(self) -> "StdioScorer":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def score_batch(scorer: Predictor, samples: Sequence[LinkSample],
                batch_size: int = DEFAULT_BATCH_SIZE) -> list[PairLogits]:
    """Score samples in order, in batches; one PairLogits per input sample."""
    if batch_size < 1:
        raise ValueError("batch_size must be positive")
    out: list[PairLogits] = []
    for i in range(0, len(samples), batch_size):
        chunk = samples[i : i + batch_size]
        logits = scorer.score_sequences([s.text for s in chunk])
        if len(logits) != len(chunk):
            raise ScorerProtocolError(f"scorer returned {len(logits)} results for {len(chunk)} inputs")
        for lg in logits:
            if not (math.isfinite(lg.related) and math.isfinite(lg.unrelated)):
                raise ScorerProtocolError(f"non-finite logits {lg}")
        out.extend(logits)
    return out


@dataclass(frozen=True)
class PredictionResult:
    target_year: int
    predicted_edges: frozenset[ConceptPair]
    ranked_candidates: tuple[tuple[ConceptPair, float], ...]


def candidate_pairs(g: EvolvingGraph, base_year: int, hops: int,
                    all_pairs: bool = False) -> list[ConceptPair]:
    """Unconnected pairs to score: within `hops` of each other at base_year,
    or every unconnected pair when all_pairs is set."""
    edges = g.edges(base_year)
    found: set[ConceptPair] = set()
    concepts = sorted(g.concepts)
    if all_pairs:
        for i in range(len(concepts)):
            for j in range(i + 1, len(concepts)):
                pair = ConceptPair(concepts[i], concepts[j])
                if pair not in edges:
                    found.add(pair)
    else:
        for u in concepts:
            for v in k_hop_neighborhood(g, base_year, u, hops):
                pair = ConceptPair.of(u, v)
                if pair not in edges:
                    found.add(pair)
    return sorted(found)


def predict_snapshot(g: EvolvingGraph, scorer: Predictor, target_year: int,
                     clamp_existing: bool = True, top_k: int | None = None,
                     candidate_hops: int = 2, all_pairs: bool = False,
                     batch_size: int = DEFAULT_BATCH_SIZE) -> PredictionResult:
    """Predict the adjacency at target_year from the preceding snapshot.

    target_year may be t_end + 1 (forecast) or t_end (held-out evaluation);
    only the snapshot at target_year - 1 informs candidates and clamping.
    A candidate is predicted connected iff related > unrelated (strictly);
    with clamping, every edge already present stays predicted.
    """
    if target_year not in (g.t_end, g.t_end + 1):
        raise YearRangeError(f"target_year must be {g.t_end} or {g.t_end + 1}, got {target_year}")
    base_year = target_year - 1
    if base_year < g.t_start:
        raise YearRangeError(f"no snapshot precedes target year {target_year}")
    candidates = candidate_pairs(g, base_year, candidate_hops, all_pairs=all_pairs)
    # Candidates are unconnected at base_year, so their prompt is always Unknown.
    texts = [serialize_sample(p.lo, p.hi, target_year, PromptWord.UNKNOWN) for p in candidates]
    logits: list[PairLogits] = []
    for i in range(0, len(texts), batch_size):
        chunk = texts[i : i + batch_size]
        result = scorer.score_sequences(chunk)
        if len(result) != len(chunk):
            raise ScorerProtocolError(f"scorer returned {len(result)} results for {len(chunk)} inputs")
        logits.extend(result)
    predicted: set[ConceptPair] = set(g.edges(base_year)) if clamp_existing else set()
    ranked: list[tuple[ConceptPair, float]] = []
    for pair, lg in zip(candidates, logits):
        ranked.append((pair, lg.score))
        if lg.related > lg.unrelated:
            predicted.add(pair)
    ranked.sort(key=lambda item: (-item[1], item[0]))
    if top_k is not None:
        ranked = ranked[:top_k]
    return PredictionResult(target_year=target_year,
                            predicted_edges=frozenset(predicted),
                            ranked_candidates=tuple(ranked))


def prediction_to_payload(result: PredictionResult) -> dict:
    return {
        "target_year": result.target_year,
        "predicted_edges": [[p.lo, p.hi] for p in sorted(result.predicted_edges)],
        "ranked_candidates": [[[p.lo, p.hi], score] for p, score in result.ranked_candidates],
    }


def write_prediction_json(result: PredictionResult, path: str | Path) -> None:
    Path(path).write_text(json.dumps(prediction_to_payload(result), indent=2) + "\n",
                          encoding="utf-8")


def load_prediction_json(path: str | Path) -> PredictionResult:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return PredictionResult(
        target_year=payload["target_year"],
        predicted_edges=frozenset(ConceptPair.of(a, b) for a, b in payload["predicted_edges"]),
        ranked_candidates=tuple((ConceptPair.of(a, b), float(score))
                                for (a, b), score in payload["ranked_candidates"]),
    )
