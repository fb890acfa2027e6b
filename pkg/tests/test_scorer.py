from __future__ import annotations

import json
import math
import sys
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer
from pathlib import Path

import pytest

from concept_forge.errors import ScorerProtocolError, ScorerTransportError, YearRangeError
from concept_forge.graph import ConceptPair
from concept_forge.sampler import Label, PromptWord, make_sample
from concept_forge.scorer import (
    HeuristicScorer,
    PairLogits,
    RandomScorer,
    RemoteScorer,
    StdioScorer,
    StubScorer,
    candidate_pairs,
    heuristic_score,
    predict_snapshot,
    score_batch,
)

from conftest import graph_from_edges

FIXTURES = Path(__file__).parent / "fixtures"


def sample(u, v, t, prompt=PromptWord.UNKNOWN, label=Label.RELATED):
    return make_sample(u, v, t, prompt, label)


# ---------------------------------------------------------------------------
# score_batch with built-in scorers

def test_stub_lookup():
    stub = StubScorer({("a", "b", 2021): (2.0, -1.0)})
    [logits] = score_batch(stub, [sample("a", "b", 2021)])
    assert logits == PairLogits(2.0, -1.0)
    # Reverse orientation resolves to the same table entry.
    [logits] = score_batch(stub, [sample("b", "a", 2021)])
    assert logits == PairLogits(2.0, -1.0)


def test_empty_batch():
    assert score_batch(StubScorer({}), []) == []


def test_order_preserved_across_batch_sizes():
    table = {("a", f"c{i}", 2000): (float(i), 0.0) for i in range(10)}
    stub = StubScorer(table)
    samples = [sample("a", f"c{i}", 2000) for i in range(10)]
    for batch_size in (1, 3, 10, 64):
        logits = score_batch(stub, samples, batch_size=batch_size)
        assert [lg.related for lg in logits] == [float(i) for i in range(10)]


def test_common_neighbors_raise_heuristic_score():
    # hub graph: x shares 3 neighbors with y; p and q share none.
    edges = {("x", f"m{i}"): 2000 for i in range(3)}
    edges.update({("y", f"m{i}"): 2000 for i in range(3)})
    edges[("p", "x")] = 2000
    edges[("q", "y")] = 2000
    g = graph_from_edges(["x", "y", "p", "q", "m0", "m1", "m2"], 2000, 2000, edges)
    scorer = HeuristicScorer(g)
    rich, poor = score_batch(scorer, [sample("x", "y", 2000), sample("p", "q", 2000)])
    assert rich.score > poor.score


# ---------------------------------------------------------------------------
# heuristic_score

def test_heuristic_zero_for_disconnected_pair():
    g = graph_from_edges(["a", "b"], 2000, 2000, {})
    assert heuristic_score(g, 2000, ConceptPair.of("a", "b")) == PairLogits(0.0, 0.0)


def test_heuristic_triangle_closing_value():
    g = graph_from_edges(["a", "b", "c"], 2000, 2000, {("a", "b"): 2000, ("b", "c"): 2000})
    logits = heuristic_score(g, 2000, ConceptPair.of("a", "c"))
    # one common neighbor; jaccard = |{b}| / |{b}| = 1
    assert logits.related == pytest.approx(math.log(2) + 1.0, abs=1e-12)
    assert logits.unrelated == 0.0


def test_heuristic_symmetric():
    g = graph_from_edges(["a", "b", "c", "d"], 2000, 2000,
                         {("a", "b"): 2000, ("b", "c"): 2000, ("c", "d"): 2000})
    assert heuristic_score(g, 2000, ConceptPair.of("a", "c")) == \
        heuristic_score(g, 2000, ConceptPair.of("c", "a"))


# ---------------------------------------------------------------------------
# predict_snapshot

def triangle_base():
    # a-b and b-c connected through 2001; (a, c) is the only 2-hop candidate.
    return graph_from_edges(["a", "b", "c"], 2000, 2001,
                            {("a", "b"): 2000, ("b", "c"): 2000})


def test_all_negative_scorer_with_clamp_returns_prior_edges():
    g = triangle_base()
    result = predict_snapshot(g, StubScorer({}, default=(-1.0, 1.0)), 2002)
    assert result.predicted_edges == g.edges(2001)


def test_single_positive_stub_adds_one_pair():
    g = triangle_base()
    stub = StubScorer({("a", "c", 2002): (1.0, -1.0)}, default=(-1.0, 1.0))
    result = predict_snapshot(g, stub, 2002)
    assert result.predicted_edges == g.edges(2001) | {ConceptPair.of("a", "c")}


def test_tie_counts_as_unrelated():
    g = triangle_base()
    stub = StubScorer({}, default=(0.5, 0.5))
    result = predict_snapshot(g, stub, 2002, clamp_existing=False)
    assert result.predicted_edges == frozenset()


def test_clamp_off_keeps_only_scored_positives():
    g = triangle_base()
    stub = StubScorer({("a", "c", 2002): (1.0, 0.0)}, default=(-1.0, 1.0))
    result = predict_snapshot(g, stub, 2002, clamp_existing=False)
    assert result.predicted_edges == {ConceptPair.of("a", "c")}


def test_top_k_truncates_ranking():
    # Star: 25 leaves around one hub; every leaf pair is a 2-hop candidate.
    leaves = [f"leaf{i:02d}" for i in range(25)]
    edges = {("hub", leaf): 2000 for leaf in leaves}
    g = graph_from_edges(["hub"] + leaves, 2000, 2000, edges)
    result = predict_snapshot(g, HeuristicScorer(g), 2001, top_k=20)
    assert len(result.ranked_candidates) == 20
    scores = [score for _, score in result.ranked_candidates]
    assert scores == sorted(scores, reverse=True)


def test_target_year_validation():
    g = triangle_base()
    stub = StubScorer({})
    with pytest.raises(YearRangeError):
        predict_snapshot(g, stub, 2004)
    with pytest.raises(YearRangeError):
        predict_snapshot(g, stub, 2000)
    # held-out mode: target t_end, base snapshot t_end - 1
    result = predict_snapshot(g, StubScorer({}, default=(-1.0, 1.0)), 2001)
    assert result.predicted_edges == g.edges(2000)


def test_argmax_invariant_under_constant_shift():
    g = triangle_base()

    class Shifted:
        def __init__(self, inner, delta):
            self.inner, self.delta = inner, delta

        def score_sequences(self, sequences):
            return [PairLogits(lg.related + self.delta, lg.unrelated + self.delta)
                    for lg in self.inner.score_sequences(sequences)]

    base_scorer = StubScorer({("a", "c", 2002): (0.3, 0.1)}, default=(-1.0, 1.0))
    plain = predict_snapshot(g, base_scorer, 2002)
    shifted = predict_snapshot(g, Shifted(base_scorer, 17.5), 2002)
    assert plain.predicted_edges == shifted.predicted_edges
    assert [p for p, _ in plain.ranked_candidates] == [p for p, _ in shifted.ranked_candidates]


def test_clamp_superset_property():
    import random as _random

    from oracles import random_evolving_graph

    rng = _random.Random(13)
    for seed in range(10):
        g = random_evolving_graph(rng, max_nodes=12)
        result = predict_snapshot(g, RandomScorer(seed), g.t_end + 1, clamp_existing=True)
        assert result.predicted_edges >= g.edges(g.t_end)


def test_candidates_are_unconnected_within_hops():
    g = triangle_base()
    assert candidate_pairs(g, 2001, 2) == [ConceptPair.of("a", "c")]
    all_pairs = candidate_pairs(g, 2001, 2, all_pairs=True)
    assert all_pairs == [ConceptPair.of("a", "c")]  # only non-edge on 3 nodes


# ---------------------------------------------------------------------------
# remote wire protocol

class _Handler(BaseHTTPRequestHandler):
    script = []  # list of (status, payload) consumed per request
    received = []

    def do_POST(self):
        length = int(self.headers["Content-Length"])
        body = json.loads(self.rfile.read(length))
        type(self).received.append(body)
        status, payload = self.script.pop(0) if self.script else (200, {"logits": []})
        data = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture
def wire_server():
    server = HTTPServer(("127.0.0.1", 0), _Handler)
    _Handler.script = []
    _Handler.received = []
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}/score", _Handler
    server.shutdown()
    thread.join(timeout=5)


def test_remote_scorer_round_trip(wire_server):
    url, handler = wire_server
    fixtures = json.loads((FIXTURES / "scorer_wire.json").read_text())
    scorer = RemoteScorer(url)
    for case in fixtures["cases"]:
        handler.script.append((200, case["response"]))
        logits = scorer.score_sequences(case["request"]["sequences"])
        assert [[lg.related, lg.unrelated] for lg in logits] == case["response"]["logits"]
        assert handler.received[-1] == case["request"]


def test_remote_scorer_retries_then_succeeds(wire_server):
    url, handler = wire_server
    handler.script.extend([(500, {}), (200, {"logits": [[1.0, 0.0]]})])
    scorer = RemoteScorer(url, max_retries=3)
    assert scorer.score_sequences(["x"]) == [PairLogits(1.0, 0.0)]
    assert len(handler.received) == 2


def test_remote_scorer_transport_error_counts_attempts(wire_server):
    url, handler = wire_server
    handler.script.extend([(500, {})] * 3)
    scorer = RemoteScorer(url, max_retries=3)
    with pytest.raises(ScorerTransportError) as excinfo:
        scorer.score_sequences(["x"])
    assert excinfo.value.attempts == 3


def test_remote_scorer_rejects_malformed_response(wire_server):
    url, handler = wire_server
    handler.script.append((200, {"logits": [[1.0, 0.0], [2.0, 0.0]]}))  # wrong length
    with pytest.raises(ScorerProtocolError):
        RemoteScorer(url).score_sequences(["only one"])
    handler.script.append((200, {"nope": []}))
    with pytest.raises(ScorerProtocolError):
        RemoteScorer(url).score_sequences([])


def test_remote_scorer_unreachable_endpoint():
    scorer = RemoteScorer("http://127.0.0.1:1/score", max_retries=2, timeout=0.2)
    with pytest.raises(ScorerTransportError) as excinfo:
        scorer.score_sequences(["x"])
    assert excinfo.value.attempts == 2


_STDIO_CHILD = r"""
import json, sys
for line in sys.stdin:
    req = json.loads(line)
    logits = [[float(len(s)), 0.0] for s in req["sequences"]]
    print(json.dumps({"logits": logits}), flush=True)
"""


def test_stdio_scorer_round_trip():
    with StdioScorer([sys.executable, "-c", _STDIO_CHILD]) as scorer:
        logits = scorer.score_sequences(["ab", "abcd"])
        assert logits == [PairLogits(2.0, 0.0), PairLogits(4.0, 0.0)]
        assert scorer.score_sequences([]) == []


def test_random_scorer_is_seeded():
    texts = [sample("a", f"b{i}", 2000).text for i in range(20)]
    a = RandomScorer(5).score_sequences(texts)
    b = RandomScorer(5).score_sequences(texts)
    assert a == b
    assert any(lg.related > lg.unrelated for lg in a)
    assert any(lg.related < lg.unrelated for lg in a)
