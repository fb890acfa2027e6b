from __future__ import annotations

import hashlib
import json

import pytest

from concept_forge.cli import (
    EXIT_CONFIG,
    EXIT_MISSING_ARTIFACT,
    EXIT_OK,
    GRAPH_FILE,
    METRICS_JSON_FILE,
    PREDICTION_FILE,
    main,
)
from concept_forge.graph import load_graph_json
from concept_forge.synthetic import write_synthetic_bundle

ARTIFACTS = ["graph.json", "samples.jsonl", "quintuples.jsonl", "splits.json",
             "prediction.json", "metrics.json", "metrics.csv", "analysis.json"]


@pytest.fixture(scope="module")
def bundle(tmp_path_factory):
    root = tmp_path_factory.mktemp("bundle")
    write_synthetic_bundle(root, seed=4242)
    return root


def run(bundle, *args):
    return main([*args, "--config", str(bundle / "config.json")])


def digest_artifacts(outdir):
    return {name: hashlib.sha256((outdir / name).read_bytes()).hexdigest()
            for name in ARTIFACTS}


def test_full_pipeline_completes(bundle, capsys):
    assert run(bundle, "all") == EXIT_OK
    out = capsys.readouterr().out
    assert "graph:" in out and "samples:" in out and "quintuples:" in out
    outdir = bundle / "out"
    for name in ARTIFACTS:
        assert (outdir / name).is_file(), name


def test_rerun_is_byte_identical(bundle):
    outdir = bundle / "out"
    assert run(bundle, "all") == EXIT_OK
    first = digest_artifacts(outdir)
    assert run(bundle, "all") == EXIT_OK
    assert digest_artifacts(outdir) == first


def test_missing_vocabulary_is_config_error(bundle, tmp_path, capsys):
    config = json.loads((bundle / "config.json").read_text())
    config["vocabulary"] = "does-not-exist.tsv"
    config["corpus"] = str(bundle / "corpus.jsonl")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(config))
    assert main(["build-graph", "--config", str(bad)]) == EXIT_CONFIG
    assert "vocabulary" in capsys.readouterr().err


def test_unknown_config_key_rejected(bundle, tmp_path, capsys):
    config = json.loads((bundle / "config.json").read_text())
    config["corpus"] = str(bundle / "corpus.jsonl")
    config["vocabulary"] = str(bundle / "vocab.tsv")
    config["typo_field"] = 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(config))
    assert main(["build-graph", "--config", str(bad)]) == EXIT_CONFIG
    assert "typo_field" in capsys.readouterr().err


def test_upstream_artifact_missing(bundle, tmp_path, capsys):
    assert run(bundle, "sample", "--out", str(tmp_path / "fresh")) == EXIT_MISSING_ARTIFACT
    err = capsys.readouterr().err
    assert GRAPH_FILE in err and "build-graph" in err


def test_predict_before_graph_names_producer(bundle, tmp_path, capsys):
    assert run(bundle, "predict", "--out", str(tmp_path / "fresh2")) == EXIT_MISSING_ARTIFACT
    assert "build-graph" in capsys.readouterr().err


def test_lock_file_rejects_concurrent_run(bundle, capsys):
    outdir = bundle / "out"
    lock = outdir / ".concept-forge.lock"
    lock.write_text("held")
    try:
        assert run(bundle, "build-graph") == EXIT_CONFIG
        assert "locked" in capsys.readouterr().err
    finally:
        lock.unlink()


def test_lock_released_after_run(bundle):
    assert run(bundle, "build-graph") == EXIT_OK
    assert not (bundle / "out" / ".concept-forge.lock").exists()


def test_graph_export_matches_library(bundle):
    assert run(bundle, "build-graph") == EXIT_OK
    g = load_graph_json(bundle / "out" / GRAPH_FILE)
    assert g.t_start == 2000 and g.t_end == 2010
    assert g.num_concepts == 30


def test_evaluate_perfect_prediction_is_all_ones(bundle, capsys):
    assert run(bundle, "build-graph") == EXIT_OK
    outdir = bundle / "out"
    g = load_graph_json(outdir / GRAPH_FILE)
    payload = {
        "target_year": 2010,
        "predicted_edges": [[p.lo, p.hi] for p in sorted(g.edges(2010))],
        "ranked_candidates": [],
    }
    (outdir / PREDICTION_FILE).write_text(json.dumps(payload))
    assert run(bundle, "evaluate") == EXIT_OK
    metrics = json.loads((outdir / METRICS_JSON_FILE).read_text())
    assert all(metrics[k] == 1.0 for k in metrics)
    capsys.readouterr()


def write_micro_config(tmp_path, records, vocab_lines):
    corpus = tmp_path / "corpus.jsonl"
    corpus.write_text("".join(json.dumps(r) + "\n" for r in records))
    vocab = tmp_path / "vocab.tsv"
    vocab.write_text("".join(f"{s}\t{s}\n" for s in vocab_lines))
    config = {
        "corpus": "corpus.jsonl", "vocabulary": "vocab.tsv",
        "years": {"start": 2000, "end": 2002}, "output_dir": "out",
        "sampler": {}, "scorer": {}, "eval": {"test_year": 2002},
        "quintuple": {}, "analysis": {},
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    return path


def test_build_graph_export_is_byte_exact(tmp_path):
    from concept_forge.corpus import build_index, load_corpus, load_vocabulary
    from concept_forge.graph import build_evolving_graph, export_graph_json

    records = [
        {"id": "p1", "year": 2000, "sentences": ["alpha meets beta here."], "references": []},
        {"id": "p2", "year": 2001, "sentences": ["beta meets gamma here."], "references": []},
        {"id": "p3", "year": 2002, "sentences": ["alpha meets gamma here."], "references": []},
    ]
    config = write_micro_config(tmp_path, records, ["alpha", "beta", "gamma"])
    assert main(["build-graph", "--config", str(config)]) == EXIT_OK
    corpus = load_corpus(tmp_path / "corpus.jsonl")
    vocab = load_vocabulary(tmp_path / "vocab.tsv")
    expected = export_graph_json(build_evolving_graph(build_index(corpus, vocab), corpus,
                                                      2000, 2002))
    assert (tmp_path / "out" / GRAPH_FILE).read_text() == expected


def test_build_graph_on_empty_corpus(tmp_path, capsys):
    config = write_micro_config(tmp_path, [], ["alpha"])
    assert main(["build-graph", "--config", str(config)]) == EXIT_OK
    payload = json.loads((tmp_path / "out" / GRAPH_FILE).read_text())
    assert payload["concepts"] == []
    assert all(s["edges"] == [] for s in payload["snapshots"])
    capsys.readouterr()


def test_seed_override_changes_split(bundle, tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert run(bundle, "quintuples", "--out", str(out_a), "--seed", "1") == EXIT_OK
    assert run(bundle, "quintuples", "--out", str(out_b), "--seed", "2") == EXIT_OK
    splits_a = json.loads((out_a / "splits.json").read_text())
    splits_b = json.loads((out_b / "splits.json").read_text())
    assert splits_a["train"] != splits_b["train"]
