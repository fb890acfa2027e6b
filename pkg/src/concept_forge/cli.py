"""Command-line pipeline runner.

Commands: build-graph, sample, quintuples, predict, evaluate, analyze, all.
Exit codes: 0 success, 2 config error, 3 missing upstream artifact,
4 scorer transport failure. Artifacts are written atomically and reruns with
the same config and seeds are byte-identical.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from . import graph as graph_mod
from . import quintuple as quintuple_mod
from . import sampler as sampler_mod
from . import scorer as scorer_mod
from . import textmetrics
from .config import PipelineConfig, load_config
from .corpus import build_index, load_corpus, load_vocabulary
from .errors import (
    ConceptForgeError,
    ConfigError,
    MissingArtifactError,
    ScorerTransportError,
)
from .evaluation import evaluate_prediction, metrics_to_csv, metrics_to_json

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISSING_ARTIFACT = 3
EXIT_SCORER_TRANSPORT = 4

GRAPH_FILE = "graph.json"
SAMPLES_FILE = "samples.jsonl"
QUINTUPLES_FILE = "quintuples.jsonl"
SPLITS_FILE = "splits.json"
PREDICTION_FILE = "prediction.json"
METRICS_JSON_FILE = "metrics.json"
METRICS_CSV_FILE = "metrics.csv"
ANALYSIS_FILE = "analysis.json"

logger = logging.getLogger(__name__)


def _write_atomic(path: Path, text: str) -> None:
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp_name)
        raise


@contextlib.contextmanager
def _output_lock(outdir: Path):
    outdir.mkdir(parents=True, exist_ok=True)
    lock = outdir / ".concept-forge.lock"
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise ConfigError(f"output directory is locked by another run: {lock}")
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        with contextlib.suppress(OSError):
            os.unlink(lock)


def _require_artifact(path: Path, producer: str) -> Path:
    if not path.is_file():
        raise MissingArtifactError(str(path), producer)
    return path


def _build_scorer(cfg: PipelineConfig, graph):
    if cfg.scorer.kind == "heuristic":
        return scorer_mod.HeuristicScorer(graph)
    if cfg.scorer.kind == "stub":
        # Everything-negative stub; useful for exercising the clamp floor.
        return scorer_mod.StubScorer({}, default=(-1.0, 1.0))
    return scorer_mod.RemoteScorer(cfg.scorer.endpoint, timeout=cfg.scorer.timeout)


def cmd_build_graph(cfg: PipelineConfig) -> None:
    corpus = load_corpus(cfg.corpus_path)
    vocab = load_vocabulary(cfg.vocabulary_path)
    index = build_index(corpus, vocab)
    graph = graph_mod.build_evolving_graph(index, corpus, cfg.t_start, cfg.t_end)
    _write_atomic(cfg.output_dir / GRAPH_FILE, graph_mod.export_graph_json(graph))
    print(f"graph: {graph.num_concepts} concepts, years {graph.t_start}-{graph.t_end}")
    for t in graph.years():
        print(f"  {t}: {len(graph.edges(t))} edges")


def cmd_sample(cfg: PipelineConfig) -> None:
    graph = graph_mod.load_graph_json(_require_artifact(cfg.output_dir / GRAPH_FILE, "build-graph"))
    sampler_cfg = sampler_mod.SamplerConfig(
        k=cfg.sampler.k, d=cfg.sampler.d,
        max_negatives_per_anchor=cfg.sampler.max_negatives_per_anchor,
        seed=cfg.sampler.seed,
    )
    positives = sampler_mod.generate_positives(graph)
    negatives = sampler_mod.generate_negatives(graph, sampler_cfg)
    path = cfg.output_dir / SAMPLES_FILE
    _write_atomic(path, sampler_mod.samples_to_jsonl(positives + negatives))
    print(f"samples: {len(positives)} positive, {len(negatives)} negative -> {path}")


def cmd_quintuples(cfg: PipelineConfig) -> None:
    corpus = load_corpus(cfg.corpus_path)
    vocab = load_vocabulary(cfg.vocabulary_path)
    index = build_index(corpus, vocab)
    raw = quintuple_mod.extract_quintuples(index, corpus, cfg.quintuple.citation_threshold)
    bound, dropped = quintuple_mod.bind_all(raw, index, corpus, cfg.quintuple.seed)
    kept = quintuple_mod.filter_quintuples(bound, cfg.quintuple.filter_rules)
    dataset = quintuple_mod.split_dataset(kept, cfg.quintuple.split_ratios, cfg.quintuple.seed)
    lines = [json.dumps(quintuple_mod.quintuple_to_payload(q)) for q in kept]
    _write_atomic(cfg.output_dir / QUINTUPLES_FILE, "".join(line + "\n" for line in lines))
    manifest = {
        "seed": dataset.seed,
        "train": [list(q.key) for q in dataset.train],
        "valid": [list(q.key) for q in dataset.valid],
        "test": [list(q.key) for q in dataset.test],
    }
    _write_atomic(cfg.output_dir / SPLITS_FILE, json.dumps(manifest, indent=2) + "\n")
    print(f"quintuples: {len(raw)} extracted, {dropped} unbindable, {len(kept)} after filters "
          f"(splits {len(dataset.train)}/{len(dataset.valid)}/{len(dataset.test)})")


def cmd_predict(cfg: PipelineConfig) -> None:
    graph = graph_mod.load_graph_json(_require_artifact(cfg.output_dir / GRAPH_FILE, "build-graph"))
    scorer = _build_scorer(cfg, graph)
    hops = cfg.eval.candidate_hops if cfg.eval.candidate_hops is not None else cfg.sampler.k
    result = scorer_mod.predict_snapshot(
        graph, scorer, cfg.eval.test_year,
        clamp_existing=cfg.eval.clamp_existing, top_k=cfg.eval.top_k,
        candidate_hops=hops, all_pairs=cfg.eval.all_pairs,
        batch_size=cfg.scorer.batch_size,
    )
    _write_atomic(cfg.output_dir / PREDICTION_FILE,
                  json.dumps(scorer_mod.prediction_to_payload(result), indent=2) + "\n")
    print(f"predict: {len(result.predicted_edges)} edges predicted for {result.target_year}, "
          f"{len(result.ranked_candidates)} ranked candidates")


def cmd_evaluate(cfg: PipelineConfig) -> None:
    graph = graph_mod.load_graph_json(_require_artifact(cfg.output_dir / GRAPH_FILE, "build-graph"))
    prediction = scorer_mod.load_prediction_json(
        _require_artifact(cfg.output_dir / PREDICTION_FILE, "predict"))
    metrics = evaluate_prediction(graph, prediction, cfg.eval.test_year)
    _write_atomic(cfg.output_dir / METRICS_JSON_FILE, metrics_to_json(metrics))
    _write_atomic(cfg.output_dir / METRICS_CSV_FILE, metrics_to_csv([metrics]))
    print(metrics_to_csv([metrics]), end="")


def cmd_analyze(cfg: PipelineConfig) -> None:
    if cfg.analysis_pairs_path is not None:
        pairs_path = _require_artifact(cfg.analysis_pairs_path, "the verbalizer")
        rows = []
        with pairs_path.open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    rows.append(json.loads(line))
        entries = [(r["input"], r["output"], r.get("reference", r["output"])) for r in rows]
    else:
        qs = quintuple_mod.load_quintuples(
            _require_artifact(cfg.output_dir / QUINTUPLES_FILE, "quintuples"))
        entries = [(quintuple_mod.serialize_seq(q), q.idea, q.idea) for q in qs]
    if not entries:
        report = {"count": 0, "overlap": {str(n): None for n in range(1, 6)},
                  "bleu": None, "rouge_l": None}
    else:
        overlap_sums: dict[str, list[float]] = {str(n): [] for n in range(1, 6)}
        bleu_scores, rouge_scores = [], []
        for input_text, output_text, reference in entries:
            for n in range(1, 6):
                value = textmetrics.ngram_overlap(input_text, output_text, n)
                if value is not None:
                    overlap_sums[str(n)].append(value)
            bleu_scores.append(textmetrics.bleu(output_text, [reference]))
            rouge_scores.append(textmetrics.rouge_l(output_text, reference))
        report = {
            "count": len(entries),
            "overlap": {n: (sum(v) / len(v) if v else None) for n, v in overlap_sums.items()},
            "bleu": sum(bleu_scores) / len(bleu_scores),
            "rouge_l": sum(rouge_scores) / len(rouge_scores),
        }
    _write_atomic(cfg.output_dir / ANALYSIS_FILE, json.dumps(report, indent=2) + "\n")
    print(f"analyze: {report['count']} pair(s) -> {cfg.output_dir / ANALYSIS_FILE}")


_COMMANDS = {
    "build-graph": cmd_build_graph,
    "sample": cmd_sample,
    "quintuples": cmd_quintuples,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "analyze": cmd_analyze,
}

_ALL_ORDER = ("build-graph", "sample", "quintuples", "predict", "evaluate", "analyze")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="concept-forge",
                                     description="Concept co-occurrence pipeline runner")
    parser.add_argument("command", choices=list(_COMMANDS) + ["all"])
    parser.add_argument("--config", required=True, help="path to the pipeline config JSON")
    parser.add_argument("--out", default=None, help="override the configured output directory")
    parser.add_argument("--seed", type=int, default=None, help="override sampler/quintuple seeds")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(message)s")

    try:
        cfg = load_config(args.config, out_override=args.out, seed_override=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    steps = _ALL_ORDER if args.command == "all" else (args.command,)
    try:
        with _output_lock(cfg.output_dir):
            for step in steps:
                _COMMANDS[step](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MissingArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_ARTIFACT
    except ScorerTransportError as exc:
        print(f"scorer transport error: {exc}", file=sys.stderr)
        return EXIT_SCORER_TRANSPORT
    except ConceptForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
