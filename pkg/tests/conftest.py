from __future__ import annotations

import json

import pytest

from concept_forge.corpus import ConceptVocabulary, CorpusStore, PaperRecord
from concept_forge.graph import ConceptPair, EvolvingGraph

_ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): spec acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is not None and report.when == "call":
        _ACCEPTANCE_RESULTS.append((marker.args[0], "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for name, status in _ACCEPTANCE_RESULTS:
            terminalreporter.write_line(f"{status}: {name}")


@pytest.fixture
def write_corpus(tmp_path):
    """Write records (dicts) as a JSONL corpus file and return its path."""

    def _write(records, name="corpus.jsonl"):
        path = tmp_path / name
        path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
        return path

    return _write


def make_paper(paper_id, year, concepts=(), references=(), citation_count=0,
               sentences=None, section_labels=None):
    """PaperRecord whose sentences mention the given concept surfaces."""
    if sentences is None:
        sentences = tuple(f"This paper studies {c} in depth." for c in concepts)
    return PaperRecord(
        id=paper_id, year=year, title=f"About {paper_id}",
        sentences=tuple(sentences), references=tuple(references),
        citation_count=citation_count,
        section_labels=tuple(section_labels) if section_labels else None,
    )


def corpus_of(*records):
    return CorpusStore.from_records(records)


def vocab_of(*surfaces):
    return ConceptVocabulary.from_surfaces(surfaces)


def graph_from_edges(concepts, t_start, t_end, first_seen):
    """EvolvingGraph from {(u, v): year} edge first-appearance map."""
    pairs = {ConceptPair.of(u, v): year for (u, v), year in first_seen.items()}
    return EvolvingGraph.from_first_seen(concepts, t_start, t_end, pairs)
